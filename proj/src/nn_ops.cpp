#include "dckgen/nn_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dckgen::ops {

namespace {

inline int64_t wrap(int64_t i, int64_t n) {
    i %= n;
    return i < 0 ? i + n : i;
}

void check_rank4(const Tensor& t, const char* who, const char* what) {
    if (t.rank() != 4)
        throw std::invalid_argument(std::string(who) + ": " + what + " must be rank 4, got " +
                                    shape_str(t.shape()));
}

struct ConvDims {
    int64_t N, C, H, W;      // input
    int64_t OC, ICg, KH, KW; // weight
    int64_t G, OCg;          // groups
    int64_t HO, WO;          // output
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, const Tensor* bias, const Conv2dSpec& spec) {
    check_rank4(x, "conv2d", "input");
    check_rank4(w, "conv2d", "weight");
    if (spec.stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (spec.padding < 0) throw std::invalid_argument("conv2d: padding must be >= 0");
    if (spec.groups < 1) throw std::invalid_argument("conv2d: groups must be >= 1");
    ConvDims d;
    d.N = x.dim(0); d.C = x.dim(1); d.H = x.dim(2); d.W = x.dim(3);
    d.OC = w.dim(0); d.ICg = w.dim(1); d.KH = w.dim(2); d.KW = w.dim(3);
    d.G = spec.groups;
    if (d.C != d.ICg * d.G)
        throw std::invalid_argument("conv2d: input channels (" + std::to_string(d.C) +
                                    ") != groups (" + std::to_string(d.G) +
                                    ") * per-group in channels (" + std::to_string(d.ICg) + ")");
    if (d.OC % d.G != 0)
        throw std::invalid_argument("conv2d: out channels (" + std::to_string(d.OC) +
                                    ") not divisible by groups (" + std::to_string(d.G) + ")");
    d.OCg = d.OC / d.G;
    if (bias && (bias->rank() != 1 || bias->dim(0) != d.OC))
        throw std::invalid_argument("conv2d: bias must have shape (" + std::to_string(d.OC) +
                                    "), got " + shape_str(bias->shape()));
    int64_t p = spec.padding, s = spec.stride;
    d.HO = (d.H + 2 * p - d.KH) / s + 1;
    d.WO = (d.W + 2 * p - d.KW) / s + 1;
    if (d.H + 2 * p < d.KH || d.W + 2 * p < d.KW)
        throw std::invalid_argument("conv2d: kernel " + std::to_string(d.KH) + "x" +
                                    std::to_string(d.KW) + " does not fit padded input " +
                                    shape_str(x.shape()) + " with padding " + std::to_string(p));
    return d;
}

}  // namespace

const char* act_name(ActKind k) {
    switch (k) {
        case ActKind::LeakyRelu: return "leaky_relu";
        case ActKind::Tanh: return "tanh";
        case ActKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

float act_eval(ActKind k, float slope, float x) {
    switch (k) {
        case ActKind::LeakyRelu: return x >= 0.0f ? x : slope * x;
        case ActKind::Tanh: return std::tanh(x);
        case ActKind::Sigmoid: return 1.0f / (1.0f + std::exp(-x));
    }
    return 0.0f;
}

double act_lipschitz(ActKind k, float slope) {
    switch (k) {
        case ActKind::LeakyRelu: return std::max(1.0, (double)std::fabs(slope));
        case ActKind::Tanh: return 1.0;
        case ActKind::Sigmoid: return 0.25;
    }
    return 1.0;
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const Conv2dSpec& spec) {
    ConvDims d = conv_dims(x, w, bias, spec);
    const int64_t s = spec.stride, p = spec.padding;
    Tensor out({d.N, d.OC, d.HO, d.WO});
    for (int64_t n = 0; n < d.N; ++n) {
        for (int64_t oc = 0; oc < d.OC; ++oc) {
            int64_t g = oc / d.OCg;
            float* oplane = out.data() + ((n * d.OC + oc) * d.HO) * d.WO;
            if (bias) {
                float bv = (*bias)[oc];
                for (int64_t i = 0; i < d.HO * d.WO; ++i) oplane[i] = bv;
            }
            for (int64_t ic = 0; ic < d.ICg; ++ic) {
                const float* xplane = x.data() + ((n * d.C + g * d.ICg + ic) * d.H) * d.W;
                const float* wk = w.data() + ((oc * d.ICg + ic) * d.KH) * d.KW;
                // accumulation order fixed: per input channel, kernel row-major
                for (int64_t kh = 0; kh < d.KH; ++kh) {
                    for (int64_t kw = 0; kw < d.KW; ++kw) {
                        float wv = wk[kh * d.KW + kw];
                        if (wv == 0.0f) continue;
                        if (spec.pad == PadMode::Zero) {
                            int64_t off = kw - p;
                            int64_t rem = d.W - 1 - off;
                            if (rem < 0) continue;  // no in-bounds column for this kw
                            int64_t lo = 0, hi = d.WO - 1;
                            if (off < 0) lo = (-off + s - 1) / s;
                            if (hi * s > rem) hi = rem / s;
                            for (int64_t oh = 0; oh < d.HO; ++oh) {
                                int64_t ih = oh * s + kh - p;
                                if (ih < 0 || ih >= d.H) continue;
                                const float* xrow = xplane + ih * d.W + off;
                                float* orow = oplane + oh * d.WO;
                                for (int64_t ow = lo; ow <= hi; ++ow)
                                    orow[ow] += wv * xrow[ow * s];
                            }
                        } else {
                            for (int64_t oh = 0; oh < d.HO; ++oh) {
                                int64_t ih = wrap(oh * s + kh - p, d.H);
                                const float* xrow = xplane + ih * d.W;
                                float* orow = oplane + oh * d.WO;
                                for (int64_t ow = 0; ow < d.WO; ++ow)
                                    orow[ow] += wv * xrow[wrap(ow * s + kw - p, d.W)];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

void conv2d_backward(const Tensor& x, const Tensor& w, const Conv2dSpec& spec, const Tensor& gout,
                     Tensor* gx, Tensor* gw, Tensor* gb) {
    ConvDims d = conv_dims(x, w, nullptr, spec);
    if (gout.rank() != 4 || gout.dim(0) != d.N || gout.dim(1) != d.OC || gout.dim(2) != d.HO ||
        gout.dim(3) != d.WO)
        throw std::invalid_argument("conv2d_backward: bad gout shape " + shape_str(gout.shape()));
    const int64_t s = spec.stride, p = spec.padding;
    if (gx && !gx->same_shape(x)) *gx = Tensor(x.shape());
    if (gw && !gw->same_shape(w)) *gw = Tensor(w.shape());
    if (gb && (gb->rank() != 1 || gb->dim(0) != d.OC)) *gb = Tensor({d.OC});

    if (gb) {
        for (int64_t n = 0; n < d.N; ++n)
            for (int64_t oc = 0; oc < d.OC; ++oc) {
                const float* gplane = gout.data() + ((n * d.OC + oc) * d.HO) * d.WO;
                double acc = 0.0;
                for (int64_t i = 0; i < d.HO * d.WO; ++i) acc += gplane[i];
                (*gb)[oc] += (float)acc;
            }
    }
    for (int64_t n = 0; n < d.N; ++n) {
        for (int64_t oc = 0; oc < d.OC; ++oc) {
            int64_t g = oc / d.OCg;
            const float* gplane = gout.data() + ((n * d.OC + oc) * d.HO) * d.WO;
            for (int64_t ic = 0; ic < d.ICg; ++ic) {
                int64_t c = g * d.ICg + ic;
                const float* xplane = x.data() + ((n * d.C + c) * d.H) * d.W;
                float* gxplane = gx ? gx->data() + ((n * d.C + c) * d.H) * d.W : nullptr;
                for (int64_t kh = 0; kh < d.KH; ++kh) {
                    for (int64_t kw = 0; kw < d.KW; ++kw) {
                        float wv = w.data()[((oc * d.ICg + ic) * d.KH + kh) * d.KW + kw];
                        int64_t off = kw - p;
                        int64_t rem = d.W - 1 - off;
                        if (spec.pad == PadMode::Zero && rem < 0) continue;
                        int64_t lo = 0, hi = d.WO - 1;
                        if (off < 0) lo = (-off + s - 1) / s;
                        if (hi * s > rem) hi = rem / s;
                        double wacc = 0.0;
                        for (int64_t oh = 0; oh < d.HO; ++oh) {
                            const float* grow = gplane + oh * d.WO;
                            if (spec.pad == PadMode::Zero) {
                                int64_t ih = oh * s + kh - p;
                                if (ih < 0 || ih >= d.H) continue;
                                const float* xrow = xplane + ih * d.W + off;
                                if (gw)
                                    for (int64_t ow = lo; ow <= hi; ++ow)
                                        wacc += (double)xrow[ow * s] * grow[ow];
                                if (gx) {
                                    float* gxrow = gxplane + ih * d.W + off;
                                    for (int64_t ow = lo; ow <= hi; ++ow)
                                        gxrow[ow * s] += wv * grow[ow];
                                }
                            } else {
                                int64_t ih = wrap(oh * s + kh - p, d.H);
                                const float* xrow = xplane + ih * d.W;
                                float* gxrow = gxplane ? gxplane + ih * d.W : nullptr;
                                for (int64_t ow = 0; ow < d.WO; ++ow) {
                                    int64_t iw = wrap(ow * s + kw - p, d.W);
                                    if (gw) wacc += (double)xrow[iw] * grow[ow];
                                    if (gx) gxrow[iw] += wv * grow[ow];
                                }
                            }
                        }
                        if (gw)
                            gw->data()[((oc * d.ICg + ic) * d.KH + kh) * d.KW + kw] += (float)wacc;
                    }
                }
            }
        }
    }
}

Tensor tconv2d(const Tensor& x, const Tensor& w, const Tensor* bias, int stride, int padding,
               PadMode pad) {
    check_rank4(x, "tconv2d", "input");
    check_rank4(w, "tconv2d", "weight");
    if (stride < 1) throw std::invalid_argument("tconv2d: stride must be >= 1");
    if (padding < 0) throw std::invalid_argument("tconv2d: padding must be >= 0");
    int64_t N = x.dim(0), IC = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (w.dim(0) != IC)
        throw std::invalid_argument("tconv2d: weight in channels (" + std::to_string(w.dim(0)) +
                                    ") != input channels (" + std::to_string(IC) + ")");
    int64_t OC = w.dim(1), KH = w.dim(2), KW = w.dim(3);
    if (bias && (bias->rank() != 1 || bias->dim(0) != OC))
        throw std::invalid_argument("tconv2d: bias shape mismatch");
    int64_t HO = (H - 1) * stride - 2 * padding + KH;
    int64_t WO = (W - 1) * stride - 2 * padding + KW;
    if (HO < 1 || WO < 1) throw std::invalid_argument("tconv2d: empty output");
    Tensor out({N, OC, HO, WO});
    if (bias)
        for (int64_t n = 0; n < N; ++n)
            for (int64_t oc = 0; oc < OC; ++oc) {
                float* oplane = out.data() + ((n * OC + oc) * HO) * WO;
                float bv = (*bias)[oc];
                for (int64_t i = 0; i < HO * WO; ++i) oplane[i] = bv;
            }
    for (int64_t n = 0; n < N; ++n)
        for (int64_t ic = 0; ic < IC; ++ic) {
            const float* xplane = x.data() + ((n * IC + ic) * H) * W;
            for (int64_t oc = 0; oc < OC; ++oc) {
                float* oplane = out.data() + ((n * OC + oc) * HO) * WO;
                const float* wk = w.data() + ((ic * OC + oc) * KH) * KW;
                for (int64_t ih = 0; ih < H; ++ih)
                    for (int64_t iw = 0; iw < W; ++iw) {
                        float xv = xplane[ih * W + iw];
                        if (xv == 0.0f) continue;
                        for (int64_t kh = 0; kh < KH; ++kh) {
                            int64_t oh = ih * stride - padding + kh;
                            if (pad == PadMode::Zero) {
                                if (oh < 0 || oh >= HO) continue;
                            } else {
                                oh = wrap(oh, HO);
                            }
                            for (int64_t kw = 0; kw < KW; ++kw) {
                                int64_t ow = iw * stride - padding + kw;
                                if (pad == PadMode::Zero) {
                                    if (ow < 0 || ow >= WO) continue;
                                } else {
                                    ow = wrap(ow, WO);
                                }
                                oplane[oh * WO + ow] += xv * wk[kh * KW + kw];
                            }
                        }
                    }
            }
        }
    return out;
}

void tconv2d_backward(const Tensor& x, const Tensor& w, int stride, int padding, PadMode pad,
                      const Tensor& gout, Tensor* gx, Tensor* gw, Tensor* gb) {
    int64_t N = x.dim(0), IC = x.dim(1), H = x.dim(2), W = x.dim(3);
    int64_t OC = w.dim(1), KH = w.dim(2), KW = w.dim(3);
    int64_t HO = (H - 1) * stride - 2 * padding + KH;
    int64_t WO = (W - 1) * stride - 2 * padding + KW;
    if (gout.rank() != 4 || gout.dim(0) != N || gout.dim(1) != OC || gout.dim(2) != HO ||
        gout.dim(3) != WO)
        throw std::invalid_argument("tconv2d_backward: bad gout shape " + shape_str(gout.shape()));
    if (gx && !gx->same_shape(x)) *gx = Tensor(x.shape());
    if (gw && !gw->same_shape(w)) *gw = Tensor(w.shape());
    if (gb && (gb->rank() != 1 || gb->dim(0) != OC)) *gb = Tensor({OC});
    if (gb)
        for (int64_t n = 0; n < N; ++n)
            for (int64_t oc = 0; oc < OC; ++oc) {
                const float* gplane = gout.data() + ((n * OC + oc) * HO) * WO;
                double acc = 0.0;
                for (int64_t i = 0; i < HO * WO; ++i) acc += gplane[i];
                (*gb)[oc] += (float)acc;
            }
    for (int64_t n = 0; n < N; ++n)
        for (int64_t ic = 0; ic < IC; ++ic) {
            const float* xplane = x.data() + ((n * IC + ic) * H) * W;
            float* gxplane = gx ? gx->data() + ((n * IC + ic) * H) * W : nullptr;
            for (int64_t oc = 0; oc < OC; ++oc) {
                const float* gplane = gout.data() + ((n * OC + oc) * HO) * WO;
                const float* wk = w.data() + ((ic * OC + oc) * KH) * KW;
                float* gwk = gw ? gw->data() + ((ic * OC + oc) * KH) * KW : nullptr;
                for (int64_t ih = 0; ih < H; ++ih)
                    for (int64_t iw = 0; iw < W; ++iw) {
                        float xv = xplane[ih * W + iw];
                        double xacc = 0.0;
                        for (int64_t kh = 0; kh < KH; ++kh) {
                            int64_t oh = ih * stride - padding + kh;
                            if (pad == PadMode::Zero) {
                                if (oh < 0 || oh >= HO) continue;
                            } else {
                                oh = wrap(oh, HO);
                            }
                            for (int64_t kw = 0; kw < KW; ++kw) {
                                int64_t ow = iw * stride - padding + kw;
                                if (pad == PadMode::Zero) {
                                    if (ow < 0 || ow >= WO) continue;
                                } else {
                                    ow = wrap(ow, WO);
                                }
                                float gv = gplane[oh * WO + ow];
                                if (gx) xacc += (double)wk[kh * KW + kw] * gv;
                                if (gw) gwk[kh * KW + kw] += xv * gv;
                            }
                        }
                        if (gx) gxplane[ih * W + iw] += (float)xacc;
                    }
            }
        }
}

Tensor activation(const Tensor& x, ActKind kind, float slope) {
    if (kind == ActKind::LeakyRelu && (slope < 0.0f || slope > 1.0f))
        throw std::invalid_argument("leaky_relu: slope must be in [0,1], got " +
                                    std::to_string(slope));
    Tensor y(x.shape());
    switch (kind) {
        case ActKind::LeakyRelu:
            for (int64_t i = 0; i < x.numel(); ++i) y[i] = x[i] >= 0.0f ? x[i] : slope * x[i];
            break;
        case ActKind::Tanh:
            for (int64_t i = 0; i < x.numel(); ++i) y[i] = std::tanh(x[i]);
            break;
        case ActKind::Sigmoid:
            for (int64_t i = 0; i < x.numel(); ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
            break;
    }
    return y;
}

Tensor activation_backward(const Tensor& x, const Tensor& y, ActKind kind, float slope,
                           const Tensor& gout) {
    if (!gout.same_shape(x))
        throw std::invalid_argument("activation_backward: gout shape mismatch");
    Tensor gx(x.shape());
    switch (kind) {
        case ActKind::LeakyRelu:
            for (int64_t i = 0; i < x.numel(); ++i) gx[i] = gout[i] * (x[i] >= 0.0f ? 1.0f : slope);
            break;
        case ActKind::Tanh:
            for (int64_t i = 0; i < x.numel(); ++i) gx[i] = gout[i] * (1.0f - y[i] * y[i]);
            break;
        case ActKind::Sigmoid:
            for (int64_t i = 0; i < x.numel(); ++i) gx[i] = gout[i] * y[i] * (1.0f - y[i]);
            break;
    }
    return gx;
}

Tensor instance_norm(const Tensor& x, const Tensor& gain, const Tensor& offset, float eps) {
    check_rank4(x, "instance_norm", "input");
    int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), M = H * W;
    if (gain.rank() != 1 || gain.dim(0) != C || offset.rank() != 1 || offset.dim(0) != C)
        throw std::invalid_argument("instance_norm: gain/offset must have shape (" +
                                    std::to_string(C) + ")");
    if (M == 0) throw std::invalid_argument("instance_norm: empty spatial dims");
    Tensor y(x.shape());
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const float* xp = x.data() + ((n * C + c) * H) * W;
            float* yp = y.data() + ((n * C + c) * H) * W;
            double s = 0.0, s2 = 0.0;
            for (int64_t i = 0; i < M; ++i) {
                s += xp[i];
                s2 += (double)xp[i] * xp[i];
            }
            double mu = s / M;
            double var = s2 / M - mu * mu;
            if (var < 0) var = 0;
            float inv = (float)(1.0 / std::sqrt(var + eps));
            float g = gain[c], b = offset[c], m = (float)mu;
            for (int64_t i = 0; i < M; ++i) yp[i] = g * (xp[i] - m) * inv + b;
        }
    return y;
}

void instance_norm_backward(const Tensor& x, const Tensor& gain, float eps, const Tensor& gout,
                            Tensor* gx, Tensor* ggain, Tensor* goffset) {
    int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), M = H * W;
    if (!gout.same_shape(x))
        throw std::invalid_argument("instance_norm_backward: gout shape mismatch");
    if (gx && !gx->same_shape(x)) *gx = Tensor(x.shape());
    if (ggain && (ggain->rank() != 1 || ggain->dim(0) != C)) *ggain = Tensor({C});
    if (goffset && (goffset->rank() != 1 || goffset->dim(0) != C)) *goffset = Tensor({C});
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const float* xp = x.data() + ((n * C + c) * H) * W;
            const float* gp = gout.data() + ((n * C + c) * H) * W;
            double s = 0.0, s2 = 0.0;
            for (int64_t i = 0; i < M; ++i) {
                s += xp[i];
                s2 += (double)xp[i] * xp[i];
            }
            double mu = s / M;
            double var = s2 / M - mu * mu;
            if (var < 0) var = 0;
            double inv = 1.0 / std::sqrt(var + eps);
            double gsum = 0.0, gxhat = 0.0;
            for (int64_t i = 0; i < M; ++i) {
                double xh = (xp[i] - mu) * inv;
                gsum += gp[i];
                gxhat += gp[i] * xh;
            }
            if (goffset) (*goffset)[c] += (float)gsum;
            if (ggain) (*ggain)[c] += (float)gxhat;
            if (gx) {
                float* gxp = gx->data() + ((n * C + c) * H) * W;
                double gm = gsum / M, gxm = gxhat / M;
                double ginv = gain[c] * inv;
                for (int64_t i = 0; i < M; ++i) {
                    double xh = (xp[i] - mu) * inv;
                    gxp[i] += (float)(ginv * (gp[i] - gm - xh * gxm));
                }
            }
        }
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor* bias) {
    if (x.rank() != 2 || w.rank() != 2)
        throw std::invalid_argument("linear: x and w must be rank 2");
    int64_t N = x.dim(0), IN = x.dim(1), OUT = w.dim(0);
    if (w.dim(1) != IN)
        throw std::invalid_argument("linear: w in-features (" + std::to_string(w.dim(1)) +
                                    ") != x features (" + std::to_string(IN) + ")");
    if (bias && (bias->rank() != 1 || bias->dim(0) != OUT))
        throw std::invalid_argument("linear: bias shape mismatch");
    Tensor y({N, OUT});
    for (int64_t n = 0; n < N; ++n) {
        const float* xr = x.data() + n * IN;
        float* yr = y.data() + n * OUT;
        for (int64_t o = 0; o < OUT; ++o) {
            const float* wr = w.data() + o * IN;
            double acc = bias ? (double)(*bias)[o] : 0.0;
            for (int64_t i = 0; i < IN; ++i) acc += (double)xr[i] * wr[i];
            yr[o] = (float)acc;
        }
    }
    return y;
}

void linear_backward(const Tensor& x, const Tensor& w, const Tensor& gout, Tensor* gx, Tensor* gw,
                     Tensor* gb) {
    int64_t N = x.dim(0), IN = x.dim(1), OUT = w.dim(0);
    if (gout.rank() != 2 || gout.dim(0) != N || gout.dim(1) != OUT)
        throw std::invalid_argument("linear_backward: bad gout shape");
    if (gx && !gx->same_shape(x)) *gx = Tensor(x.shape());
    if (gw && !gw->same_shape(w)) *gw = Tensor(w.shape());
    if (gb && (gb->rank() != 1 || gb->dim(0) != OUT)) *gb = Tensor({OUT});
    for (int64_t n = 0; n < N; ++n) {
        const float* xr = x.data() + n * IN;
        const float* gr = gout.data() + n * OUT;
        for (int64_t o = 0; o < OUT; ++o) {
            float gv = gr[o];
            if (gb) (*gb)[o] += gv;
            if (gv == 0.0f) continue;
            const float* wr = w.data() + o * IN;
            if (gw) {
                float* gwr = gw->data() + o * IN;
                for (int64_t i = 0; i < IN; ++i) gwr[i] += gv * xr[i];
            }
            if (gx) {
                float* gxr = gx->data() + n * IN;
                for (int64_t i = 0; i < IN; ++i) gxr[i] += gv * wr[i];
            }
        }
    }
}

Tensor global_avg_pool(const Tensor& x) {
    check_rank4(x, "global_avg_pool", "input");
    int64_t N = x.dim(0), C = x.dim(1), M = x.dim(2) * x.dim(3);
    if (M == 0) throw std::invalid_argument("global_avg_pool: empty spatial dims");
    Tensor y({N, C});
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const float* xp = x.data() + (n * C + c) * M;
            double acc = 0.0;
            for (int64_t i = 0; i < M; ++i) acc += xp[i];
            y.at2(n, c) = (float)(acc / M);
        }
    return y;
}

Tensor global_avg_pool_backward(const Tensor& x, const Tensor& gout) {
    int64_t N = x.dim(0), C = x.dim(1), M = x.dim(2) * x.dim(3);
    Tensor gx(x.shape());
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            float g = gout.at2(n, c) / (float)M;
            float* gp = gx.data() + (n * C + c) * M;
            for (int64_t i = 0; i < M; ++i) gp[i] = g;
        }
    return gx;
}

Tensor upsample_nearest(const Tensor& x, int factor) {
    check_rank4(x, "upsample_nearest", "input");
    if (factor < 1) throw std::invalid_argument("upsample_nearest: factor must be >= 1");
    int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    Tensor y({N, C, H * factor, W * factor});
    for (int64_t nc = 0; nc < N * C; ++nc) {
        const float* xp = x.data() + nc * H * W;
        float* yp = y.data() + nc * H * factor * W * factor;
        for (int64_t oh = 0; oh < H * factor; ++oh)
            for (int64_t ow = 0; ow < W * factor; ++ow)
                yp[oh * W * factor + ow] = xp[(oh / factor) * W + ow / factor];
    }
    return y;
}

Tensor upsample_nearest_backward(const Tensor& x, int factor, const Tensor& gout) {
    int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    Tensor gx(x.shape());
    for (int64_t nc = 0; nc < N * C; ++nc) {
        const float* gp = gout.data() + nc * H * factor * W * factor;
        float* gxp = gx.data() + nc * H * W;
        for (int64_t oh = 0; oh < H * factor; ++oh)
            for (int64_t ow = 0; ow < W * factor; ++ow)
                gxp[(oh / factor) * W + ow / factor] += gp[oh * W * factor + ow];
    }
    return gx;
}

}  // namespace dckgen::ops
