#include "dckgen/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dckgen {

Var constant(Tensor value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = false;
    return n;
}

Var parameter(Tensor value, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->name = std::move(name);
    return n;
}

double scalar_value(const Var& v) {
    if (!v || v->value.numel() != 1)
        throw std::invalid_argument("scalar_value: node is not scalar");
    return std::isnan(v->hi_value) ? (double)v->value[0] : v->hi_value;
}

namespace {
// Best-available double value for scalar nodes (used to propagate hi_value).
inline double hi_of(const Var& v) {
    return std::isnan(v->hi_value) ? (double)v->value[0] : v->hi_value;
}
inline bool is_scalar(const Var& v) { return v->value.numel() == 1; }
}  // namespace

void backward(const Var& loss) {
    if (!loss) throw std::invalid_argument("backward: null node");
    if (loss->value.numel() != 1)
        throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                    shape_str(loss->value.shape()));
    if (!loss->requires_grad) return;

    // Iterative post-order DFS -> topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, size_t>> stack;
    stack.push_back({loss.get(), 0});
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Node* p = node->parents[idx].get();
            ++idx;
            if (p && p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad[0] = 1.0f;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->has_grad()) n->backward_fn();
    }
}

namespace ad {

namespace {

void acc(Tensor& dst, const Tensor& src) {
    for (int64_t i = 0; i < dst.numel(); ++i) dst[i] += src[i];
}

}  // namespace

Var add(const Var& a, const Var& b) {
    Tensor v = dckgen::add(a->value, b->value);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a) && is_scalar(b)) out->hi_value = hi_of(a) + hi_of(b);
    out->requires_grad = a->requires_grad || b->requires_grad;
    if (out->requires_grad) {
        out->parents = {a, b};
        Var pa = a, pb = b;
        out->backward_fn = [o, pa, pb]() {
            if (pa->requires_grad) acc(pa->ensure_grad(), o->grad);
            if (pb->requires_grad) acc(pb->ensure_grad(), o->grad);
        };
    }
    return out;
}

Var sub(const Var& a, const Var& b) {
    Tensor v = dckgen::sub(a->value, b->value);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a) && is_scalar(b)) out->hi_value = hi_of(a) - hi_of(b);
    out->requires_grad = a->requires_grad || b->requires_grad;
    if (out->requires_grad) {
        out->parents = {a, b};
        Var pa = a, pb = b;
        out->backward_fn = [o, pa, pb]() {
            if (pa->requires_grad) acc(pa->ensure_grad(), o->grad);
            if (pb->requires_grad) {
                Tensor& g = pb->ensure_grad();
                for (int64_t i = 0; i < g.numel(); ++i) g[i] -= o->grad[i];
            }
        };
    }
    return out;
}

Var mul(const Var& a, const Var& b) {
    Tensor v = dckgen::mul(a->value, b->value);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a) && is_scalar(b)) out->hi_value = hi_of(a) * hi_of(b);
    out->requires_grad = a->requires_grad || b->requires_grad;
    if (out->requires_grad) {
        out->parents = {a, b};
        Var pa = a, pb = b;
        out->backward_fn = [o, pa, pb]() {
            if (pa->requires_grad) {
                Tensor& g = pa->ensure_grad();
                for (int64_t i = 0; i < g.numel(); ++i) g[i] += o->grad[i] * pb->value[i];
            }
            if (pb->requires_grad) {
                Tensor& g = pb->ensure_grad();
                for (int64_t i = 0; i < g.numel(); ++i) g[i] += o->grad[i] * pa->value[i];
            }
        };
    }
    return out;
}

Var bmul(const Var& x, const Var& m) {
    const Tensor &xv = x->value, &mv = m->value;
    if (xv.rank() != 4 || mv.rank() != 4 || mv.dim(1) != 1 || xv.dim(0) != mv.dim(0) ||
        xv.dim(2) != mv.dim(2) || xv.dim(3) != mv.dim(3))
        throw std::invalid_argument("bmul: want x (N,C,H,W) and mask (N,1,H,W), got " +
                                    shape_str(xv.shape()) + " and " + shape_str(mv.shape()));
    int64_t N = xv.dim(0), C = xv.dim(1), M = xv.dim(2) * xv.dim(3);
    Tensor v(xv.shape());
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c) {
            const float* xp = xv.data() + (n * C + c) * M;
            const float* mp = mv.data() + n * M;
            float* vp = v.data() + (n * C + c) * M;
            for (int64_t i = 0; i < M; ++i) vp[i] = xp[i] * mp[i];
        }
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = x->requires_grad || m->requires_grad;
    if (out->requires_grad) {
        out->parents = {x, m};
        Var px = x, pm = m;
        out->backward_fn = [o, px, pm, N, C, M]() {
            if (px->requires_grad) {
                Tensor& g = px->ensure_grad();
                for (int64_t n = 0; n < N; ++n)
                    for (int64_t c = 0; c < C; ++c) {
                        const float* mp = pm->value.data() + n * M;
                        const float* op = o->grad.data() + (n * C + c) * M;
                        float* gp = g.data() + (n * C + c) * M;
                        for (int64_t i = 0; i < M; ++i) gp[i] += op[i] * mp[i];
                    }
            }
            if (pm->requires_grad) {
                Tensor& g = pm->ensure_grad();
                for (int64_t n = 0; n < N; ++n)
                    for (int64_t c = 0; c < C; ++c) {
                        const float* xp = px->value.data() + (n * C + c) * M;
                        const float* op = o->grad.data() + (n * C + c) * M;
                        float* gp = g.data() + n * M;
                        for (int64_t i = 0; i < M; ++i) gp[i] += op[i] * xp[i];
                    }
            }
        };
    }
    return out;
}

Var affine(const Var& a, float s, float t) {
    Tensor v(a->value.shape());
    for (int64_t i = 0; i < v.numel(); ++i) v[i] = s * a->value[i] + t;
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a)) out->hi_value = (double)s * hi_of(a) + (double)t;
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa, s]() {
            Tensor& g = pa->ensure_grad();
            for (int64_t i = 0; i < g.numel(); ++i) g[i] += s * o->grad[i];
        };
    }
    return out;
}

Var square(const Var& a) {
    Tensor v(a->value.shape());
    for (int64_t i = 0; i < v.numel(); ++i) v[i] = a->value[i] * a->value[i];
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a)) out->hi_value = hi_of(a) * hi_of(a);
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa]() {
            Tensor& g = pa->ensure_grad();
            for (int64_t i = 0; i < g.numel(); ++i) g[i] += 2.0f * pa->value[i] * o->grad[i];
        };
    }
    return out;
}

Var abs(const Var& a) {
    Tensor v(a->value.shape());
    for (int64_t i = 0; i < v.numel(); ++i) v[i] = std::fabs(a->value[i]);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    if (is_scalar(a)) out->hi_value = std::fabs(hi_of(a));
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa]() {
            Tensor& g = pa->ensure_grad();
            for (int64_t i = 0; i < g.numel(); ++i)
                g[i] += (pa->value[i] >= 0.0f ? 1.0f : -1.0f) * o->grad[i];
        };
    }
    return out;
}

Var sum(const Var& a) {
    double acc = dckgen::sum(a->value);
    Tensor v = Tensor::scalar((float)acc);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->hi_value = acc;
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa]() {
            Tensor& g = pa->ensure_grad();
            float gv = o->grad[0];
            for (int64_t i = 0; i < g.numel(); ++i) g[i] += gv;
        };
    }
    return out;
}

Var mean(const Var& a) {
    if (a->value.numel() == 0) throw std::invalid_argument("mean: empty tensor");
    double acc = dckgen::mean(a->value);
    Tensor v = Tensor::scalar((float)acc);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->hi_value = acc;
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa]() {
            Tensor& g = pa->ensure_grad();
            float gv = o->grad[0] / (float)g.numel();
            for (int64_t i = 0; i < g.numel(); ++i) g[i] += gv;
        };
    }
    return out;
}

Var reshape(const Var& a, std::vector<int64_t> shape) {
    Tensor v = a->value.reshaped(shape);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa]() {
            Tensor& g = pa->ensure_grad();
            for (int64_t i = 0; i < g.numel(); ++i) g[i] += o->grad[i];
        };
    }
    return out;
}

Var concat_channels(const Var& a, const Var& b) {
    const Tensor &av = a->value, &bv = b->value;
    if (av.rank() != 4 || bv.rank() != 4)
        throw std::invalid_argument("concat_channels: inputs must be rank 4");
    if (av.dim(0) != bv.dim(0) || av.dim(2) != bv.dim(2) || av.dim(3) != bv.dim(3))
        throw std::invalid_argument("concat_channels: shape mismatch " + shape_str(av.shape()) +
                                    " vs " + shape_str(bv.shape()));
    int64_t N = av.dim(0), Ca = av.dim(1), Cb = bv.dim(1), H = av.dim(2), W = av.dim(3);
    int64_t M = H * W;
    Tensor v({N, Ca + Cb, H, W});
    for (int64_t n = 0; n < N; ++n) {
        std::copy(av.data() + n * Ca * M, av.data() + (n + 1) * Ca * M,
                  v.data() + n * (Ca + Cb) * M);
        std::copy(bv.data() + n * Cb * M, bv.data() + (n + 1) * Cb * M,
                  v.data() + (n * (Ca + Cb) + Ca) * M);
    }
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = a->requires_grad || b->requires_grad;
    if (out->requires_grad) {
        out->parents = {a, b};
        Var pa = a, pb = b;
        out->backward_fn = [o, pa, pb, N, Ca, Cb, M]() {
            if (pa->requires_grad) {
                Tensor& g = pa->ensure_grad();
                for (int64_t n = 0; n < N; ++n)
                    for (int64_t i = 0; i < Ca * M; ++i)
                        g[n * Ca * M + i] += o->grad[n * (Ca + Cb) * M + i];
            }
            if (pb->requires_grad) {
                Tensor& g = pb->ensure_grad();
                for (int64_t n = 0; n < N; ++n)
                    for (int64_t i = 0; i < Cb * M; ++i)
                        g[n * Cb * M + i] += o->grad[(n * (Ca + Cb) + Ca) * M + i];
            }
        };
    }
    return out;
}

Var slice_cols(const Var& a, int64_t begin, int64_t end) {
    const Tensor& av = a->value;
    if (av.rank() != 2) throw std::invalid_argument("slice_cols: input must be rank 2");
    if (begin < 0 || end > av.dim(1) || begin >= end)
        throw std::invalid_argument("slice_cols: bad range [" + std::to_string(begin) + "," +
                                    std::to_string(end) + ") for " + shape_str(av.shape()));
    int64_t N = av.dim(0), C = av.dim(1), K = end - begin;
    Tensor v({N, K});
    for (int64_t n = 0; n < N; ++n)
        std::copy(av.data() + n * C + begin, av.data() + n * C + end, v.data() + n * K);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = a->requires_grad;
    if (out->requires_grad) {
        out->parents = {a};
        Var pa = a;
        out->backward_fn = [o, pa, N, C, K, begin]() {
            Tensor& g = pa->ensure_grad();
            for (int64_t n = 0; n < N; ++n)
                for (int64_t k = 0; k < K; ++k) g[n * C + begin + k] += o->grad[n * K + k];
        };
    }
    return out;
}

Var conv2d(const Var& x, const Var& w, const Var& b, const ops::Conv2dSpec& spec) {
    Tensor v = ops::conv2d(x->value, w->value, b ? &b->value : nullptr, spec);
    std::vector<Var> parents = b ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    bool rg = x->requires_grad || w->requires_grad || (b && b->requires_grad);
    out->requires_grad = rg;
    if (rg) {
        out->parents = parents;
        Var px = x, pw = w, pb = b;
        out->backward_fn = [o, px, pw, pb, spec]() {
            Tensor* gx = px->requires_grad ? &px->ensure_grad() : nullptr;
            Tensor* gw = pw->requires_grad ? &pw->ensure_grad() : nullptr;
            Tensor* gb = (pb && pb->requires_grad) ? &pb->ensure_grad() : nullptr;
            ops::conv2d_backward(px->value, pw->value, spec, o->grad, gx, gw, gb);
        };
    }
    return out;
}

Var tconv2d(const Var& x, const Var& w, const Var& b, int stride, int padding, ops::PadMode pad) {
    Tensor v = ops::tconv2d(x->value, w->value, b ? &b->value : nullptr, stride, padding, pad);
    std::vector<Var> parents = b ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    bool rg = x->requires_grad || w->requires_grad || (b && b->requires_grad);
    out->requires_grad = rg;
    if (rg) {
        out->parents = parents;
        Var px = x, pw = w, pb = b;
        out->backward_fn = [o, px, pw, pb, stride, padding, pad]() {
            Tensor* gx = px->requires_grad ? &px->ensure_grad() : nullptr;
            Tensor* gw = pw->requires_grad ? &pw->ensure_grad() : nullptr;
            Tensor* gb = (pb && pb->requires_grad) ? &pb->ensure_grad() : nullptr;
            ops::tconv2d_backward(px->value, pw->value, stride, padding, pad, o->grad, gx, gw, gb);
        };
    }
    return out;
}

Var activation(const Var& x, ops::ActKind kind, float slope) {
    Tensor v = ops::activation(x->value, kind, slope);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = x->requires_grad;
    if (out->requires_grad) {
        out->parents = {x};
        Var px = x;
        out->backward_fn = [o, px, kind, slope]() {
            Tensor gx = ops::activation_backward(px->value, o->value, kind, slope, o->grad);
            acc(px->ensure_grad(), gx);
        };
    }
    return out;
}

Var instance_norm(const Var& x, const Var& gain, const Var& offset, float eps) {
    Tensor v = ops::instance_norm(x->value, gain->value, offset->value, eps);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = x->requires_grad || gain->requires_grad || offset->requires_grad;
    if (out->requires_grad) {
        out->parents = {x, gain, offset};
        Var px = x, pg = gain, po = offset;
        out->backward_fn = [o, px, pg, po, eps]() {
            Tensor* gx = px->requires_grad ? &px->ensure_grad() : nullptr;
            Tensor* gg = pg->requires_grad ? &pg->ensure_grad() : nullptr;
            Tensor* gof = po->requires_grad ? &po->ensure_grad() : nullptr;
            ops::instance_norm_backward(px->value, pg->value, eps, o->grad, gx, gg, gof);
        };
    }
    return out;
}

Var linear(const Var& x, const Var& w, const Var& b) {
    Tensor v = ops::linear(x->value, w->value, b ? &b->value : nullptr);
    std::vector<Var> parents = b ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    bool rg = x->requires_grad || w->requires_grad || (b && b->requires_grad);
    out->requires_grad = rg;
    if (rg) {
        out->parents = parents;
        Var px = x, pw = w, pb = b;
        out->backward_fn = [o, px, pw, pb]() {
            Tensor* gx = px->requires_grad ? &px->ensure_grad() : nullptr;
            Tensor* gw = pw->requires_grad ? &pw->ensure_grad() : nullptr;
            Tensor* gb = (pb && pb->requires_grad) ? &pb->ensure_grad() : nullptr;
            ops::linear_backward(px->value, pw->value, o->grad, gx, gw, gb);
        };
    }
    return out;
}

Var global_avg_pool(const Var& x) {
    Tensor v = ops::global_avg_pool(x->value);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = x->requires_grad;
    if (out->requires_grad) {
        out->parents = {x};
        Var px = x;
        out->backward_fn = [o, px]() {
            Tensor gx = ops::global_avg_pool_backward(px->value, o->grad);
            acc(px->ensure_grad(), gx);
        };
    }
    return out;
}

Var upsample_nearest(const Var& x, int factor) {
    Tensor v = ops::upsample_nearest(x->value, factor);
    auto out = std::make_shared<Node>();
    Node* o = out.get();
    out->value = std::move(v);
    out->requires_grad = x->requires_grad;
    if (out->requires_grad) {
        out->parents = {x};
        Var px = x;
        out->backward_fn = [o, px, factor]() {
            Tensor gx = ops::upsample_nearest_backward(px->value, factor, o->grad);
            acc(px->ensure_grad(), gx);
        };
    }
    return out;
}

}  // namespace ad

}  // namespace dckgen
