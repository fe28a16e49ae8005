#include "dckgen/dck.hpp"

#include <cmath>
#include <stdexcept>

namespace dckgen {

namespace {

Tensor he_init(Rng& rng, std::vector<int64_t> shape, int64_t fan_in) {
    return rng.normal_tensor(std::move(shape), 0.0, std::sqrt(2.0 / (double)fan_in));
}

// Kernel-head projection scale: with 256 roughly unit-scale hidden units, the
// per-frame kernel modulation has std ~ 0.05 (= kHeadScale * sqrt(256)) --
// noticeable against the unit identity taps without destabilizing them.
constexpr double kHeadScale = 0.05 / 16.0;

void check_flat(const Tensor& flat, const DckLayerSpec& spec, const char* who) {
    if (spec.ks < 1 || spec.ks % 2 == 0)
        throw std::invalid_argument(std::string(who) + ": kernel size must be odd, got " +
                                    std::to_string(spec.ks));
    if (flat.rank() != 2 || flat.dim(1) != spec.param_count())
        throw std::invalid_argument(std::string(who) + ": want (T," +
                                    std::to_string(spec.param_count()) + "), got " +
                                    shape_str(flat.shape()));
}

}  // namespace

KernelBankLayer split_dynamic_params(const Tensor& flat, const DckLayerSpec& spec) {
    check_flat(flat, spec, "split_dynamic_params");
    int64_t T = flat.dim(0);
    int64_t wcount = (int64_t)spec.c1 * spec.c2 * spec.ks * spec.ks;
    KernelBankLayer out;
    out.spec = spec;
    out.weights = Tensor({T, spec.c1, spec.c2, spec.ks, spec.ks});
    out.bias = Tensor({T, spec.c1});
    for (int64_t t = 0; t < T; ++t) {
        const float* row = flat.data() + t * spec.param_count();
        std::copy(row, row + wcount, out.weights.data() + t * wcount);
        std::copy(row + wcount, row + spec.param_count(), out.bias.data() + t * spec.c1);
    }
    return out;
}

Tensor dynamic_conv(const Tensor& x, const KernelBankLayer& layer) {
    const DckLayerSpec& spec = layer.spec;
    if (x.rank() != 4)
        throw std::invalid_argument("dynamic_conv: input must be rank 4, got " +
                                    shape_str(x.shape()));
    int64_t T = x.dim(0);
    if (layer.weights.rank() != 5 || layer.weights.dim(0) != T)
        throw std::invalid_argument("dynamic_conv: kernel bank has " +
                                    std::to_string(layer.weights.dim(0)) + " frames, input has " +
                                    std::to_string(T));
    if (x.dim(1) != spec.c2)
        throw std::invalid_argument("dynamic_conv: input channels " + std::to_string(x.dim(1)) +
                                    " != c2 " + std::to_string(spec.c2));
    int64_t H = x.dim(2), W = x.dim(3);
    Tensor xg = x.reshaped({1, T * spec.c2, H, W});
    Tensor wg = layer.weights.reshaped({T * spec.c1, spec.c2, spec.ks, spec.ks});
    Tensor bg = layer.bias.reshaped({T * spec.c1});
    ops::Conv2dSpec cs;
    cs.stride = 1;
    cs.padding = (spec.ks - 1) / 2;
    cs.groups = (int)T;
    Tensor y = ops::conv2d(xg, wg, &bg, cs);
    return y.reshaped({T, spec.c1, H, W});
}

Var dynamic_conv(const Var& x, const Var& flat, const DckLayerSpec& spec, ops::PadMode pad) {
    check_flat(flat->value, spec, "dynamic_conv");
    int64_t T = x->value.dim(0);
    if (flat->value.dim(0) != T)
        throw std::invalid_argument("dynamic_conv: kernel bank has " +
                                    std::to_string(flat->value.dim(0)) + " frames, input has " +
                                    std::to_string(T));
    int64_t H = x->value.dim(2), W = x->value.dim(3);
    int64_t wcount = (int64_t)spec.c1 * spec.c2 * spec.ks * spec.ks;
    Var w = ad::reshape(ad::slice_cols(flat, 0, wcount), {T * spec.c1, spec.c2, spec.ks, spec.ks});
    Var b = ad::reshape(ad::slice_cols(flat, wcount, spec.param_count()), {T * spec.c1});
    Var xg = ad::reshape(x, {1, T * spec.c2, H, W});
    ops::Conv2dSpec cs;
    cs.stride = 1;
    cs.padding = (spec.ks - 1) / 2;
    cs.groups = (int)T;
    cs.pad = pad;
    return ad::reshape(ad::conv2d(xg, w, b, cs), {T, spec.c1, H, W});
}

Tensor visualize_kernels(const Tensor& weights_one_frame) {
    const Tensor& w = weights_one_frame;
    if (w.rank() != 4)
        throw std::invalid_argument("visualize_kernels: want (c1,c2,ks,ks), got " +
                                    shape_str(w.shape()));
    if (w.dim(2) != 1 || w.dim(3) != 1)
        throw std::invalid_argument("visualize_kernels: only 1x1 kernels can be imaged, got ks=" +
                                    std::to_string(w.dim(2)));
    int64_t c1 = w.dim(0), c2 = w.dim(1);
    Tensor img({c1, c2});
    float lo = w[0], hi = w[0];
    for (int64_t i = 0; i < w.numel(); ++i) {
        lo = std::min(lo, w[i]);
        hi = std::max(hi, w[i]);
    }
    if ((double)hi - (double)lo < 1e-12) {
        for (int64_t i = 0; i < img.numel(); ++i) img[i] = 0.5f;
        return img;
    }
    float inv = 1.0f / (hi - lo);
    for (int64_t i = 0; i < w.numel(); ++i) img[i] = (w[i] - lo) * inv;
    return img;
}

void SignalEncoder::init(ParamStore& ps, Rng& rng, const std::string& prefix, int feature_dim_) {
    feature_dim = feature_dim_;
    w1 = ps.make(prefix + ".conv1.w", he_init(rng, {8, 1, 3, 3}, 1 * 9));
    b1 = ps.make(prefix + ".conv1.b", Tensor({8}));
    w2 = ps.make(prefix + ".conv2.w", he_init(rng, {16, 8, 3, 3}, 8 * 9));
    b2 = ps.make(prefix + ".conv2.b", Tensor({16}));
    w3 = ps.make(prefix + ".conv3.w", he_init(rng, {32, 16, 3, 3}, 16 * 9));
    b3 = ps.make(prefix + ".conv3.b", Tensor({32}));
    wl = ps.make(prefix + ".fc.w", he_init(rng, {feature_dim, 32}, 32));
    bl = ps.make(prefix + ".fc.b", Tensor({feature_dim}));
}

Var SignalEncoder::forward(const Var& windows) const {
    const Tensor& v = windows->value;
    if (v.rank() != 4 || v.dim(1) != 1 || v.dim(2) != 16 || v.dim(3) != 16)
        throw std::invalid_argument("SignalEncoder: want (N,1,16,16), got " + shape_str(v.shape()));
    ops::Conv2dSpec s2;
    s2.stride = 2;
    s2.padding = 1;
    Var h = ad::activation(ad::conv2d(windows, w1, b1, s2), ops::ActKind::LeakyRelu, 0.2f);
    h = ad::activation(ad::conv2d(h, w2, b2, s2), ops::ActKind::LeakyRelu, 0.2f);
    h = ad::activation(ad::conv2d(h, w3, b3, s2), ops::ActKind::LeakyRelu, 0.2f);
    return ad::linear(ad::global_avg_pool(h), wl, bl);
}

void KernelHead::init(ParamStore& ps, Rng& rng, const std::string& prefix, int feature_dim,
                      std::vector<DckLayerSpec> specs_, float init_dyn_bias) {
    specs = std::move(specs_);
    hidden_w = ps.make(prefix + ".hidden.w", he_init(rng, {256, feature_dim}, feature_dim));
    hidden_b = ps.make(prefix + ".hidden.b", Tensor({256}));
    head_w.clear();
    head_b.clear();
    for (size_t i = 0; i < specs.size(); ++i) {
        const DckLayerSpec& sp = specs[i];
        std::string base = prefix + ".head" + std::to_string(i);
        // Small random projection: kernels vary with the signal from the very
        // first step. A zero head makes the predicted kernels constant, the
        // whole middle stack collapses to a constant map, and training finds
        // the shortcut of closing the attention gate over the mouth before
        // the signal path can learn anything.
        head_w.push_back(
            ps.make(base + ".w", rng.normal_tensor({sp.param_count(), 256}, 0.0, kHeadScale)));
        // Bias slots hold a near-identity kernel, so content flows through the
        // middle stack at init; dynamic-conv bias slots start at init_dyn_bias.
        Tensor b({sp.param_count()});
        int64_t wcount = (int64_t)sp.c1 * sp.c2 * sp.ks * sp.ks;
        int64_t kk = (int64_t)sp.ks * sp.ks;
        for (int64_t o = 0; o < std::min(sp.c1, sp.c2); ++o)
            b[(o * sp.c2 + o) * kk + kk / 2] = 1.0f;
        for (int64_t j = wcount; j < sp.param_count(); ++j) b[j] = init_dyn_bias;
        head_b.push_back(ps.make(base + ".b", std::move(b)));
    }
}

std::vector<Var> KernelHead::forward(const Var& feature) const {
    Var h = ad::activation(ad::linear(feature, hidden_w, hidden_b), ops::ActKind::LeakyRelu, 0.2f);
    std::vector<Var> out;
    out.reserve(head_w.size());
    for (size_t i = 0; i < head_w.size(); ++i)
        out.push_back(ad::linear(h, head_w[i], head_b[i]));
    return out;
}

KernelBank infer_kernels(const SignalEncoder& enc, const KernelHead& head, const Tensor& windows) {
    Var feat = enc.forward(constant(windows));
    std::vector<Var> flats = head.forward(feat);
    KernelBank bank;
    bank.layers.reserve(flats.size());
    for (size_t i = 0; i < flats.size(); ++i)
        bank.layers.push_back(split_dynamic_params(flats[i]->value, head.specs[i]));
    return bank;
}

}  // namespace dckgen
