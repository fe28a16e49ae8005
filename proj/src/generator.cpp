#include "dckgen/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace dckgen {

namespace {

Tensor he_init(Rng& rng, std::vector<int64_t> shape, int64_t fan_in) {
    return rng.normal_tensor(std::move(shape), 0.0, std::sqrt(2.0 / (double)fan_in));
}

// Attention gate at init: sigmoid(-1) ~ 0.27. The gate must start partially
// open or the motion branch never receives gradient -- Adam's per-parameter
// step is bounded by ~lr, so a strongly negative bias cannot recover within a
// desk-scale step budget and training collapses to the identity map.
constexpr float kAlphaBiasInit = -1.0f;
// Dynamic-conv bias slots start at zero: the kernel weights initialize to a
// near-identity map (see KernelHead::init), so no bias shift is needed to keep
// the middle stack alive.
constexpr float kDynBiasInit = 0.0f;

}  // namespace

int GeneratorSpec::down_out_channels(int i) const {
    int c = base_channels << i;
    return std::min(c, 4 * base_channels);
}

int GeneratorSpec::up_out_channels(int i) const {
    // mirror the down path; the last up layer lands on base_channels
    return i == up_layers - 1 ? base_channels : down_out_channels(down_layers - 2 - i);
}

std::vector<DckLayerSpec> GeneratorSpec::middle_specs() const {
    std::vector<DckLayerSpec> specs;
    for (int i = 0; i < middle_layers; ++i)
        specs.push_back(DckLayerSpec{mid_channels(), mid_channels(), 1, i});
    return specs;
}

void GeneratorSpec::validate() const {
    if (down_layers != up_layers)
        throw std::invalid_argument("GeneratorSpec: down_layers != up_layers");
    if (down_layers < 3) throw std::invalid_argument("GeneratorSpec: need at least 3 down layers");
    if (middle_layers < 1) throw std::invalid_argument("GeneratorSpec: need middle layers");
    int div = 1 << down_layers;
    if (resolution % div != 0 || resolution / div < 1)
        throw std::invalid_argument("GeneratorSpec: resolution " + std::to_string(resolution) +
                                    " not divisible by 2^" + std::to_string(down_layers));
    if (base_channels < 1 || feature_dim < 1)
        throw std::invalid_argument("GeneratorSpec: bad channel config");
}

Tensor blend(const Tensor& frames, const Tensor& alpha, const Tensor& motion) {
    if (frames.rank() != 4 || alpha.rank() != 4 || !frames.same_shape(motion) ||
        alpha.dim(0) != frames.dim(0) || alpha.dim(1) != 1 || alpha.dim(2) != frames.dim(2) ||
        alpha.dim(3) != frames.dim(3))
        throw std::invalid_argument("blend: want frames/motion (T,C,H,W) and alpha (T,1,H,W), got " +
                                    shape_str(frames.shape()) + " / " + shape_str(alpha.shape()));
    int64_t T = frames.dim(0), C = frames.dim(1), M = frames.dim(2) * frames.dim(3);
    Tensor out(frames.shape());
    for (int64_t t = 0; t < T; ++t)
        for (int64_t c = 0; c < C; ++c) {
            const float* f = frames.data() + (t * C + c) * M;
            const float* m = motion.data() + (t * C + c) * M;
            const float* a = alpha.data() + t * M;
            float* o = out.data() + (t * C + c) * M;
            for (int64_t i = 0; i < M; ++i) o[i] = f[i] * (1.0f - a[i]) + m[i] * a[i];
        }
    return out;
}

Var blend(const Var& frames, const Var& alpha, const Var& motion) {
    Var keep = ad::bmul(frames, ad::affine(alpha, -1.0f, 1.0f));
    Var moved = ad::bmul(motion, alpha);
    return ad::add(keep, moved);
}

Tensor cover_background(const Tensor& generated, const Tensor& original, const Box& face_box) {
    if (!generated.same_shape(original) || generated.rank() != 4)
        throw std::invalid_argument("cover_background: want matching (N,C,H,W) tensors, got " +
                                    shape_str(generated.shape()) + " vs " +
                                    shape_str(original.shape()));
    int64_t H = generated.dim(2), W = generated.dim(3);
    if (face_box.x0 < 0 || face_box.y0 < 0 || face_box.x1 > W || face_box.y1 > H ||
        face_box.x0 >= face_box.x1 || face_box.y0 >= face_box.y1)
        throw std::invalid_argument("cover_background: box out of bounds");
    Tensor out = original;
    int64_t N = generated.dim(0), C = generated.dim(1);
    for (int64_t n = 0; n < N; ++n)
        for (int64_t c = 0; c < C; ++c)
            for (int64_t y = face_box.y0; y < face_box.y1; ++y) {
                const float* g = generated.data() + ((n * C + c) * H + y) * W;
                float* o = out.data() + ((n * C + c) * H + y) * W;
                for (int64_t x = face_box.x0; x < face_box.x1; ++x) o[x] = g[x];
            }
    return out;
}

Generator::Generator(GeneratorSpec spec, uint64_t seed) : spec_(spec) {
    spec_.validate();
    Rng rng(mix_seed(seed, 0x67656e));  // "gen"
    const int cm = spec_.mid_channels();

    enc_.init(ps_, rng, "enc", spec_.feature_dim);

    // down path: conv k4 s2 p1, instance norm (except first), leaky 0.2
    // (concat mode adds 16 audio-map channels to the input)
    int in_c = spec_.conditioning == Conditioning::ConcatAttention ? 3 + 16 : 3;
    for (int i = 0; i < spec_.down_layers; ++i) {
        int out_c = spec_.down_out_channels(i);
        ConvLayer l;
        std::string base = "down" + std::to_string(i);
        l.w = ps_.make(base + ".w", he_init(rng, {out_c, in_c, 4, 4}, (int64_t)in_c * 16));
        l.b = ps_.make(base + ".b", Tensor({out_c}));
        l.norm = i > 0;
        if (l.norm) {
            l.gain = ps_.make(base + ".gain", Tensor::full({out_c}, 1.0f));
            l.offset = ps_.make(base + ".offset", Tensor({out_c}));
        }
        down_.push_back(l);
        in_c = out_c;
    }

    if (spec_.conditioning == Conditioning::DynamicKernels) {
        head_.init(ps_, rng, "head", spec_.feature_dim, spec_.middle_specs(), kDynBiasInit);
    } else {
        // audio feature projected to a 16-channel map at R/16, upsampled to R
        // and concatenated with the input frame
        int mh = spec_.resolution / 16;
        audio_w_ = ps_.make("audio_map.w",
                            he_init(rng, {(int64_t)16 * mh * mh, spec_.feature_dim},
                                    spec_.feature_dim));
        audio_b_ = ps_.make("audio_map.b", Tensor({(int64_t)16 * mh * mh}));
        for (int i = 0; i < spec_.middle_layers; ++i) {
            std::string base = "mid" + std::to_string(i);
            mid_w_.push_back(ps_.make(base + ".w", he_init(rng, {cm, cm, 1, 1}, cm)));
            mid_b_.push_back(ps_.make(base + ".b", Tensor({cm})));
        }
    }

    // up path: tconv k4 s2 p1 + instance norm + leaky; before each up layer
    // except the first, the mirror down output is concatenated as a skip
    for (int i = 0; i < spec_.up_layers; ++i) {
        int in_ch = i == 0 ? cm
                           : spec_.up_out_channels(i - 1) +
                                 spec_.down_out_channels(spec_.down_layers - 1 - i);
        int out_ch = spec_.up_out_channels(i);
        ConvLayer l;
        std::string base = "up" + std::to_string(i);
        l.w = ps_.make(base + ".w", he_init(rng, {in_ch, out_ch, 4, 4}, (int64_t)in_ch * 16));
        l.b = ps_.make(base + ".b", Tensor({out_ch}));
        l.gain = ps_.make(base + ".gain", Tensor::full({out_ch}, 1.0f));
        l.offset = ps_.make(base + ".offset", Tensor({out_ch}));
        up_.push_back(l);
    }

    int hc = spec_.up_out_channels(spec_.up_layers - 1);
    alpha_w_ = ps_.make("alpha.w", he_init(rng, {1, hc, 3, 3}, (int64_t)hc * 9));
    alpha_b_ = ps_.make("alpha.b", Tensor::full({1}, kAlphaBiasInit));
    motion_w_ = ps_.make("motion.w", he_init(rng, {3, hc, 3, 3}, (int64_t)hc * 9));
    motion_b_ = ps_.make("motion.b", Tensor({3}));
}

GeneratorOut Generator::forward(const Var& frames, const Var& windows) const {
    const Tensor& fv = frames->value;
    if (fv.rank() != 4 || fv.dim(1) != 3 || fv.dim(2) != spec_.resolution ||
        fv.dim(3) != spec_.resolution)
        throw std::invalid_argument("Generator: want frames (T,3," +
                                    std::to_string(spec_.resolution) + "," +
                                    std::to_string(spec_.resolution) + "), got " +
                                    shape_str(fv.shape()));
    if (windows->value.dim(0) != fv.dim(0))
        throw std::invalid_argument("Generator: frames/windows count mismatch " +
                                    std::to_string(fv.dim(0)) + " vs " +
                                    std::to_string(windows->value.dim(0)));
    int64_t T = fv.dim(0);

    Var feat = enc_.forward(windows);  // (T, feature_dim)

    ops::Conv2dSpec down_spec;
    down_spec.stride = 2;
    down_spec.padding = 1;
    down_spec.pad = spec_.pad;

    std::vector<Var> skips;
    Var h = frames;
    if (spec_.conditioning == Conditioning::ConcatAttention) {
        int mh = spec_.resolution / 16;
        Var amap = ad::reshape(ad::linear(feat, audio_w_, audio_b_), {T, 16, mh, mh});
        h = ad::concat_channels(frames, ad::upsample_nearest(amap, 16));
    }
    for (int i = 0; i < spec_.down_layers; ++i) {
        h = ad::conv2d(h, down_[i].w, down_[i].b, down_spec);
        if (down_[i].norm) h = ad::instance_norm(h, down_[i].gain, down_[i].offset);
        h = ad::activation(h, ops::ActKind::LeakyRelu, 0.2f);
        skips.push_back(h);
    }

    GeneratorOut out;
    if (spec_.conditioning == Conditioning::DynamicKernels) {
        out.kernel_flat = head_.forward(feat);
        for (size_t i = 0; i < out.kernel_flat.size(); ++i) {
            h = dynamic_conv(h, out.kernel_flat[i], head_.specs[i], spec_.pad);
            h = ad::activation(h, ops::ActKind::LeakyRelu, 0.2f);
        }
    } else {
        ops::Conv2dSpec one;
        for (size_t i = 0; i < mid_w_.size(); ++i) {
            h = ad::conv2d(h, mid_w_[i], mid_b_[i], one);
            h = ad::activation(h, ops::ActKind::LeakyRelu, 0.2f);
        }
    }

    for (int i = 0; i < spec_.up_layers; ++i) {
        if (i > 0) h = ad::concat_channels(h, skips[spec_.down_layers - 1 - i]);
        h = ad::tconv2d(h, up_[i].w, up_[i].b, 2, 1, spec_.pad);
        h = ad::instance_norm(h, up_[i].gain, up_[i].offset);
        h = ad::activation(h, ops::ActKind::LeakyRelu, 0.2f);
    }

    ops::Conv2dSpec head_spec;
    head_spec.padding = 1;
    head_spec.pad = spec_.pad;
    out.alpha = ad::activation(ad::conv2d(h, alpha_w_, alpha_b_, head_spec),
                               ops::ActKind::Sigmoid);
    out.motion = ad::activation(ad::conv2d(h, motion_w_, motion_b_, head_spec),
                                ops::ActKind::Tanh);
    out.blended = blend(frames, out.alpha, out.motion);
    return out;
}

Tensor Generator::generate(const Tensor& frames, const Tensor& windows) const {
    GeneratorOut out = forward(constant(frames), constant(windows));
    return out.blended->value;
}

KernelBank Generator::infer_bank(const Tensor& windows) const {
    if (spec_.conditioning != Conditioning::DynamicKernels)
        throw std::logic_error("infer_bank: generator is not in dynamic-kernel mode");
    return infer_kernels(enc_, head_, windows);
}

Discriminator::Discriminator(int resolution, int base_channels, uint64_t seed)
    : resolution_(resolution) {
    if (resolution % 16 != 0)
        throw std::invalid_argument("Discriminator: resolution must be divisible by 16");
    Rng rng(mix_seed(seed, 0x64697363));  // "disc"
    int in_c = 3;
    const int caps[4] = {2, 4, 8, 8};
    for (int i = 0; i < 4; ++i) {
        int out_c = base_channels * caps[i];
        ConvLayer l;
        std::string base = "d" + std::to_string(i);
        l.w = ps_.make(base + ".w", he_init(rng, {out_c, in_c, 4, 4}, (int64_t)in_c * 16));
        l.b = ps_.make(base + ".b", Tensor({out_c}));
        l.norm = i > 0;
        if (l.norm) {
            l.gain = ps_.make(base + ".gain", Tensor::full({out_c}, 1.0f));
            l.offset = ps_.make(base + ".offset", Tensor({out_c}));
        }
        layers_.push_back(l);
        in_c = out_c;
    }
    head_w_ = ps_.make("dhead.w", he_init(rng, {1, in_c, 1, 1}, in_c));
    head_b_ = ps_.make("dhead.b", Tensor({1}));
}

Var Discriminator::forward(const Var& frames) const {
    const Tensor& fv = frames->value;
    if (fv.rank() != 4 || fv.dim(1) != 3 || fv.dim(2) != resolution_ || fv.dim(3) != resolution_)
        throw std::invalid_argument("Discriminator: want (N,3," + std::to_string(resolution_) +
                                    "," + std::to_string(resolution_) + "), got " +
                                    shape_str(fv.shape()));
    ops::Conv2dSpec s2;
    s2.stride = 2;
    s2.padding = 1;
    Var h = frames;
    for (const auto& l : layers_) {
        h = ad::conv2d(h, l.w, l.b, s2);
        if (l.norm) h = ad::instance_norm(h, l.gain, l.offset);
        h = ad::activation(h, ops::ActKind::LeakyRelu, 0.2f);
    }
    ops::Conv2dSpec one;
    return ad::conv2d(h, head_w_, head_b_, one);
}

}  // namespace dckgen
