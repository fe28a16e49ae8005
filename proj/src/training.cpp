#include "dckgen/training.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dckgen {

Var lsgan_d_loss(const Var& real_scores, const Var& fake_scores) {
    Var real_term = ad::mean(ad::square(ad::affine(real_scores, 1.0f, -1.0f)));
    Var fake_term = ad::mean(ad::square(fake_scores));
    return ad::add(real_term, fake_term);
}

Var lsgan_g_loss(const Var& fake_scores) {
    return ad::mean(ad::square(ad::affine(fake_scores, 1.0f, -1.0f)));
}

Var l1_loss(const Var& a, const Var& b) { return ad::mean(ad::abs(ad::sub(a, b))); }

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const std::vector<Var>& params) {
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.emplace_back(p->value.shape());
            v_.emplace_back(p->value.shape());
        }
    }
    if (m_.size() != params.size())
        throw std::invalid_argument("Adam: parameter list changed size");
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, (double)t_);
    double bc2 = 1.0 - std::pow(beta2_, (double)t_);
    for (size_t i = 0; i < params.size(); ++i) {
        Var p = params[i];
        if (!p->has_grad()) continue;
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (int64_t j = 0; j < p->value.numel(); ++j) {
            double g = p->grad[j];
            double mj = beta1_ * m[j] + (1.0 - beta1_) * g;
            double vj = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            m[j] = (float)mj;
            v[j] = (float)vj;
            p->value[j] -= (float)(lr_ * (mj / bc1) / (std::sqrt(vj / bc2) + eps_));
        }
    }
}

GeneratorSpec generator_spec_from_config(const TrainConfig& cfg) {
    GeneratorSpec spec;
    spec.resolution = cfg.resolution;
    spec.base_channels = cfg.base_channels;
    spec.feature_dim = cfg.feature_dim;
    spec.conditioning =
        cfg.model == "dck" ? Conditioning::DynamicKernels : Conditioning::ConcatAttention;
    return spec;
}

namespace {

void set_requires_grad(ParamStore& ps, bool value) {
    for (const auto& p : ps.items()) p->requires_grad = value;
}

// Gather selected frames/windows of one clip into batch tensors.
void gather_batch(const SyntheticClip& clip, const std::vector<int>& idx, Tensor& frames,
                  Tensor& windows) {
    int64_t R = clip.frames.dim(2);
    int B = (int)idx.size();
    frames = Tensor({B, 3, R, R});
    windows = Tensor({B, 1, 16, 16});
    int64_t fsz = 3 * R * R;
    for (int b = 0; b < B; ++b) {
        std::copy(clip.frames.data() + idx[b] * fsz, clip.frames.data() + (idx[b] + 1) * fsz,
                  frames.data() + b * fsz);
        Tensor w = signal_window(clip.signal, idx[b]);
        std::copy(w.data(), w.data() + 256, windows.data() + (int64_t)b * 256);
    }
}

}  // namespace

PairSplit split_pairs(const TrainConfig& cfg, const Dataset& ds) {
    PairSplit out;
    for (const auto& pr : ds.pairs) {
        // the j-th clip of an identity follows the base clip in manifest order
        int j = pr.second - pr.first;
        if (cfg.train_signals == 0 || j <= cfg.train_signals)
            out.train.push_back(pr);
        else
            out.holdout.push_back(pr);
    }
    return out;
}

Trainer::Trainer(const TrainConfig& cfg, const Dataset& ds)
    : cfg_(cfg),
      ds_(ds),
      gen_(generator_spec_from_config(cfg), cfg.seed),
      disc_(cfg.resolution, cfg.base_channels, cfg.seed),
      g_opt_(cfg.lr, cfg.beta1, cfg.beta2),
      d_opt_(cfg.lr, cfg.beta1, cfg.beta2),
      rng_(mix_seed(cfg.seed, 0x747261696e)) {
    if (ds_.resolution != cfg_.resolution)
        throw std::invalid_argument("Trainer: dataset resolution " +
                                    std::to_string(ds_.resolution) + " != config resolution " +
                                    std::to_string(cfg_.resolution));
    if (ds_.pairs.empty()) throw std::invalid_argument("Trainer: dataset has no pairs");
    PairSplit split = split_pairs(cfg_, ds_);
    train_pairs_ = std::move(split.train);
    holdout_pairs_ = std::move(split.holdout);
    if (train_pairs_.empty()) throw std::invalid_argument("Trainer: no training pairs after split");
}

StepStats Trainer::step() {
    const auto& pr = train_pairs_[rng_.uniform_int(0, (int64_t)train_pairs_.size() - 1)];
    const SyntheticClip& c1 = ds_.clips[pr.first];
    const SyntheticClip& c2 = ds_.clips[pr.second];
    int T = (int)c1.pose.size();
    std::vector<int> idx(cfg_.batch);
    for (int b = 0; b < cfg_.batch; ++b) idx[b] = (int)rng_.uniform_int(0, T - 1);

    Tensor v1, w1, v2, w2;
    gather_batch(c1, idx, v1, w1);
    gather_batch(c2, idx, v2, w2);
    Var v1c = constant(v1), v2c = constant(v2), w1c = constant(w1), w2c = constant(w2);

    StepStats out;
    out.step = steps_done_ + 1;

    // --- discriminator step (generator outputs detached) ---
    Tensor fake12 = gen_.generate(v1, w2);
    Tensor fake21 = gen_.generate(v2, w1);
    Var d_loss = ad::add(lsgan_d_loss(disc_.forward(v2c), disc_.forward(constant(fake12))),
                         lsgan_d_loss(disc_.forward(v1c), disc_.forward(constant(fake21))));
    out.d_loss = scalar_value(d_loss);
    disc_.params().zero_grads();
    backward(d_loss);
    d_opt_.step(disc_.params().items());

    // --- generator step (discriminator weights frozen) ---
    set_requires_grad(disc_.params(), false);
    GeneratorOut o12 = gen_.forward(v1c, w2c);
    GeneratorOut o21 = gen_.forward(v2c, w1c);
    Var adv = ad::add(lsgan_g_loss(disc_.forward(o12.blended)),
                      lsgan_g_loss(disc_.forward(o21.blended)));
    Var rec = ad::add(l1_loss(o12.blended, v2c), l1_loss(o21.blended, v1c));
    Var total = ad::add(adv, ad::affine(rec, (float)cfg_.lambda_rec, 0.0f));
    out.g_adv = scalar_value(adv);
    out.g_rec = scalar_value(rec);
    out.g_total = scalar_value(total);
    gen_.params().zero_grads();
    backward(total);
    g_opt_.step(gen_.params().items());
    set_requires_grad(disc_.params(), true);

    if (!std::isfinite(out.d_loss) || !std::isfinite(out.g_total))
        throw std::runtime_error("train step " + std::to_string(out.step) +
                                 ": non-finite loss (d=" + std::to_string(out.d_loss) +
                                 ", g=" + std::to_string(out.g_total) + ")");
    ++steps_done_;
    return out;
}

void Trainer::train(std::ostream* log) {
    if (log) *log << "step,d_loss,g_adv,g_rec\n";
    for (int s = 0; s < cfg_.steps; ++s) {
        StepStats st = step();
        if (log) {
            char row[128];
            std::snprintf(row, sizeof(row), "%d,%.6f,%.6f,%.6f\n", st.step, st.d_loss, st.g_adv,
                          st.g_rec);
            *log << row;
        }
    }
}

double cycle_loss(const Generator& f_xy, const Generator& f_yx, const Tensor& frames,
                  const Tensor& windows_xy, const Tensor& windows_yx) {
    return mean_abs_diff(f_yx.generate(f_xy.generate(frames, windows_xy), windows_yx), frames);
}

double Trainer::eval_rec(const std::vector<std::pair<int, int>>& pairs) const {
    if (pairs.empty()) throw std::invalid_argument("eval_rec: no pairs");
    double acc = 0.0;
    for (const auto& pr : pairs) {
        const SyntheticClip& c1 = ds_.clips[pr.first];
        const SyntheticClip& c2 = ds_.clips[pr.second];
        Tensor w1 = signal_windows(c1.signal);
        Tensor w2 = signal_windows(c2.signal);
        Tensor f12 = gen_.generate(c1.frames, w2);
        Tensor f21 = gen_.generate(c2.frames, w1);
        acc += mean_abs_diff(f12, c2.frames) + mean_abs_diff(f21, c1.frames);
    }
    return acc / (double)pairs.size();
}

double Trainer::dataset_pair_l1(const std::vector<std::pair<int, int>>& pairs) const {
    if (pairs.empty()) throw std::invalid_argument("dataset_pair_l1: no pairs");
    double acc = 0.0;
    for (const auto& pr : pairs)
        acc += 2.0 * mean_abs_diff(ds_.clips[pr.first].frames, ds_.clips[pr.second].frames);
    return acc / (double)pairs.size();
}

}  // namespace dckgen
