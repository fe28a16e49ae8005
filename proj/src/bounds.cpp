#include "dckgen/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace dckgen::bounds {

namespace {

const ops::Conv2dSpec kPlainConv{};  // stride 1, pad 0, groups 1

// Per-sample entrywise l1 norms of a batched (N,...) tensor.
std::vector<double> per_sample_l1(const Tensor& x) {
    int64_t n = x.dim(0), stride = x.numel() / x.dim(0);
    std::vector<double> out(n, 0.0);
    for (int64_t s = 0; s < n; ++s)
        for (int64_t i = 0; i < stride; ++i) out[s] += std::fabs(x[s * stride + i]);
    return out;
}

std::vector<double> per_sample_sq_l2(const Tensor& x) {
    int64_t n = x.dim(0), stride = x.numel() / x.dim(0);
    std::vector<double> out(n, 0.0);
    for (int64_t s = 0; s < n; ++s)
        for (int64_t i = 0; i < stride; ++i) {
            double v = x[s * stride + i];
            out[s] += v * v;
        }
    return out;
}

double vec_mean(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc / (double)v.size();
}

}  // namespace

Tensor TrialNet::forward(const Tensor& x) const {
    Tensor y = x;
    for (const auto& l : layers) {
        y = ops::conv2d(y, l.kernel, nullptr, kPlainConv);
        y = ops::activation(y, l.act, l.slope);
    }
    return y;
}

void NetPair::validate() const {
    if (a.layers.size() != b.layers.size())
        throw std::invalid_argument("NetPair: layer counts differ");
    if (a.layers.empty()) throw std::invalid_argument("NetPair: empty nets");
    for (size_t i = 0; i < a.layers.size(); ++i) {
        if (!a.layers[i].kernel.same_shape(b.layers[i].kernel))
            throw std::invalid_argument("NetPair: kernel shape mismatch at layer " +
                                        std::to_string(i));
        if (a.layers[i].act != b.layers[i].act || a.layers[i].slope != b.layers[i].slope)
            throw std::invalid_argument("NetPair: activation mismatch at layer " +
                                        std::to_string(i));
    }
}

double peak_kernel_norm(const std::vector<Tensor>& kernels, int p) {
    if (kernels.empty()) throw std::invalid_argument("peak_kernel_norm: empty kernel list");
    double best = 0;
    for (const auto& k : kernels) best = std::max(best, lp_norm(k, p));
    return best;
}

double output_diff_lhs(const NetPair& pair, const Tensor& x, int p) {
    return lp_norm(sub(pair.a.forward(x), pair.b.forward(x)), p);
}

double output_diff_rhs_paper(const NetPair& pair, const Tensor& x, int p) {
    std::vector<Tensor> kernels;
    for (const auto& l : pair.a.layers) kernels.push_back(l.kernel);
    for (const auto& l : pair.b.layers) kernels.push_back(l.kernel);
    double mp = peak_kernel_norm(kernels, p);
    double sum_dk = 0;
    for (size_t i = 0; i < pair.a.layers.size(); ++i)
        sum_dk += lp_norm(sub(pair.a.layers[i].kernel, pair.b.layers[i].kernel), p);
    int n = pair.layer_count();
    return std::pow(mp, n - 1) * lp_norm(x, p) * sum_dk;
}

double output_diff_rhs_young(const NetPair& pair, const Tensor& x, int p) {
    if (x.rank() != 4) throw std::invalid_argument("output_diff_rhs_young: x must be (N,C,H,W)");
    double d = 0.0;
    double b = lp_norm(x, p);
    int64_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    for (size_t i = 0; i < pair.a.layers.size(); ++i) {
        const TrialLayer& la = pair.a.layers[i];
        const TrialLayer& lb = pair.b.layers[i];
        double ka = lp_norm(la.kernel, 1);
        double kb = lp_norm(lb.kernel, 1);
        double dk = lp_norm(sub(la.kernel, lb.kernel), 1);
        double lip = ops::act_lipschitz(la.act, la.slope);
        h -= la.kernel.dim(2) - 1;
        w -= la.kernel.dim(3) - 1;
        if (h <= 0 || w <= 0)
            throw std::invalid_argument("output_diff_rhs_young: spatial size exhausted at layer " +
                                        std::to_string(i));
        d = lip * (ka * d + dk * b);
        // g(0) = 0 lets the norm bound contract through the activation;
        // sigmoid instead costs an additive 0.5 per output entry.
        if (la.act == ops::ActKind::Sigmoid) {
            double numel = (double)(n * la.kernel.dim(0) * h * w);
            b = 0.25 * kb * b + 0.5 * std::pow(numel, 1.0 / p);
        } else {
            b = lip * kb * b;
        }
    }
    return d;
}

double young_path_coefficient(const NetPair& pair, int lo, int hi) {
    int n = pair.layer_count();
    if (lo < 0 || hi > n || lo >= hi)
        throw std::invalid_argument("young_path_coefficient: bad layer range");
    for (const auto& l : pair.a.layers)
        if (l.act == ops::ActKind::Sigmoid)
            throw std::invalid_argument(
                "young_path_coefficient: requires activations fixing 0 (no sigmoid)");
    // prefix[i] = prod_{j<i} L_j*||k_j^b||_1, suffix[i] = prod_{j>i} L_j*||k_j^a||_1
    std::vector<double> lip(n), na(n), nb(n);
    for (int i = 0; i < n; ++i) {
        lip[i] = ops::act_lipschitz(pair.a.layers[i].act, pair.a.layers[i].slope);
        na[i] = lp_norm(pair.a.layers[i].kernel, 1);
        nb[i] = lp_norm(pair.b.layers[i].kernel, 1);
    }
    double best = 0;
    for (int i = lo; i < hi; ++i) {
        double coef = lip[i];
        for (int j = 0; j < i; ++j) coef *= lip[j] * nb[j];
        for (int j = i + 1; j < n; ++j) coef *= lip[j] * na[j];
        best = std::max(best, coef);
    }
    return best;
}

BoundTrial make_trial(int trial, int n, int p, double lhs, double rhs_paper, double rhs_young) {
    BoundTrial t;
    t.trial = trial;
    t.n = n;
    t.p = p;
    t.lhs = lhs;
    t.rhs_paper = rhs_paper;
    t.rhs_young = rhs_young;
    t.margin = rhs_young - lhs;
    t.violation_paper = lhs > rhs_paper * (1.0 + kViolationTol);
    t.violation_young = lhs > rhs_young * (1.0 + kViolationTol);
    return t;
}

int BoundReport::violations_paper() const {
    int c = 0;
    for (const auto& t : trials) c += t.violation_paper ? 1 : 0;
    return c;
}

int BoundReport::violations_young() const {
    int c = 0;
    for (const auto& t : trials) c += t.violation_young ? 1 : 0;
    return c;
}

namespace {
double max_ratio(const std::vector<BoundTrial>& trials, bool young) {
    double best = 0;
    for (const auto& t : trials) {
        double rhs = young ? t.rhs_young : t.rhs_paper;
        if (rhs > 0) best = std::max(best, t.lhs / rhs);
    }
    return best;
}
}  // namespace

double BoundReport::max_ratio_paper() const { return max_ratio(trials, false); }
double BoundReport::max_ratio_young() const { return max_ratio(trials, true); }

void BoundReport::write_csv(std::ostream& out) const {
    out << "trial,n,p,LHS,RHS_paper,RHS_young,violation_paper,violation_young\n";
    char row[256];
    for (const auto& t : trials) {
        std::snprintf(row, sizeof(row), "%d,%d,%d,%.9g,%.9g,%.9g,%d,%d\n", t.trial, t.n, t.p,
                      t.lhs, t.rhs_paper, t.rhs_young, t.violation_paper ? 1 : 0,
                      t.violation_young ? 1 : 0);
        out << row;
    }
}

std::string BoundReport::summary() const {
    char buf[512];
    std::string s = "suite: " + name + "\n";
    std::snprintf(buf, sizeof(buf), "trials: %zu\n", trials.size());
    s += buf;
    std::snprintf(buf, sizeof(buf), "violations_paper: %d\nviolations_young: %d\n",
                  violations_paper(), violations_young());
    s += buf;
    std::snprintf(buf, sizeof(buf), "max LHS/RHS_paper: %.6g\nmax LHS/RHS_young: %.6g\n",
                  max_ratio_paper(), max_ratio_young());
    s += buf;
    if (calibration_trials > 0) {
        std::snprintf(buf, sizeof(buf),
                      "A1: %.9g\nA2: %.9g\ncalibration_trials: %d (1.5x safety factor)\n", a1, a2,
                      calibration_trials);
        s += buf;
    }
    if (peak_norm_max > 0) {
        std::snprintf(buf, sizeof(buf),
                      "peak kernel norm, measured max: %.6g (reference constant %.4f)\n",
                      peak_norm_max, kReferencePeakNorm);
        s += buf;
    }
    return s;
}

BoundReport check_nonexpansive(ops::ActKind kind, int trials, int p, uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("check_nonexpansive: trials must be positive");
    if (p < 1) throw std::invalid_argument("check_nonexpansive: p must be >= 1");
    BoundReport rep;
    rep.name = std::string("activation non-expansiveness (") + ops::act_name(kind) +
               ", p=" + std::to_string(p) + ")";
    Rng rng(mix_seed(seed, 0xac7 + (uint64_t)kind * 16 + (uint64_t)p));
    for (int t = 0; t < trials; ++t) {
        int64_t numel = rng.uniform_int(1, 512);
        double span = std::pow(10.0, rng.uniform(-2.0, 2.0));
        Tensor x1 = rng.normal_tensor({numel}, 0.0, span);
        Tensor x2;
        if (t % 16 == 0) {
            x2 = x1;  // equal inputs: both sides must be exactly zero
        } else if (t % 2 == 0) {
            Tensor d = rng.normal_tensor({numel}, 0.0, span * 1e-3);
            x2 = add(x1, d);
        } else {
            x2 = rng.normal_tensor({numel}, 0.0, span);
        }
        float slope = kind == ops::ActKind::LeakyRelu ? (float)rng.uniform(0.0, 1.0) : 0.0f;
        double lhs =
            lp_norm(sub(ops::activation(x1, kind, slope), ops::activation(x2, kind, slope)), p);
        double rhs = lp_norm(sub(x1, x2), p);
        rep.trials.push_back(make_trial(t, 1, p, lhs, rhs, rhs));
    }
    return rep;
}

namespace {

struct NetGenOptions {
    int n = 1;                       // layer count
    int c_min = 1, c_max = 3;        // channel range
    int ks_max = 3;                  // kernel sizes drawn from [1, ks_max]
    bool allow_sigmoid = true;
    bool shape_preserving = false;   // force 1x1 kernels
    double norm_lo = 0.2, norm_hi = 1.0;
    int in_channels = 0, out_channels = 0;  // 0 = draw at random
};

TrialNet random_net(Rng& rng, const NetGenOptions& opt) {
    TrialNet net;
    std::vector<int> ch(opt.n + 1);
    for (int i = 0; i <= opt.n; ++i) ch[i] = (int)rng.uniform_int(opt.c_min, opt.c_max);
    if (opt.in_channels > 0) ch[0] = opt.in_channels;
    if (opt.out_channels > 0) ch[opt.n] = opt.out_channels;
    for (int i = 0; i < opt.n; ++i) {
        TrialLayer l;
        int ks = opt.shape_preserving ? 1 : (int)rng.uniform_int(1, opt.ks_max);
        l.kernel = rng.normal_tensor({ch[i + 1], ch[i], ks, ks}, 0.0, 1.0);
        double nrm = lp_norm(l.kernel, 2);
        double target = rng.uniform(opt.norm_lo, opt.norm_hi);
        if (nrm > 0) l.kernel = scale(l.kernel, (float)(target / nrm));
        int kinds = opt.allow_sigmoid ? 3 : 2;
        switch (rng.uniform_int(0, kinds - 1)) {
            case 0:
                l.act = ops::ActKind::LeakyRelu;
                l.slope = (float)rng.uniform(0.0, 0.95);
                break;
            case 1: l.act = ops::ActKind::Tanh; break;
            default: l.act = ops::ActKind::Sigmoid; break;
        }
        net.layers.push_back(std::move(l));
    }
    return net;
}

// Shift every kernel by a random direction of relative magnitude
// 10^uniform(log10 lo, log10 hi).
TrialNet perturbed_net(const TrialNet& net, Rng& rng, double rel_lo, double rel_hi) {
    TrialNet out = net;
    for (auto& l : out.layers) {
        double base = lp_norm(l.kernel, 2);
        double mag =
            base * std::pow(10.0, rng.uniform(std::log10(rel_lo), std::log10(rel_hi)));
        Tensor d = rng.normal_tensor(l.kernel.shape(), 0.0, 1.0);
        double dn = lp_norm(d, 2);
        if (dn > 0) l.kernel = add(l.kernel, scale(d, (float)(mag / dn)));
    }
    return out;
}

int net_shrink(const TrialNet& net) {
    int s = 0;
    for (const auto& l : net.layers) s += (int)l.kernel.dim(2) - 1;
    return s;
}

NetPair concat_pairs(const NetPair& front, const NetPair& back) {
    NetPair out = front;
    out.a.layers.insert(out.a.layers.end(), back.a.layers.begin(), back.a.layers.end());
    out.b.layers.insert(out.b.layers.end(), back.b.layers.begin(), back.b.layers.end());
    return out;
}

NetPair with_shared_tail(const NetPair& pair, const TrialNet& shared) {
    NetPair out = pair;
    out.a.layers.insert(out.a.layers.end(), shared.layers.begin(), shared.layers.end());
    out.b.layers.insert(out.b.layers.end(), shared.layers.begin(), shared.layers.end());
    return out;
}

double sum_kernel_diff(const NetPair& pair, int p) {
    double s = 0;
    for (size_t i = 0; i < pair.a.layers.size(); ++i)
        s += lp_norm(sub(pair.a.layers[i].kernel, pair.b.layers[i].kernel), p);
    return s;
}

}  // namespace

BoundReport verify_output_bound(int trials, int n_min, int n_max, const std::vector<int>& p_set,
                                uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("verify_output_bound: trials must be positive");
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("verify_output_bound: bad layer range");
    if (p_set.empty()) throw std::invalid_argument("verify_output_bound: empty p set");
    for (int p : p_set)
        if (p < 1) throw std::invalid_argument("verify_output_bound: p must be >= 1");
    BoundReport rep;
    rep.name = "output difference bound";
    Rng rng(mix_seed(seed, 0x0b0d));
    for (int t = 0; t < trials; ++t) {
        NetGenOptions opt;
        opt.n = n_min + t % (n_max - n_min + 1);
        TrialNet a = random_net(rng, opt);
        NetPair pair{a, perturbed_net(a, rng, 1e-3, 0.5)};
        int shrink = net_shrink(a);
        int64_t hw = rng.uniform_int(shrink + 1, 16);
        Tensor x = rng.normal_tensor({1, a.layers[0].kernel.dim(1), hw, hw}, 0.0, 1.0);
        std::vector<Tensor> kernels;
        for (const auto& l : pair.a.layers) kernels.push_back(l.kernel);
        for (const auto& l : pair.b.layers) kernels.push_back(l.kernel);
        for (int p : p_set) {
            rep.trials.push_back(make_trial(t, opt.n, p, output_diff_lhs(pair, x, p),
                                            output_diff_rhs_paper(pair, x, p),
                                            output_diff_rhs_young(pair, x, p)));
            rep.peak_norm_max = std::max(rep.peak_norm_max, peak_kernel_norm(kernels, p));
        }
    }
    return rep;
}

std::pair<double, double> calibrate_quadratic_bound(
    const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> pts;  // (d, r) with d > 0
    for (const auto& [d, r] : points) {
        if (d < 0 || r < 0) throw std::invalid_argument("calibrate_quadratic_bound: negative");
        if (d == 0) {
            if (r > 0)
                throw std::invalid_argument("calibrate_quadratic_bound: r > 0 at d = 0");
            continue;
        }
        pts.push_back({d, r});
    }
    if (pts.empty()) return {0.0, 0.0};
    auto feasible = [&](double a1, double a2) {
        for (const auto& [d, r] : pts)
            if (a1 * d * d + a2 * d < r * (1.0 - 1e-12) - 1e-300) return false;
        return true;
    };
    // Candidate vertices: axis intercepts plus pairwise constraint intersections.
    double a2_only = 0, a1_only = 0;
    for (const auto& [d, r] : pts) {
        a2_only = std::max(a2_only, r / d);
        a1_only = std::max(a1_only, r / (d * d));
    }
    double best_a1 = 0, best_a2 = a2_only, best = a2_only;
    if (a1_only < best) {
        best = a1_only;
        best_a1 = a1_only;
        best_a2 = 0;
    }
    for (size_t s = 0; s < pts.size(); ++s)
        for (size_t t = s + 1; t < pts.size(); ++t) {
            double ds = pts[s].first, dt = pts[t].first;
            if (ds == dt) continue;
            double a1 = (pts[s].second / ds - pts[t].second / dt) / (ds - dt);
            double a2 = pts[s].second / ds - a1 * ds;
            if (a1 < 0 || a2 < 0 || a1 + a2 >= best) continue;
            if (feasible(a1, a2)) {
                best = a1 + a2;
                best_a1 = a1;
                best_a2 = a2;
            }
        }
    return {best_a1, best_a2};
}

namespace {

struct AdvTrial {
    double delta = 0;  // |L_adv difference|
    double d = 0;      // sum of generator kernel l2 diffs
    double m = 0;      // E ||x||_2^2
};

AdvTrial make_adv_trial(Rng& rng, bool identical = false) {
    NetGenOptions gen_opt;
    gen_opt.n = (int)rng.uniform_int(1, 3);
    gen_opt.allow_sigmoid = false;
    gen_opt.norm_lo = 0.4;
    gen_opt.norm_hi = 1.0;
    gen_opt.in_channels = (int)rng.uniform_int(1, 2);
    TrialNet ga = random_net(rng, gen_opt);

    NetGenOptions d_opt = gen_opt;
    d_opt.n = (int)rng.uniform_int(1, 2);
    d_opt.in_channels = (int)ga.layers.back().kernel.dim(0);
    TrialNet disc = random_net(rng, d_opt);

    NetPair pair{ga, identical ? ga : perturbed_net(ga, rng, 1e-2, 0.5)};
    int shrink = net_shrink(ga) + net_shrink(disc);
    int64_t hw = rng.uniform_int(shrink + 2, shrink + 8);
    Tensor x = rng.normal_tensor({64, gen_opt.in_channels, hw, hw}, 0.0, 1.0);

    auto adv_loss = [&](const TrialNet& g) {
        Tensor scores = disc.forward(g.forward(x));
        double acc = 0;
        for (int64_t i = 0; i < scores.numel(); ++i) {
            double v = scores[i] - 1.0;
            acc += v * v;
        }
        return acc / (double)scores.numel();
    };
    AdvTrial t;
    t.delta = std::fabs(adv_loss(pair.a) - adv_loss(pair.b));
    t.d = sum_kernel_diff(pair, 2);
    t.m = vec_mean(per_sample_sq_l2(x));
    return t;
}

}  // namespace

BoundReport verify_adv_loss_bound(int trials, uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("verify_adv_loss_bound: trials must be positive");
    BoundReport rep;
    rep.name = "adversarial loss bound";
    int calib_n = 2 * trials;
    Rng calib_rng(mix_seed(seed, 0xadf1));
    std::vector<std::pair<double, double>> points;
    for (int t = 0; t < calib_n; ++t) {
        AdvTrial a = make_adv_trial(calib_rng);
        points.push_back({a.d, a.delta / a.m});
    }
    auto [a1, a2] = calibrate_quadratic_bound(points);
    rep.a1 = 1.5 * a1;
    rep.a2 = 1.5 * a2;
    rep.calibration_trials = calib_n;

    Rng rng(mix_seed(seed, 0xadf2));
    for (int t = 0; t < trials; ++t) {
        // every tenth pair is bitwise identical: exactly 0 <= 0
        AdvTrial a = make_adv_trial(rng, t % 10 == 9);
        double rhs = (rep.a1 * a.d * a.d + rep.a2 * a.d) * a.m;
        rep.trials.push_back(make_trial(t, 0, 2, a.delta, rhs, rhs));
    }
    return rep;
}

BoundReport verify_perceptual_bound(int trials, uint64_t seed) {
    if (trials <= 0)
        throw std::invalid_argument("verify_perceptual_bound: trials must be positive");
    BoundReport rep;
    rep.name = "feature-space loss bound";
    Rng rng(mix_seed(seed, 0xfea7));
    for (int t = 0; t < trials; ++t) {
        NetGenOptions gen_opt;
        gen_opt.n = (int)rng.uniform_int(1, 3);
        gen_opt.allow_sigmoid = false;
        gen_opt.norm_lo = 0.5;
        gen_opt.norm_hi = 1.0;
        gen_opt.in_channels = (int)rng.uniform_int(1, 2);
        TrialNet ga = random_net(rng, gen_opt);
        // every tenth pair is bitwise identical: exactly 0 <= 0
        NetPair gen_pair{ga, t % 10 == 9 ? ga : perturbed_net(ga, rng, 1e-2, 0.5)};

        // feature net: identity (no layers) on even trials, random conv net on odd
        TrialNet feat;
        if (t % 2 == 1) {
            NetGenOptions f_opt = gen_opt;
            f_opt.n = (int)rng.uniform_int(1, 2);
            f_opt.in_channels = (int)ga.layers.back().kernel.dim(0);
            feat = random_net(rng, f_opt);
        }
        NetPair full = with_shared_tail(gen_pair, feat);

        int shrink = net_shrink(full.a);
        int64_t hw = rng.uniform_int(shrink + 2, shrink + 8);
        Tensor x = rng.normal_tensor({64, gen_opt.in_channels, hw, hw}, 0.0, 1.0);
        Tensor ya = full.a.forward(x);
        Tensor yb = full.b.forward(x);
        Tensor target = rng.normal_tensor(ya.shape(), 0.0, 1.0);

        double la = vec_mean(per_sample_l1(sub(ya, target)));
        double lb = vec_mean(per_sample_l1(sub(yb, target)));
        double lhs = std::fabs(la - lb);
        double coef = young_path_coefficient(full, 0, gen_pair.layer_count());
        double rhs = coef * sum_kernel_diff(gen_pair, 1) * vec_mean(per_sample_l1(x));
        rep.trials.push_back(make_trial(t, full.layer_count(), 1, lhs, rhs, rhs));
    }
    return rep;
}

BoundReport verify_cycle_bound(int trials, uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("verify_cycle_bound: trials must be positive");
    BoundReport rep;
    rep.name = "cycle loss bound";
    Rng rng(mix_seed(seed, 0xc9c1e));
    for (int t = 0; t < trials; ++t) {
        // shape-preserving 1x1 nets so h(f(x)) matches x
        int c0 = (int)rng.uniform_int(1, 3);
        NetGenOptions fwd_opt;
        fwd_opt.n = (int)rng.uniform_int(1, 3);
        fwd_opt.allow_sigmoid = false;
        fwd_opt.shape_preserving = true;
        fwd_opt.norm_lo = 0.5;
        fwd_opt.norm_hi = 1.0;
        fwd_opt.in_channels = c0;
        TrialNet fa = random_net(rng, fwd_opt);

        NetGenOptions back_opt = fwd_opt;
        back_opt.n = (int)rng.uniform_int(1, 3);
        back_opt.in_channels = (int)fa.layers.back().kernel.dim(0);
        back_opt.out_channels = c0;
        TrialNet ha = random_net(rng, back_opt);

        // every third trial perturbs only the backward half; every tenth
        // keeps both halves bitwise identical (exactly 0 <= 0)
        bool ident = t % 10 == 9;
        NetPair fwd_pair{fa, ident || t % 3 == 2 ? fa : perturbed_net(fa, rng, 1e-2, 0.5)};
        NetPair back_pair{ha, ident ? ha : perturbed_net(ha, rng, 1e-2, 0.5)};
        NetPair full = concat_pairs(fwd_pair, back_pair);

        int64_t hw = rng.uniform_int(4, 8);
        Tensor x = rng.normal_tensor({64, c0, hw, hw}, 0.0, 1.0);
        double la = vec_mean(per_sample_l1(sub(full.a.forward(x), x)));
        double lb = vec_mean(per_sample_l1(sub(full.b.forward(x), x)));
        double lhs = std::fabs(la - lb);
        double coef = young_path_coefficient(full, 0, full.layer_count());
        double rhs = coef * sum_kernel_diff(full, 1) * vec_mean(per_sample_l1(x));
        rep.trials.push_back(make_trial(t, full.layer_count(), 1, lhs, rhs, rhs));
    }
    return rep;
}

}  // namespace dckgen::bounds
