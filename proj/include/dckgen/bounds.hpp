#pragma once

// Numerical verification of approximation bounds for pairs of bias-free,
// stride-1, unpadded convolution networks (no normalization layers):
//
//   * activation non-expansiveness:  ||g(x1) - g(x2)||_p <= ||x1 - x2||_p
//   * output-difference bound, two estimates per trial:
//       RHS_paper = M_p^(n-1) * ||x||_p * sum_i ||k_i^1 - k_i^2||_p
//         with M_p the measured max kernel p-norm (a reported heuristic;
//         violations are counted, not failed), and
//       RHS_young, a rigorous recursion built from the per-layer estimate
//         ||k * x||_p <= ||k||_1 * ||x||_p:
//           D_i = L_i * (||k_i^1||_1 * D_{i-1} + ||dk_i||_1 * B_{i-1})
//           B_i = L_i * ||k_i^2||_1 * B_{i-1}            (g_i(0) = 0)
//           B_i = 0.25 * ||k_i^2||_1 * B_{i-1} + 0.5 * numel_i^(1/p)
//                                                        (sigmoid)
//         with B_0 = ||x||_p, D_0 = 0, L_i the activation Lipschitz
//         constant; RHS_young = D_n must never be violated.
//   * loss-difference bounds for adversarial / feature-space / cycle
//     losses, with constants either calibrated on held-out trials or
//     computed from the same recursion.
//
// All expectations are exact means over fixed finite sample sets, and all
// reports are deterministic functions of the seed.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dckgen/nn_ops.hpp"
#include "dckgen/rng.hpp"

namespace dckgen::bounds {

// Reference peak kernel norm recorded in summaries for comparison with the
// per-trial measured values.
inline constexpr double kReferencePeakNorm = 0.4559;
// A trial is flagged when LHS > RHS * (1 + kViolationTol).
inline constexpr double kViolationTol = 1e-6;

struct TrialLayer {
    Tensor kernel;  // (OC, IC, KH, KW)
    ops::ActKind act = ops::ActKind::LeakyRelu;
    float slope = 0.0f;  // leaky_relu only
};

struct TrialNet {
    std::vector<TrialLayer> layers;
    // conv (stride 1, pad 0, no bias) then activation, per layer.
    Tensor forward(const Tensor& x) const;
};

// Two nets with identical kernel shapes and identical activations.
struct NetPair {
    TrialNet a, b;
    int layer_count() const { return (int)a.layers.size(); }
    void validate() const;
};

// Max entrywise p-norm over a kernel list.
double peak_kernel_norm(const std::vector<Tensor>& kernels, int p);

// ||f_a(x) - f_b(x)||_p evaluated exactly.
double output_diff_lhs(const NetPair& pair, const Tensor& x, int p);
// M_p^(n-1) * ||x||_p * sum ||k_a - k_b||_p with M_p measured over both nets.
double output_diff_rhs_paper(const NetPair& pair, const Tensor& x, int p);
// Rigorous recursion described above.
double output_diff_rhs_young(const NetPair& pair, const Tensor& x, int p);

// max over layers i in [lo, hi) of
//   L_i * prod_{j<i}(L_j * ||k_j^b||_1) * prod_{j>i}(L_j * ||k_j^a||_1),
// the coefficient turning the recursion into C * (sum ||dk_i||_1) * ||x||_1.
// Requires every activation in the pair to fix 0 (no sigmoid).
double young_path_coefficient(const NetPair& pair, int lo, int hi);

struct BoundTrial {
    int trial = 0;
    int n = 0;  // layer count
    int p = 2;
    double lhs = 0, rhs_paper = 0, rhs_young = 0;
    double margin = 0;  // rhs_young - lhs
    bool violation_paper = false, violation_young = false;
};

struct BoundReport {
    std::string name;
    std::vector<BoundTrial> trials;
    double a1 = 0, a2 = 0;      // calibrated constants (adversarial suite)
    int calibration_trials = 0; // size of the calibration set, if any
    double peak_norm_max = 0;   // largest measured per-trial peak kernel norm

    int violations_paper() const;
    int violations_young() const;
    double max_ratio_paper() const;  // max lhs/rhs_paper over rhs > 0
    double max_ratio_young() const;

    // Header "trial,n,p,LHS,RHS_paper,RHS_young,violation_paper,violation_young".
    void write_csv(std::ostream& out) const;
    std::string summary() const;
};

// Make one BoundTrial from measured values, applying the violation rule.
BoundTrial make_trial(int trial, int n, int p, double lhs, double rhs_paper, double rhs_young);

// Non-expansiveness of one activation kind over random tensor pairs
// (leaky_relu draws a fresh slope in [0, 1] per trial).
BoundReport check_nonexpansive(ops::ActKind kind, int trials, int p, uint64_t seed);

// Output-difference bound over random net pairs, n in [n_min, n_max],
// spatial sizes <= 16; every pair is evaluated at each p in p_set.
BoundReport verify_output_bound(int trials, int n_min, int n_max, const std::vector<int>& p_set,
                                uint64_t seed);

// |L_adv(f_a) - L_adv(f_b)| <= (A1 * d^2 + A2 * d) * E||x||_2^2 with
// d = sum ||dk||_2 over generator layers and a shared discriminator.
// A1, A2 are fit on an internal calibration set (2x trials, exact
// two-variable LP, then a 1.5x safety factor) and checked on `trials`
// held-out trials, which form the report rows.
BoundReport verify_adv_loss_bound(int trials, uint64_t seed);

// |L_feat(f_a) - L_feat(f_b)| <= C * (sum ||dk||_1) * E||x||_1 where
// L_feat(f) = E||phi(f(x)) - phi(y)||_1 for a shared feature net phi
// (identity on even trials, a random conv net on odd trials) and C is
// young_path_coefficient over the generator layers.
BoundReport verify_perceptual_bound(int trials, uint64_t seed);

// |L_cyc(f_a, h_a) - L_cyc(f_b, h_b)| <= C * (sum ||dk||_1 over both
// directions) * E||x||_1 where L_cyc(f, h) = E||h(f(x)) - x||_1 over
// shape-preserving (1x1-kernel) nets and C spans the 2n chained layers.
BoundReport verify_cycle_bound(int trials, uint64_t seed);

// Minimal (A1, A2) >= 0 with A1*d^2 + A2*d >= r for every point (d, r),
// minimizing A1 + A2 (exact vertex enumeration).
std::pair<double, double> calibrate_quadratic_bound(
    const std::vector<std::pair<double, double>>& points);

}  // namespace dckgen::bounds
