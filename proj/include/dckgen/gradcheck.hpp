#pragma once

// Central finite-difference check of the autodiff backward pass.

#include <functional>
#include <vector>

#include "dckgen/autodiff.hpp"

namespace dckgen {

struct GradCheckStats {
    int64_t coords = 0;
    int64_t over_soft = 0;  // rel err > soft_tol
    int64_t over_hard = 0;  // rel err > hard_tol
    double max_rel = 0.0;
    double soft_tol = 1e-3;
    double hard_tol = 1e-2;

    double frac_within_soft() const {
        return coords == 0 ? 1.0 : 1.0 - (double)over_soft / (double)coords;
    }
    // soft tolerance on >= 95% of coordinates, hard tolerance everywhere
    bool pass(double min_frac = 0.95) const {
        return over_hard == 0 && frac_within_soft() >= min_frac;
    }
};

// Builds a scalar loss from leaf nodes; called repeatedly with perturbed
// leaf values, so it must be a pure function of them.
using GraphBuilder = std::function<Var(const std::vector<Var>&)>;

// Central differences with the given step. The relative error uses an
// absolute floor: float32 forwards carry ~1e-7 per-element rounding noise,
// which the difference quotient amplifies by 1/(2*step), so components
// smaller than the floor cannot be resolved relatively and are measured
// against the floor instead. Callers keep loss gradients O(1) (e.g. a
// random-projection sum) so the floor stays far below typical components.
GradCheckStats gradcheck(const GraphBuilder& build, const std::vector<Tensor>& leaf_values,
                         double step = 1e-2, double floor = 5e-2);

}  // namespace dckgen
