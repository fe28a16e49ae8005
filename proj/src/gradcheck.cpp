#include "dckgen/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace dckgen {

GradCheckStats gradcheck(const GraphBuilder& build, const std::vector<Tensor>& leaf_values,
                         double step, double floor) {
    std::vector<Var> leaves;
    leaves.reserve(leaf_values.size());
    for (const auto& t : leaf_values) leaves.push_back(parameter(t));
    Var loss = build(leaves);
    if (loss->value.numel() != 1) throw std::invalid_argument("gradcheck: loss must be scalar");
    backward(loss);

    auto eval_at = [&](size_t li, int64_t c, float v) -> double {
        std::vector<Var> probe;
        probe.reserve(leaf_values.size());
        for (size_t j = 0; j < leaf_values.size(); ++j) {
            Tensor t = leaf_values[j];
            if (j == li) t[c] = v;
            probe.push_back(constant(std::move(t)));
        }
        return scalar_value(build(probe));
    };

    GradCheckStats st;
    for (size_t li = 0; li < leaves.size(); ++li) {
        const Tensor& base = leaf_values[li];
        bool has = leaves[li]->has_grad();
        for (int64_t c = 0; c < base.numel(); ++c) {
            double g = has ? (double)leaves[li]->grad[c] : 0.0;
            // Central differences at h and h/2 with Richardson extrapolation
            // (4*D(h/2) - D(h))/3, cancelling the h^2 truncation term; each
            // quotient divides by the float-rounded perturbation actually
            // applied.
            auto quot = [&](double h) {
                float vp = (float)(base[c] + h), vm = (float)(base[c] - h);
                return (eval_at(li, c, vp) - eval_at(li, c, vm)) /
                       ((double)vp - (double)vm);
            };
            double fd = (4.0 * quot(step / 2) - quot(step)) / 3.0;
            double rel = std::fabs(fd - g) / std::max({floor, std::fabs(fd), std::fabs(g)});
            ++st.coords;
            if (rel > st.soft_tol) ++st.over_soft;
            if (rel > st.hard_tol) ++st.over_hard;
            st.max_rel = std::max(st.max_rel, rel);
        }
    }
    return st;
}

}  // namespace dckgen
