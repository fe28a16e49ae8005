#include "dckgen/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dckgen {

std::string shape_str(const std::vector<int64_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

int64_t shape_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        if (d < 0) throw std::invalid_argument("negative dimension in shape " + shape_str(shape));
        n *= d;
    }
    return n;
}

int64_t Tensor::check_numel(const std::vector<int64_t>& shape) {
    return shape_numel(shape);
}

Tensor Tensor::full(std::vector<int64_t> shape, float v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
}

Tensor Tensor::reshaped(std::vector<int64_t> new_shape) const {
    if (shape_numel(new_shape) != numel())
        throw std::invalid_argument("reshape: cannot view " + shape_str(shape_) + " as " +
                                    shape_str(new_shape));
    return Tensor(std::move(new_shape), data_);
}

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

static void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.shape());
    for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.shape());
    for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] - b[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out(a.shape());
    for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] * b[i];
    return out;
}

Tensor scale(const Tensor& a, float s) {
    Tensor out(a.shape());
    for (int64_t i = 0; i < a.numel(); ++i) out[i] = a[i] * s;
    return out;
}

Tensor slice_outer(const Tensor& a, int64_t i) {
    if (a.rank() < 1) throw std::invalid_argument("slice_outer: rank-0 tensor");
    if (i < 0 || i >= a.dim(0))
        throw std::invalid_argument("slice_outer: index " + std::to_string(i) +
                                    " out of range for " + shape_str(a.shape()));
    std::vector<int64_t> shape(a.shape().begin() + 1, a.shape().end());
    int64_t stride = a.numel() / a.dim(0);
    Tensor out(shape.empty() ? std::vector<int64_t>{1} : shape);
    std::copy(a.data() + i * stride, a.data() + (i + 1) * stride, out.data());
    return out;
}

double sum(const Tensor& a) {
    double acc = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) acc += (double)a[i];
    return acc;
}

double mean(const Tensor& a) {
    if (a.numel() == 0) throw std::invalid_argument("mean: empty tensor");
    return sum(a) / (double)a.numel();
}

double max_abs(const Tensor& a) {
    double m = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, (double)std::fabs(a[i]));
    return m;
}

double mean_abs_diff(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mean_abs_diff");
    if (a.numel() == 0) throw std::invalid_argument("mean_abs_diff: empty tensor");
    double acc = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) acc += std::fabs((double)a[i] - (double)b[i]);
    return acc / (double)a.numel();
}

double lp_norm(const Tensor& a, int p) {
    if (p < 1) throw std::invalid_argument("lp_norm: p must be >= 1, got " + std::to_string(p));
    double acc = 0.0;
    if (p == 1) {
        for (int64_t i = 0; i < a.numel(); ++i) acc += std::fabs((double)a[i]);
        return acc;
    }
    if (p == 2) {
        for (int64_t i = 0; i < a.numel(); ++i) acc += (double)a[i] * (double)a[i];
        return std::sqrt(acc);
    }
    for (int64_t i = 0; i < a.numel(); ++i) acc += std::pow(std::fabs((double)a[i]), (double)p);
    return std::pow(acc, 1.0 / (double)p);
}

}  // namespace dckgen
