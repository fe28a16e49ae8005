#pragma once

// Reverse-mode autodiff tape. Nodes own their value and (lazily) a grad
// buffer; backward() walks the graph once in reverse topological order with a
// fixed, deterministic accumulation order.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dckgen/nn_ops.hpp"
#include "dckgen/tensor.hpp"

namespace dckgen {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
    Tensor value;
    Tensor grad;  // allocated on demand, same shape as value
    // Scalar reductions also record their double-precision value here (NaN =
    // unset); finite-difference checks read it to avoid float32 cancellation.
    double hi_value = std::numeric_limits<double>::quiet_NaN();
    bool requires_grad = false;
    std::string name;  // for parameters / diagnostics
    std::vector<Var> parents;
    std::function<void()> backward_fn;  // reads this->grad, accumulates into parents

    bool has_grad() const { return grad.numel() == value.numel() && grad.numel() > 0; }
    Tensor& ensure_grad() {
        if (!has_grad()) grad = Tensor(value.shape());
        return grad;
    }
    void zero_grad() {
        if (has_grad())
            for (int64_t i = 0; i < grad.numel(); ++i) grad[i] = 0.0f;
    }
};

Var constant(Tensor value);
Var parameter(Tensor value, std::string name = "");

// Double-precision value of a scalar node (falls back to the float payload).
double scalar_value(const Var& v);

// Backprop from a scalar (numel == 1) node. Each node's backward runs exactly
// once; throws if `loss` is not scalar.
void backward(const Var& loss);

namespace ad {

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);            // elementwise, same shape
Var bmul(const Var& x, const Var& m);           // x (N,C,H,W) * mask m (N,1,H,W)
Var affine(const Var& a, float s, float t);     // s*a + t
Var square(const Var& a);
Var abs(const Var& a);
Var sum(const Var& a);                          // -> scalar
Var mean(const Var& a);                         // -> scalar
Var reshape(const Var& a, std::vector<int64_t> shape);
Var concat_channels(const Var& a, const Var& b);        // rank-4, dim 1
Var slice_cols(const Var& a, int64_t begin, int64_t end);  // rank-2, dim 1

Var conv2d(const Var& x, const Var& w, const Var& b, const ops::Conv2dSpec& spec);  // b may be null
Var tconv2d(const Var& x, const Var& w, const Var& b, int stride, int padding, ops::PadMode pad);
Var activation(const Var& x, ops::ActKind kind, float slope = 0.0f);
Var instance_norm(const Var& x, const Var& gain, const Var& offset, float eps = 1e-5f);
Var linear(const Var& x, const Var& w, const Var& b);  // b may be null
Var global_avg_pool(const Var& x);
Var upsample_nearest(const Var& x, int factor);

}  // namespace ad

}  // namespace dckgen
