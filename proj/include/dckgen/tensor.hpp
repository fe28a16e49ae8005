#pragma once

// Dense row-major float32 tensor. Small, owning, no views.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dckgen {

std::string shape_str(const std::vector<int64_t>& shape);
int64_t shape_numel(const std::vector<int64_t>& shape);

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int64_t> shape)
        : shape_(std::move(shape)), data_(check_numel(shape_), 0.0f) {}
    Tensor(std::vector<int64_t> shape, std::vector<float> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if ((int64_t)data_.size() != shape_numel(shape_))
            throw std::invalid_argument("Tensor: data size " + std::to_string(data_.size()) +
                                        " does not match shape " + shape_str(shape_));
    }

    static Tensor full(std::vector<int64_t> shape, float v);
    static Tensor scalar(float v) { return Tensor({1}, {v}); }

    const std::vector<int64_t>& shape() const { return shape_; }
    int rank() const { return (int)shape_.size(); }
    int64_t dim(int i) const { return shape_.at(i); }
    int64_t numel() const { return (int64_t)data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& vec() { return data_; }
    const std::vector<float>& vec() const { return data_; }

    float& operator[](int64_t i) { return data_[i]; }
    float operator[](int64_t i) const { return data_[i]; }

    // (n, c, h, w) accessor for rank-4 tensors; no bounds checks in release hot paths.
    float& at4(int64_t n, int64_t c, int64_t h, int64_t w) {
        return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }
    float at4(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }
    float& at3(int64_t c, int64_t h, int64_t w) {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }
    float at3(int64_t c, int64_t h, int64_t w) const {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }
    float& at2(int64_t i, int64_t j) { return data_[i * shape_[1] + j]; }
    float at2(int64_t i, int64_t j) const { return data_[i * shape_[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    // Same data, new shape (numel must match).
    Tensor reshaped(std::vector<int64_t> new_shape) const;

    bool all_finite() const;

private:
    static int64_t check_numel(const std::vector<int64_t>& shape);

    std::vector<int64_t> shape_;
    std::vector<float> data_;
};

// Elementwise helpers (shapes must match exactly).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);

// Copy of a[i] along the outermost dimension (rank drops by one).
Tensor slice_outer(const Tensor& a, int64_t i);

// Sums/reductions accumulate in double.
double sum(const Tensor& a);
double mean(const Tensor& a);
double max_abs(const Tensor& a);
double mean_abs_diff(const Tensor& a, const Tensor& b);

// Entrywise l_p norm of the flattened tensor, p >= 1.
double lp_norm(const Tensor& a, int p);

}  // namespace dckgen
