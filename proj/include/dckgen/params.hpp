#pragma once

// Named parameter registry shared by a model's submodules; the optimizer and
// checkpoint code iterate it in registration order.

#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "dckgen/autodiff.hpp"

namespace dckgen {

class ParamStore {
public:
    Var make(const std::string& name, Tensor init) {
        if (!names_.insert(name).second)
            throw std::invalid_argument("duplicate parameter name: " + name);
        Var v = parameter(std::move(init), name);
        items_.push_back(v);
        return v;
    }

    const std::vector<Var>& items() const { return items_; }

    Var find(const std::string& name) const {
        for (const auto& v : items_)
            if (v->name == name) return v;
        return nullptr;
    }

    int64_t total_count() const {
        int64_t n = 0;
        for (const auto& v : items_) n += v->value.numel();
        return n;
    }

    void zero_grads() {
        for (auto& v : items_) v->zero_grad();
    }

private:
    std::vector<Var> items_;
    std::unordered_set<std::string> names_;
};

}  // namespace dckgen
