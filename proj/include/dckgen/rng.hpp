#pragma once

// Deterministic RNG. Distributions are hand-rolled on top of mt19937_64 so the
// same seed yields the same stream on every platform / stdlib.

#include <cmath>
#include <cstdint>
#include <random>

#include "dckgen/tensor.hpp"

namespace dckgen {

// splitmix64 finalizer; used to derive independent sub-streams from one seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return (double)(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Inclusive integer range.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
        uint64_t span = (uint64_t)(hi - lo) + 1;
        // modulo bias is negligible for the small spans used here, but reject anyway
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return lo + (int64_t)(v % span);
    }

    // Box-Muller; two uniforms per call, no cached state.
    double normal() {
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Tensor uniform_tensor(std::vector<int64_t> shape, double lo, double hi) {
        Tensor t(std::move(shape));
        for (int64_t i = 0; i < t.numel(); ++i) t[i] = (float)uniform(lo, hi);
        return t;
    }

    Tensor normal_tensor(std::vector<int64_t> shape, double mean, double stddev) {
        Tensor t(std::move(shape));
        for (int64_t i = 0; i < t.numel(); ++i) t[i] = (float)normal(mean, stddev);
        return t;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dckgen
