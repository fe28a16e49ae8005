#include <doctest.h>

#include <cmath>

#include "dckgen/nn_ops.hpp"
#include "dckgen/rng.hpp"
#include "dckgen/tensor.hpp"

using namespace dckgen;
using ops::ActKind;
using ops::Conv2dSpec;
using ops::PadMode;

namespace {

// Straightforward quadruple-loop reference convolution.
Tensor conv2d_reference(const Tensor& x, const Tensor& w, const Tensor* bias,
                        const Conv2dSpec& spec) {
    int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
    int64_t oc = w.dim(0), cg = w.dim(1), kh = w.dim(2), kw = w.dim(3);
    int64_t g = spec.groups;
    REQUIRE(c % g == 0);
    REQUIRE(cg == c / g);
    REQUIRE(oc % g == 0);
    int64_t ho = (h + 2 * spec.padding - kh) / spec.stride + 1;
    int64_t wo = (wd + 2 * spec.padding - kw) / spec.stride + 1;
    Tensor out({n, oc, ho, wo});
    for (int64_t ni = 0; ni < n; ++ni)
        for (int64_t o = 0; o < oc; ++o) {
            int64_t grp = o / (oc / g);
            for (int64_t yo = 0; yo < ho; ++yo)
                for (int64_t xo = 0; xo < wo; ++xo) {
                    double acc = bias ? (*bias)[o] : 0.0;
                    for (int64_t ci = 0; ci < cg; ++ci)
                        for (int64_t ky = 0; ky < kh; ++ky)
                            for (int64_t kx = 0; kx < kw; ++kx) {
                                int64_t yi = yo * spec.stride - spec.padding + ky;
                                int64_t xi = xo * spec.stride - spec.padding + kx;
                                float v;
                                if (spec.pad == PadMode::Zero) {
                                    if (yi < 0 || yi >= h || xi < 0 || xi >= wd) continue;
                                    v = x.at4(ni, grp * cg + ci, yi, xi);
                                } else {
                                    int64_t ym = ((yi % h) + h) % h;
                                    int64_t xm = ((xi % wd) + wd) % wd;
                                    v = x.at4(ni, grp * cg + ci, ym, xm);
                                }
                                acc += (double)v * w.at4(o, ci, ky, kx);
                            }
                    out.at4(ni, o, yo, xo) = (float)acc;
                }
        }
    return out;
}

void check_close(const Tensor& got, const Tensor& want, double tol) {
    REQUIRE(got.same_shape(want));
    CHECK(max_abs(sub(got, want)) <= tol);
}

}  // namespace

TEST_SUITE_BEGIN("ops");

TEST_CASE("conv2d matches reference over random configs") {
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        Conv2dSpec spec;
        spec.groups = (int)rng.uniform_int(1, 3);
        int64_t cg = rng.uniform_int(1, 3);
        int64_t c = cg * spec.groups;
        int64_t oc = spec.groups * rng.uniform_int(1, 3);
        int64_t k = rng.uniform() < 0.5 ? 1 : 3;
        spec.stride = (int)rng.uniform_int(1, 2);
        spec.padding = (int)rng.uniform_int(0, 1);
        spec.pad = rng.uniform() < 0.5 ? PadMode::Zero : PadMode::Circular;
        int64_t h = rng.uniform_int(k + (spec.padding ? 0 : 1), 8);
        Tensor x = rng.normal_tensor({rng.uniform_int(1, 2), c, h, h}, 0, 1);
        Tensor w = rng.normal_tensor({oc, cg, k, k}, 0, 1);
        Tensor b = rng.normal_tensor({oc}, 0, 1);
        check_close(ops::conv2d(x, w, &b, spec), conv2d_reference(x, w, &b, spec), 1e-4);
    }
}

TEST_CASE("conv2d identity kernel") {
    Rng rng(3);
    Tensor x = rng.normal_tensor({1, 2, 5, 5}, 0, 1);
    // 3x3 kernels with a centered 1 on the diagonal channel pass x through
    Tensor w({2, 2, 3, 3});
    w.at4(0, 0, 1, 1) = 1.0f;
    w.at4(1, 1, 1, 1) = 1.0f;
    Conv2dSpec spec;
    spec.padding = 1;
    Tensor y = ops::conv2d(x, w, nullptr, spec);
    check_close(y, x, 0.0);
}

TEST_CASE("circular conv2d commutes with cyclic shifts") {
    Rng rng(5);
    Tensor x = rng.normal_tensor({1, 2, 8, 8}, 0, 1);
    Tensor w = rng.normal_tensor({3, 2, 3, 3}, 0, 1);
    Conv2dSpec spec;
    spec.padding = 1;
    spec.pad = PadMode::Circular;
    auto roll = [](const Tensor& t, int64_t dy, int64_t dx) {
        Tensor out(t.shape());
        for (int64_t n = 0; n < t.dim(0); ++n)
            for (int64_t c = 0; c < t.dim(1); ++c)
                for (int64_t y = 0; y < t.dim(2); ++y)
                    for (int64_t x2 = 0; x2 < t.dim(3); ++x2)
                        out.at4(n, c, (y + dy) % t.dim(2), (x2 + dx) % t.dim(3)) =
                            t.at4(n, c, y, x2);
        return out;
    };
    Tensor lhs = ops::conv2d(roll(x, 3, 5), w, nullptr, spec);
    Tensor rhs = roll(ops::conv2d(x, w, nullptr, spec), 3, 5);
    check_close(lhs, rhs, 1e-5);
}

TEST_CASE("tconv2d shape and adjointness to conv2d") {
    Rng rng(9);
    // tconv output height: (H-1)*s - 2p + K
    Tensor x = rng.normal_tensor({1, 3, 5, 5}, 0, 1);
    Tensor w = rng.normal_tensor({3, 2, 4, 4}, 0, 1);  // tconv (IC,OC,K,K)
    Tensor y = ops::tconv2d(x, w, nullptr, 2, 1, PadMode::Zero);
    CHECK(y.shape() == std::vector<int64_t>{1, 2, 10, 10});

    // The same array read as conv weights (OC=3, IC=2, K, K) gives the adjoint
    // map: <tconv(x, w), a> == <x, conv(a, w)> for matching stride/padding.
    Tensor a = rng.normal_tensor({1, 2, 10, 10}, 0, 1);
    Conv2dSpec spec;
    spec.stride = 2;
    spec.padding = 1;
    Tensor ca = ops::conv2d(a, w, nullptr, spec);  // (1,3,5,5)
    double inner1 = 0, inner2 = 0;
    for (int64_t i = 0; i < y.numel(); ++i) inner1 += (double)y[i] * a[i];
    for (int64_t i = 0; i < x.numel(); ++i) inner2 += (double)x[i] * ca[i];
    CHECK(inner1 == doctest::Approx(inner2).epsilon(1e-4));
}

TEST_CASE("tconv2d stride-1 equals correlation-flipped conv") {
    Rng rng(13);
    Tensor x = rng.normal_tensor({1, 2, 6, 6}, 0, 1);
    Tensor w = rng.normal_tensor({2, 3, 3, 3}, 0, 1);  // (IC, OC, K, K)
    Tensor got = ops::tconv2d(x, w, nullptr, 1, 1, PadMode::Zero);
    // equivalent direct conv: weights flipped spatially and transposed in c
    Tensor wf({3, 2, 3, 3});
    for (int64_t o = 0; o < 3; ++o)
        for (int64_t i = 0; i < 2; ++i)
            for (int64_t ky = 0; ky < 3; ++ky)
                for (int64_t kx = 0; kx < 3; ++kx)
                    wf.at4(o, i, ky, kx) = w.at4(i, o, 2 - ky, 2 - kx);
    Conv2dSpec spec;
    spec.padding = 1;
    check_close(got, ops::conv2d(x, wf, nullptr, spec), 1e-5);
}

TEST_CASE("activation values and slopes") {
    Tensor x({5}, {-2.0f, -1.0f, 0.0f, 1.0f, 2.0f});
    Tensor lr = ops::activation(x, ActKind::LeakyRelu, 0.2f);
    CHECK(lr[0] == doctest::Approx(-0.4));
    CHECK(lr[1] == doctest::Approx(-0.2));
    CHECK(lr[2] == 0.0f);
    CHECK(lr[3] == 1.0f);

    Tensor th = ops::activation(x, ActKind::Tanh);
    CHECK(th[3] == doctest::Approx(std::tanh(1.0)));
    Tensor sg = ops::activation(x, ActKind::Sigmoid);
    CHECK(sg[2] == doctest::Approx(0.5));
    CHECK(sg[4] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));

    CHECK(ops::act_lipschitz(ActKind::LeakyRelu, 0.2f) == doctest::Approx(1.0));
    CHECK(ops::act_lipschitz(ActKind::Tanh, 0) == doctest::Approx(1.0));
    CHECK(ops::act_lipschitz(ActKind::Sigmoid, 0) == doctest::Approx(0.25));
    CHECK(std::string(ops::act_name(ActKind::LeakyRelu)) == "leaky_relu");
}

TEST_CASE("instance_norm normalizes per channel and applies affine") {
    Rng rng(17);
    Tensor x = rng.normal_tensor({2, 3, 6, 6}, 3.0, 2.0);
    Tensor gain = Tensor::full({3}, 1.0f);
    Tensor offset({3});
    Tensor y = ops::instance_norm(x, gain, offset);
    for (int64_t n = 0; n < 2; ++n)
        for (int64_t c = 0; c < 3; ++c) {
            double m = 0, v = 0;
            for (int64_t i = 0; i < 36; ++i) m += y.at4(n, c, i / 6, i % 6);
            m /= 36;
            for (int64_t i = 0; i < 36; ++i) {
                double d = y.at4(n, c, i / 6, i % 6) - m;
                v += d * d;
            }
            v /= 36;
            CHECK(m == doctest::Approx(0.0).epsilon(1e-4));
            CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
        }
    // gain/offset shift the stats
    Tensor gain2({3}, {2, 2, 2});
    Tensor off2({3}, {5, 5, 5});
    Tensor y2 = ops::instance_norm(x, gain2, off2);
    CHECK(y2[0] == doctest::Approx(2.0 * y[0] + 5.0).epsilon(1e-4));
}

TEST_CASE("linear matches manual matmul") {
    Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor w({2, 3}, {1, 0, -1, 0.5, 0.5, 0.5});
    Tensor b({2}, {10, -10});
    Tensor y = ops::linear(x, w, &b);
    CHECK(y.at2(0, 0) == doctest::Approx(1 - 3 + 10));
    CHECK(y.at2(0, 1) == doctest::Approx(0.5 * (1 + 2 + 3) - 10));
    CHECK(y.at2(1, 0) == doctest::Approx(4 - 6 + 10));
}

TEST_CASE("global_avg_pool and upsample_nearest") {
    Tensor x({1, 2, 2, 2}, {1, 2, 3, 4, 10, 20, 30, 40});
    Tensor p = ops::global_avg_pool(x);
    CHECK(p.at2(0, 0) == doctest::Approx(2.5));
    CHECK(p.at2(0, 1) == doctest::Approx(25.0));

    Tensor u = ops::upsample_nearest(x, 2);
    CHECK(u.shape() == std::vector<int64_t>{1, 2, 4, 4});
    CHECK(u.at4(0, 0, 0, 0) == 1.0f);
    CHECK(u.at4(0, 0, 0, 1) == 1.0f);
    CHECK(u.at4(0, 0, 1, 1) == 1.0f);
    CHECK(u.at4(0, 0, 3, 3) == 4.0f);
}

TEST_CASE("conv2d validates arguments") {
    Tensor x({1, 3, 4, 4});
    Tensor w({2, 2, 3, 3});  // expects C/groups == 2, but C=3, groups=1
    Conv2dSpec spec;
    CHECK_THROWS(ops::conv2d(x, w, nullptr, spec));
    Tensor w2({2, 3, 5, 5});  // kernel larger than padded input
    CHECK_THROWS(ops::conv2d(x, w2, nullptr, spec));
}

TEST_SUITE_END();
