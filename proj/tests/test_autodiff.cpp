#include <doctest.h>

#include <cmath>

#include "dckgen/autodiff.hpp"
#include "dckgen/rng.hpp"

using namespace dckgen;

TEST_SUITE_BEGIN("autodiff");

TEST_CASE("constant vs parameter grad flags") {
    Var c = constant(Tensor({2}, {1, 2}));
    Var p = parameter(Tensor({2}, {3, 4}), "p");
    CHECK(!c->requires_grad);
    CHECK(p->requires_grad);
    CHECK(p->name == "p");
}

TEST_CASE("sum and mean produce double-precision scalars") {
    // 10M + 0.25 cannot be represented in float32; the double path keeps it
    Tensor t({2}, {1.0e7f, 0.25f});
    Var s = ad::sum(constant(t));
    CHECK(scalar_value(s) == doctest::Approx(1.0e7 + 0.25).epsilon(1e-12));
    Var m = ad::mean(constant(t));
    CHECK(scalar_value(m) == doctest::Approx((1.0e7 + 0.25) / 2).epsilon(1e-12));
}

TEST_CASE("backward through arithmetic chain") {
    // L = sum((a*b + 2a - b)^2); dL/da = 2(ab+2a-b)(b+2), dL/db = 2(ab+2a-b)(a-1)
    Var a = parameter(Tensor({2}, {1.0f, -2.0f}));
    Var b = parameter(Tensor({2}, {3.0f, 0.5f}));
    Var expr = ad::sub(ad::add(ad::mul(a, b), ad::affine(a, 2.0f, 0.0f)), b);
    Var loss = ad::sum(ad::square(expr));
    backward(loss);
    for (int i = 0; i < 2; ++i) {
        double av = a->value[i], bv = b->value[i];
        double e = av * bv + 2 * av - bv;
        CHECK(a->grad[i] == doctest::Approx(2 * e * (bv + 2)).epsilon(1e-5));
        CHECK(b->grad[i] == doctest::Approx(2 * e * (av - 1)).epsilon(1e-5));
    }
}

TEST_CASE("abs subgradient") {
    Var a = parameter(Tensor({3}, {-2.0f, 0.0f, 3.0f}));
    backward(ad::sum(ad::abs(a)));
    CHECK(a->grad[0] == -1.0f);
    CHECK(a->grad[1] == 1.0f);  // subgradient at 0 chosen as +1
    CHECK(a->grad[2] == 1.0f);
}

TEST_CASE("grad accumulates when a node feeds two consumers") {
    Var a = parameter(Tensor({1}, {3.0f}));
    Var loss = ad::sum(ad::add(ad::square(a), ad::mul(a, a)));  // 2*a^2
    backward(loss);
    CHECK(a->grad[0] == doctest::Approx(4.0 * 3.0));
}

TEST_CASE("bmul broadcasts a 1-channel mask") {
    Rng rng(4);
    Tensor xv = rng.normal_tensor({2, 3, 2, 2}, 0, 1);
    Tensor mv = rng.uniform_tensor({2, 1, 2, 2}, 0, 1);
    Var x = parameter(xv);
    Var m = parameter(mv);
    Var y = ad::bmul(x, m);
    for (int64_t n = 0; n < 2; ++n)
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t i = 0; i < 4; ++i)
                CHECK(y->value.at4(n, c, i / 2, i % 2) ==
                      doctest::Approx(xv.at4(n, c, i / 2, i % 2) * mv.at4(n, 0, i / 2, i % 2)));
    backward(ad::sum(y));
    // d/dm sums over channels
    for (int64_t n = 0; n < 2; ++n)
        for (int64_t i = 0; i < 4; ++i) {
            double want = 0;
            for (int64_t c = 0; c < 3; ++c) want += xv.at4(n, c, i / 2, i % 2);
            CHECK(m->grad.at4(n, 0, i / 2, i % 2) == doctest::Approx(want).epsilon(1e-5));
        }
}

TEST_CASE("reshape and slice_cols route gradients") {
    Var a = parameter(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
    Var r = ad::reshape(a, {6});
    CHECK(r->value.shape() == std::vector<int64_t>{6});
    Var s = ad::slice_cols(a, 1, 3);  // -> (2,2): {2,3,5,6}
    CHECK(s->value.at2(0, 0) == 2.0f);
    CHECK(s->value.at2(1, 1) == 6.0f);
    backward(ad::sum(s));
    CHECK(a->grad.at2(0, 0) == 0.0f);
    CHECK(a->grad.at2(0, 1) == 1.0f);
    CHECK(a->grad.at2(1, 2) == 1.0f);
}

TEST_CASE("concat_channels splits gradients") {
    Var a = parameter(Tensor({1, 1, 1, 2}, {1, 2}));
    Var b = parameter(Tensor({1, 2, 1, 2}, {3, 4, 5, 6}));
    Var c = ad::concat_channels(a, b);
    CHECK(c->value.shape() == std::vector<int64_t>{1, 3, 1, 2});
    CHECK(c->value.at4(0, 0, 0, 1) == 2.0f);
    CHECK(c->value.at4(0, 2, 0, 0) == 5.0f);
    Tensor w({1, 3, 1, 2}, {10, 20, 30, 40, 50, 60});
    backward(ad::sum(ad::mul(c, constant(w))));
    CHECK(a->grad[0] == 10.0f);
    CHECK(a->grad[1] == 20.0f);
    CHECK(b->grad[0] == 30.0f);
    CHECK(b->grad[3] == 60.0f);
}

TEST_CASE("activation backward uses the analytic derivative") {
    Var x = parameter(Tensor({3}, {-1.0f, 0.5f, 2.0f}));
    backward(ad::sum(ad::activation(x, ops::ActKind::Tanh)));
    for (int i = 0; i < 3; ++i) {
        double t = std::tanh((double)x->value[i]);
        CHECK(x->grad[i] == doctest::Approx(1 - t * t).epsilon(1e-5));
    }
    Var x2 = parameter(Tensor({2}, {-3.0f, 3.0f}));
    backward(ad::sum(ad::activation(x2, ops::ActKind::LeakyRelu, 0.2f)));
    CHECK(x2->grad[0] == doctest::Approx(0.2));
    CHECK(x2->grad[1] == doctest::Approx(1.0));
}

TEST_CASE("linear backward matches hand-computed matmul grads") {
    // y = x W^T, L = sum(y * r)
    Tensor xv({1, 2}, {1, 2});
    Tensor wv({2, 2}, {3, 4, 5, 6});
    Tensor rv({1, 2}, {10, 100});
    Var x = parameter(xv), w = parameter(wv);
    Var y = ad::linear(x, w, nullptr);
    CHECK(y->value.at2(0, 0) == doctest::Approx(11));   // 1*3+2*4
    CHECK(y->value.at2(0, 1) == doctest::Approx(17));   // 1*5+2*6
    backward(ad::sum(ad::mul(y, constant(rv))));
    // dx = r W, dw = r^T x
    CHECK(x->grad.at2(0, 0) == doctest::Approx(10 * 3 + 100 * 5));
    CHECK(x->grad.at2(0, 1) == doctest::Approx(10 * 4 + 100 * 6));
    CHECK(w->grad.at2(0, 0) == doctest::Approx(10 * 1));
    CHECK(w->grad.at2(1, 1) == doctest::Approx(100 * 2));
}

TEST_CASE("each node's backward runs once in a diamond graph") {
    Var a = parameter(Tensor({1}, {2.0f}));
    Var s = ad::square(a);              // 4
    Var l = ad::add(s, s);              // 8; s consumed twice
    backward(ad::sum(l));
    CHECK(a->grad[0] == doctest::Approx(8.0));  // d(2a^2)/da = 4a
}

TEST_CASE("backward rejects non-scalar roots") {
    Var a = parameter(Tensor({2}, {1, 2}));
    CHECK_THROWS(backward(a));
}

TEST_SUITE_END();
