// Copyright 2026 The symmocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "symmocc/autograd.hpp"
#include "symmocc/layers.hpp"

using namespace symmocc;
using symmocc::testing::finite_difference_check;
using symmocc::testing::FdProbe;
using symmocc::testing::naive_conv;
using symmocc::testing::naive_deconv;
using symmocc::testing::project;
using symmocc::testing::random_tensor;

namespace {

ConvParams params_of(Tensor w, std::vector<Real> b, std::size_t s, std::size_t p) {
    ConvParams c;
    c.weights = std::move(w);
    c.bias = std::move(b);
    c.stride = s;
    c.padding = p;
    return c;
}

std::vector<Real> random_bias(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<Real> b(n);
    for (Real& v : b) v = d(rng);
    return b;
}

}  // namespace

TEST_CASE("tensor storage matches its shape") {
    Tensor t({2, 3, 4, 5});
    CHECK(t.size() == 120);
    t.at(1, 2, 3, 4) = 7;
    CHECK(t.values().back() == 7);
    CHECK_THROWS_AS(Tensor({1, 1, 2, 2}, std::vector<Real>{1, 2, 3}), std::invalid_argument);
    t.at(0, 0, 0, 0) = std::nan("");
    CHECK_FALSE(t.all_finite());
}

TEST_CASE("1x1 unit kernel is the identity") {
    std::mt19937_64 rng(1);
    const Tensor x = random_tensor({2, 1, 5, 7}, rng);
    const Tensor y = conv2d(x, params_of(Tensor({1, 1, 1, 1}, 1.0), {0.0}, 1, 0));
    CHECK(y.values() == x.values());
}

TEST_CASE("3x3 ones over a 3x3 ones input with padding 1") {
    const Tensor y = conv2d(Tensor({1, 1, 3, 3}, 1.0), params_of(Tensor({1, 1, 3, 3}, 1.0), {0.0}, 1, 1));
    REQUIRE(y.shape() == Shape{1, 1, 3, 3});
    CHECK(y.at(0, 0, 1, 1) == 9.0);
    for (auto [yy, xx] : {std::pair{0, 1}, {1, 0}, {1, 2}, {2, 1}}) CHECK(y.at(0, 0, yy, xx) == 6.0);
    for (auto [yy, xx] : {std::pair{0, 0}, {0, 2}, {2, 0}, {2, 2}}) CHECK(y.at(0, 0, yy, xx) == 4.0);
}

TEST_CASE("first down-sampling halves a 256x768 stack") {
    std::mt19937_64 rng(2);
    const Tensor x = random_tensor({1, 6, 256, 768}, rng, 0, 1);
    const Tensor y = conv2d(x, params_of(random_tensor({16, 6, 8, 8}, rng), std::vector<Real>(16, 0.0), 2, 3));
    CHECK(y.shape() == Shape{1, 16, 128, 384});
}

TEST_CASE("last up-sampling doubles to 256x768") {
    std::mt19937_64 rng(3);
    const Tensor x = random_tensor({1, 16, 128, 384}, rng);
    const Tensor y = deconv2d(x, params_of(random_tensor({8, 16, 4, 4}, rng), std::vector<Real>(8, 0.0), 2, 1));
    CHECK(y.shape() == Shape{1, 8, 256, 768});
}

TEST_CASE("conv2d rejects mismatched shapes naming the dims") {
    const Tensor x({1, 3, 8, 8});
    CHECK_THROWS_WITH_AS(conv2d(x, params_of(Tensor({4, 2, 3, 3}), {}, 1, 1)),
                         doctest::Contains("input has 3 channels but weights 4x2x3x3"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(conv2d(x, params_of(Tensor({4, 3, 3, 3}), {}, 2, 0)), doctest::Contains("divisible by stride 2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(conv2d(x, params_of(Tensor({4, 3, 3, 3}), {1.0, 2.0}, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(deconv2d(x, params_of(Tensor({4, 2, 4, 4}), {}, 2, 1)), std::invalid_argument);
}

TEST_CASE("conv2d matches direct summation for every table geometry") {
    std::mt19937_64 rng(4);
    struct G { std::size_t k, s, p; };
    for (G g : {G{8, 2, 3}, G{6, 2, 2}, G{4, 2, 1}, G{3, 1, 1}, G{3, 2, 0}}) {
        CAPTURE(g.k);
        const Tensor x = random_tensor({2, 3, 12, 16}, rng);
        const Tensor w = random_tensor({4, 3, g.k, g.k}, rng);
        const auto b = random_bias(4, rng);
        if ((12 + 2 * g.p - g.k) % g.s != 0) continue;
        const Tensor got = conv2d(x, params_of(w, b, g.s, g.p));
        CHECK(max_abs_diff(got, naive_conv(x, w, b, g.s, g.p)) < 1e-12);
    }
}

TEST_CASE("deconv2d matches scattering and a single pixel spreads evenly") {
    std::mt19937_64 rng(5);
    const Tensor x = random_tensor({2, 3, 5, 6}, rng);
    const Tensor w = random_tensor({4, 3, 4, 4}, rng);
    const auto b = random_bias(4, rng);
    CHECK(max_abs_diff(deconv2d(x, params_of(w, b, 2, 1)), naive_deconv(x, w, b, 2, 1)) < 1e-12);

    const Tensor y = deconv2d(Tensor({1, 1, 1, 1}, 2.5), params_of(Tensor({1, 1, 4, 4}, 1.0), {0.0}, 2, 1));
    REQUIRE(y.shape() == Shape{1, 1, 2, 2});
    for (Real v : y.values()) CHECK(v == 2.5);

    const Tensor z = deconv2d(Tensor({1, 3, 5, 6}), params_of(w, {}, 2, 1));
    for (Real v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("stride-1 conv is translation equivariant away from padding") {
    std::mt19937_64 rng(6);
    const Tensor x = random_tensor({1, 2, 20, 20}, rng);
    const ConvParams p = params_of(random_tensor({3, 2, 3, 3}, rng), random_bias(3, rng), 1, 1);
    Tensor shifted({1, 2, 20, 20});
    const std::size_t dy = 2, dx = 3;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t y = 0; y + dy < 20; ++y)
            for (std::size_t xx = 0; xx + dx < 20; ++xx) shifted.at(0, c, y + dy, xx + dx) = x.at(0, c, y, xx);
    const Tensor a = conv2d(x, p), b = conv2d(shifted, p);
    double worst = 0;
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t y = 1; y + 1 + dy < 20; ++y)
            for (std::size_t xx = 1; xx + 1 + dx < 20; ++xx)
                worst = std::max(worst, std::abs(a.at(0, o, y, xx) - b.at(0, o, y + dy, xx + dx)));
    CHECK(worst < 1e-12);
}

TEST_CASE("relu values") {
    const Tensor y = relu(Tensor({1, 1, 1, 3}, std::vector<Real>{-1, 0, 2}));
    CHECK(y.values() == std::vector<Real>{0, 0, 2});
    const Tensor pos({1, 2, 2, 2}, std::vector<Real>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(relu(pos).values() == pos.values());
}

TEST_CASE("relu gradient is the step function") {
    Parameter p("x", Tensor({1, 1, 1, 2}, std::vector<Real>{-0.7, 0.4}));
    const Var loss = sum_squares(relu(parameter(p)));
    backward(loss);
    CHECK(p.grad.data()[0] == 0.0);
    CHECK(p.grad.data()[1] == doctest::Approx(0.8).epsilon(1e-15));
    const auto rep = finite_difference_check([&] { return sum_squares(relu(parameter(p))); },
                                             {FdProbe{&p.value.data()[0], &p.grad.data()[0], "neg"},
                                              FdProbe{&p.value.data()[1], &p.grad.data()[1], "pos"}});
    CHECK(rep.checked == 2);
    CHECK(rep.max_rel_error < 1e-6);
}

TEST_CASE("paired softmax") {
    const Tensor a = softmax_pairs(Tensor({1, 2, 1, 1}, std::vector<Real>{0, 0}));
    CHECK(a.values() == std::vector<Real>{0.5, 0.5});
    const Tensor b = softmax_pairs(Tensor({1, 2, 1, 1}, std::vector<Real>{std::log(3.0), 0}));
    CHECK(b.values()[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(b.values()[1] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(softmax_pairs(Tensor({1, 3, 2, 2})), std::invalid_argument);

    std::mt19937_64 rng(7);
    const Tensor p = softmax_pairs(random_tensor({2, 4, 9, 11}, rng, -60, 60));
    REQUIRE(p.shape() == Shape{2, 4, 9, 11});
    double worst = 0;
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t pair = 0; pair < 2; ++pair)
            for (std::size_t y = 0; y < 9; ++y)
                for (std::size_t x = 0; x < 11; ++x) {
                    CHECK(p.at(n, 2 * pair, y, x) >= 0.0);
                    worst = std::max(worst, std::abs(p.at(n, 2 * pair, y, x) + p.at(n, 2 * pair + 1, y, x) - 1.0));
                }
    CHECK(worst <= 1e-12);
    CHECK(p.all_finite());
}

TEST_CASE("backward on a sum of squares") {
    Parameter p("p", Tensor({1, 1, 1, 2}, std::vector<Real>{3, -4}));
    Parameter unused("q", Tensor({1, 1, 1, 3}, 5.0));
    const Var loss = sum_squares(parameter(p));
    CHECK(loss->value.data()[0] == 25.0);
    backward(loss);
    CHECK(p.grad.values() == std::vector<Real>{6, -8});
    for (Real g : unused.grad.values()) CHECK(g == 0.0);
}

TEST_CASE("backward rejects a missing or non-scalar root") {
    CHECK_THROWS_AS(backward(Var{}), std::logic_error);
    Parameter p("p", Tensor({1, 1, 2, 2}, 1.0));
    CHECK_THROWS_AS(backward(relu(parameter(p))), std::logic_error);
}

TEST_CASE("shared parameter accumulates from both uses") {
    Parameter p("p", Tensor({1, 1, 1, 2}, std::vector<Real>{1, 2}));
    const Var x = parameter(p);
    backward(add(sum_squares(x), sum_squares(scale(x, 2.0))));
    // d/dp (p^2 + 4 p^2) = 10 p
    CHECK(p.grad.values() == std::vector<Real>{10, 20});
}

TEST_CASE("primitive gradients match finite differences") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        Parameter x("x", random_tensor({1, 2, 8, 8}, rng));
        Parameter w("w", random_tensor({3, 2, 4, 4}, rng));
        Parameter b("b", random_tensor({1, 1, 1, 3}, rng));
        Parameter wt("wt", random_tensor({2, 3, 4, 4}, rng));
        const Tensor r = random_tensor({1, 4, 8, 8}, rng);
        auto build = [&] {
            const Var h = conv2d(parameter(x), parameter(w), parameter(b), {2, 1});
            const Var up = deconv2d(relu(h), parameter(wt), constant(Tensor({1, 1, 1, 2})), {2, 1});
            return project(softmax_pairs(concat(up, parameter(x))), r);
        };
        x.zero_grad();
        w.zero_grad();
        b.zero_grad();
        wt.zero_grad();
        backward(build());
        std::vector<FdProbe> probes;
        for (std::size_t i = 0; i < 6; ++i) {
            probes.push_back({&x.value.data()[i * 17 % x.value.size()], &x.grad.data()[i * 17 % x.value.size()], "x"});
            probes.push_back({&w.value.data()[i * 13 % w.value.size()], &w.grad.data()[i * 13 % w.value.size()], "w"});
            probes.push_back({&wt.value.data()[i * 11 % wt.value.size()], &wt.grad.data()[i * 11 % wt.value.size()], "wt"});
        }
        probes.push_back({&b.value.data()[trial % 3], &b.grad.data()[trial % 3], "b"});
        const auto rep = finite_difference_check(build, probes);
        CAPTURE(rep.worst);
        CHECK(rep.checked > 0);
        CHECK(rep.max_rel_error < 1e-4);
    }
}
