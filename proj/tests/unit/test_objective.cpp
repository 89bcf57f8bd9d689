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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support/oracles.hpp"
#include "symmocc/objective.hpp"

using namespace symmocc;
using symmocc::testing::finite_difference_check;
using symmocc::testing::FdProbe;
using symmocc::testing::random_tensor;

namespace {

ClassWeights unit_weights() { return ClassWeights{1, 1, 1, 1, 1.5}; }

double loss_value(const Tensor& pl, const Tensor& pr, const Tensor& yl, const Tensor& yr, const ClassWeights& w) {
    return occlusion_loss(constant(pl), pr.empty() ? Var{} : constant(pr), yl, yr, w)->value.data()[0];
}

Tensor labels(std::vector<Real> v) {
    const std::size_t n = v.size();
    return Tensor({1, 1, 1, n}, std::move(v));
}

OcclusionMap occ(std::vector<std::uint8_t> v, View view) {
    OcclusionMap m(view, v.size(), 1);
    m.labels.values = std::move(v);
    return m;
}

}  // namespace

TEST_CASE("bounded class weights") {
    CHECK(bounded_class_weight(0.5, 1.5) == doctest::Approx(1.4426950408889634).epsilon(1e-12));
    CHECK(std::abs(bounded_class_weight(0.5, 1.5) - 1.0 / std::log(2.0)) <= 1e-12);
    CHECK(bounded_class_weight(0.0, 1.5) == doctest::Approx(2.4663034623764317).epsilon(1e-12));
    CHECK(kClassEpsSynthetic == 1.5);
    CHECK(kClassEpsFineTune == 1.2);
    CHECK(kClassEpsMotion == 1.01);
    CHECK_THROWS_AS(bounded_class_weight(0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bounded_class_weight(0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bounded_class_weight(1.5, 1.5), std::invalid_argument);
    for (double eps : {1.01, 1.2, 1.5})
        for (double q = 0; q <= 1.0; q += 0.125) {
            const double w = bounded_class_weight(q, eps);
            CHECK(std::isfinite(w));
            CHECK(w > 0);
        }
}

TEST_CASE("class proportions pool over the batch per view") {
    // Left: 1 of 4 and 3 of 4 occluded -> q = 0.5 pooled. Right: 0 of 8.
    const std::vector<OcclusionMap> left{occ({1, 0, 0, 0}, View::Left), occ({1, 1, 1, 0}, View::Left)};
    const std::vector<OcclusionMap> right{occ({0, 0, 0, 0}, View::Right), occ({0, 0, 0, 0}, View::Right)};
    const ClassWeights w = class_weights(left, right, 1.5);
    CHECK(w.left_occluded == doctest::Approx(1.0 / std::log(2.0)));
    CHECK(w.left_visible == doctest::Approx(1.0 / std::log(2.0)));
    CHECK(w.right_occluded == doctest::Approx(1.0 / std::log(1.5)));
    CHECK(w.right_visible == doctest::Approx(1.0 / std::log(2.5)));
    CHECK_THROWS_AS(class_weights(left, right, 1.0), std::invalid_argument);
}

TEST_CASE("single occluded pixel at one half") {
    const double l = loss_value(labels({0.5}), Tensor(), labels({1}), Tensor(), unit_weights());
    CHECK(l == doctest::Approx(-0.5 * std::log(0.5)).epsilon(1e-14));
    CHECK(l == doctest::Approx(0.3466).epsilon(1e-4));
}

TEST_CASE("confident correct predictions cost almost nothing") {
    const Tensor y = labels({1, 0, 1, 0});
    const double l = loss_value(labels({1, 0, 1, 0}), labels({0, 0, 1, 1}), y, labels({0, 0, 1, 1}), unit_weights());
    CHECK(l >= 0.0);
    CHECK(l < 1e-6);
    const double bad = loss_value(labels({0.9, 0, 1, 0}), labels({0, 0, 1, 1}), y, labels({0, 0, 1, 1}), unit_weights());
    CHECK(bad > l);
}

TEST_CASE("loss is linear in each class weight") {
    const Tensor p = labels({0.3, 0.8, 0.6}), y = labels({1, 0, 1});
    ClassWeights w = unit_weights();
    w.left_visible = 0.0;
    const double occ_term = loss_value(p, Tensor(), y, Tensor(), w);
    w.left_occluded = 2.0;
    CHECK(loss_value(p, Tensor(), y, Tensor(), w) == doctest::Approx(2 * occ_term).epsilon(1e-15));
    w.left_visible = 1.0;
    w.left_occluded = 1.0;
    const double both = loss_value(p, Tensor(), y, Tensor(), w);
    w.left_occluded = 2.0;
    CHECK(loss_value(p, Tensor(), y, Tensor(), w) - both == doctest::Approx(occ_term).epsilon(1e-12));
}

TEST_CASE("loss is invariant under label-preserving permutations") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::vector<Real> p(64), y(64);
    for (std::size_t i = 0; i < 64; ++i) {
        p[i] = u(rng);
        y[i] = i % 3 == 0 ? 1 : 0;
    }
    const ClassWeights w{2.0, 0.7, 1.0, 1.0, 1.5};
    const double base = loss_value(labels(p), Tensor(), labels(y), Tensor(), w);
    std::vector<std::size_t> idx(64);
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < 10; ++t) {
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<Real> pp(64), yy(64);
        for (std::size_t i = 0; i < 64; ++i) {
            pp[i] = p[idx[i]];
            yy[i] = y[idx[i]];
        }
        CHECK(loss_value(labels(pp), Tensor(), labels(yy), Tensor(), w) == doctest::Approx(base).epsilon(1e-13));
    }
}

TEST_CASE("right terms add symmetrically") {
    const Tensor p = labels({0.3, 0.8}), y = labels({1, 0});
    const double left = loss_value(p, Tensor(), y, Tensor(), unit_weights());
    CHECK(loss_value(p, p, y, y, unit_weights()) == doctest::Approx(2 * left).epsilon(1e-15));
}

TEST_CASE("normalised loss divides by the labelled pixel count") {
    const Tensor p = labels({0.3, 0.8, 0.5}), y = labels({1, 0, 1});
    const double sum = loss_value(p, p, y, y, unit_weights());
    const double mean = occlusion_loss(constant(p), constant(p), y, y, unit_weights(), {.normalize = true})->value.data()[0];
    CHECK(mean == doctest::Approx(sum / 6).epsilon(1e-15));
}

TEST_CASE("loss rejects mismatched shapes") {
    CHECK_THROWS_AS(occlusion_loss(constant(labels({0.5, 0.5})), Var{}, labels({1}), Tensor(), unit_weights()),
                    std::invalid_argument);
    CHECK_THROWS_AS(occlusion_loss(constant(labels({0.5})), constant(labels({0.5})), labels({1}), labels({1, 0}),
                                   unit_weights()),
                    std::invalid_argument);
}

TEST_CASE("gradient with respect to logits matches finite differences") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        Parameter logits("z", random_tensor({2, 4, 3, 5}, rng, -3, 3));
        Tensor yl({2, 1, 3, 5}), yr({2, 1, 3, 5});
        for (std::size_t i = 0; i < yl.size(); ++i) {
            yl.data()[i] = (i * 7 + trial) % 3 == 0;
            yr.data()[i] = (i * 5 + trial) % 4 == 0;
        }
        const ClassWeights w{1.7, 0.6, 2.1, 0.4, 1.5};
        auto build = [&] {
            const Var p = softmax_pairs(parameter(logits));
            return occlusion_loss(slice_channels(p, 0, 1), slice_channels(p, 2, 1), yl, yr, w);
        };
        logits.zero_grad();
        backward(build());
        std::vector<FdProbe> probes;
        for (std::size_t i = 0; i < logits.value.size(); i += 3)
            probes.push_back({&logits.value.data()[i], &logits.grad.data()[i], "z" + std::to_string(i)});
        const auto rep = finite_difference_check(build, probes);
        CAPTURE(rep.worst);
        CHECK(rep.checked == probes.size());
        CHECK(rep.max_rel_error < 1e-4);
    }
}

TEST_CASE("clamped probabilities stay finite") {
    const double l = loss_value(labels({0.0, 1.0}), Tensor(), labels({1, 0}), Tensor(), unit_weights());
    CHECK(std::isfinite(l));
    CHECK(l == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
}

TEST_CASE("mean absolute error and its gradient") {
    Parameter p("d", Tensor({1, 1, 1, 3}, std::vector<Real>{1, 5, -2}));
    const Var l = mean_abs_error(parameter(p), labels({2, 3, -2.5}));
    CHECK(l->value.data()[0] == doctest::Approx((1 + 2 + 0.5) / 3.0));
    backward(l);
    CHECK(p.grad.values()[0] == doctest::Approx(-1.0 / 3));
    CHECK(p.grad.values()[1] == doctest::Approx(1.0 / 3));
    CHECK(p.grad.values()[2] == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(mean_abs_error(parameter(p), labels({1})), std::invalid_argument);
}
