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
#include <set>
#include <sstream>

#include "symmocc/adam.hpp"
#include "symmocc/datakit/synth.hpp"
#include "symmocc/trainer.hpp"

using namespace symmocc;

namespace {

std::vector<StereoSample> scenes(std::size_t n, std::size_t w, std::size_t h, std::uint64_t seed) {
    std::vector<StereoSample> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(synth_scene(random_scene_spec(seed + i, w, h)).sample);
    return out;
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.channel_scale = 0.125;
    cfg.seed = 5;
    cfg.batch_size = 2;
    cfg.epochs = 2;
    cfg.crop_h = 64;
    cfg.crop_w = 64;
    return cfg;
}

bool same_parameters(const Network& a, const Network& b) {
    const auto pa = a.parameters(), pb = b.parameters();
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (pa[i]->name != pb[i]->name || pa[i]->value.values() != pb[i]->value.values()) return false;
    return true;
}

}  // namespace

TEST_CASE("optimizer defaults") {
    const AdamConfig c;
    CHECK(c.lr == 1e-2);
    CHECK(c.beta1 == 0.9);
    CHECK(c.beta2 == 0.99);
    CHECK(c.eps == 1e-8);
    const TrainConfig t;
    CHECK(t.batch_size == 16);
    CHECK(t.epochs == 10);
    CHECK(t.crop_h == 256);
    CHECK(t.crop_w == 768);
    CHECK(t.class_eps == 1.5);
    CHECK_FALSE(t.normalize_loss);
}

TEST_CASE("zero gradient leaves parameters but advances the step") {
    Parameter p("p", Tensor({1, 1, 1, 3}, std::vector<Real>{1, -2, 3}));
    std::vector<Parameter*> ps{&p};
    AdamState st = AdamState::for_parameters(ps);
    adam_step(ps, st, {});
    adam_step(ps, st, {});
    CHECK(st.step == 2);
    CHECK(p.value.values() == std::vector<Real>{1, -2, 3});
}

TEST_CASE("first step moves by lr against the gradient sign") {
    Parameter p("p", Tensor({1, 1, 1, 4}, std::vector<Real>{0, 0, 1, 1}));
    p.grad = Tensor({1, 1, 1, 4}, std::vector<Real>{3, -0.01, 1e3, -7});
    std::vector<Parameter*> ps{&p};
    AdamState st = AdamState::for_parameters(ps);
    const AdamConfig cfg;
    adam_step(ps, st, cfg);
    const std::vector<Real> want{-cfg.lr, cfg.lr, 1 - cfg.lr, 1 + cfg.lr};
    for (std::size_t i = 0; i < 4; ++i) CHECK(p.value.values()[i] == doctest::Approx(want[i]).epsilon(1e-6));
    CHECK(st.m[0].values()[0] == doctest::Approx(0.3));
    CHECK(st.v[0].values()[0] == doctest::Approx(0.09));
}

TEST_CASE("two Adam steps follow the bias-corrected recurrence") {
    Parameter p("p", Tensor({1, 1, 1, 1}, 0.5));
    std::vector<Parameter*> ps{&p};
    AdamState st = AdamState::for_parameters(ps);
    const AdamConfig cfg;
    double m = 0, v = 0, x = 0.5;
    for (double g : {2.0, -1.0}) {
        p.grad = Tensor({1, 1, 1, 1}, g);
        adam_step(ps, st, cfg);
        m = cfg.beta1 * m + (1 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
        const double t = static_cast<double>(st.step);
        x -= cfg.lr * (m / (1 - std::pow(cfg.beta1, t))) / (std::sqrt(v / (1 - std::pow(cfg.beta2, t))) + cfg.eps);
        CHECK(p.value.values()[0] == doctest::Approx(x).epsilon(1e-14));
    }
}

TEST_CASE("config validation") {
    TrainConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.crop_w = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.class_eps = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("training preconditions") {
    const TrainConfig cfg = small_config();
    CHECK_THROWS_AS(train({}, {}, cfg), std::invalid_argument);
    TrainConfig big = cfg;
    big.crop_h = 256;
    CHECK_THROWS_AS(train(scenes(1, 128, 128, 1), {}, big), std::invalid_argument);
}

TEST_CASE("zero epochs return the initialisation") {
    TrainConfig cfg = small_config();
    cfg.epochs = 0;
    const TrainResult r = train(scenes(2, 128, 128, 1), {}, cfg);
    CHECK(same_parameters(r.network, Network::build(cfg.variant, cfg.channel_scale, cfg.seed)));
    CHECK(r.optimizer.step == 0);
    CHECK(r.epochs.empty());
    CHECK(r.steps.empty());
}

TEST_CASE("an epoch plan is a permutation with in-bounds crops") {
    const auto data = scenes(5, 192, 128, 1);
    const TrainConfig cfg = small_config();
    const EpochPlan plan = plan_epoch(data, cfg, 3);
    REQUIRE(plan.order.size() == 5);
    REQUIRE(plan.crops.size() == 5);
    CHECK(std::set<std::size_t>(plan.order.begin(), plan.order.end()).size() == 5);
    for (const CropRect& r : plan.crops) {
        CHECK(r.x + r.width <= 192);
        CHECK(r.y + r.height <= 128);
    }
    const EpochPlan again = plan_epoch(data, cfg, 3);
    CHECK(again.order == plan.order);
    CHECK(again.crops == plan.crops);
}

TEST_CASE("crop sampling reaches every image edge") {
    const auto data = scenes(1, 192, 128, 1);
    bool left = false, right = false, top = false, bottom = false;
    TrainConfig cfg = small_config();
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        cfg.seed = seed;
        const CropRect r = plan_epoch(data, cfg, 0).crops[0];
        left = left || r.x == 0;
        right = right || r.x + r.width == 192;
        top = top || r.y == 0;
        bottom = bottom || r.y + r.height == 128;
    }
    CHECK(left);
    CHECK(right);
    CHECK(top);
    CHECK(bottom);
}

TEST_CASE("AlterNet alternates the supervised view each step") {
    TrainConfig cfg = small_config();
    cfg.variant = Variant::AlterNet;
    cfg.batch_size = 1;
    cfg.max_steps = 5;
    const TrainResult r = train(scenes(3, 128, 128, 1), {}, cfg);
    REQUIRE(r.steps.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(r.steps[i].view);
        CHECK(*r.steps[i].view == (i % 2 == 0 ? View::Left : View::Right));
    }
    cfg.variant = Variant::SymmNet;
    for (const StepRecord& s : train(scenes(3, 128, 128, 1), {}, cfg).steps) CHECK_FALSE(s.view);
}

TEST_CASE("training is reproducible from its seed") {
    const auto data = scenes(3, 128, 128, 1);
    TrainConfig cfg = small_config();
    const TrainResult a = train(data, {}, cfg);
    const TrainResult b = train(data, {}, cfg);
    CHECK(same_parameters(a.network, b.network));
    CHECK(a.optimizer == b.optimizer);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].loss == b.steps[i].loss);
    cfg.seed = 6;
    CHECK_FALSE(same_parameters(a.network, train(data, {}, cfg).network));
}

TEST_CASE("epoch records and the held-out log") {
    const auto data = scenes(3, 128, 128, 1);
    TrainConfig cfg = small_config();
    std::vector<EpochRecord> seen;
    const TrainResult r = train(data, scenes(1, 128, 128, 50), cfg, [&](const EpochRecord& e) { seen.push_back(e); });
    REQUIRE(r.epochs.size() == 2);
    CHECK(seen.size() == 2);
    CHECK(r.epochs[0].steps == 2);  // ceil(3 / 2)
    CHECK(r.epochs[1].steps == 4);
    CHECK(r.optimizer.step == 4);
    for (const auto& e : r.epochs) {
        CHECK(std::isfinite(e.mean_loss));
        REQUIRE(e.heldout);
        CHECK(e.heldout->images == 2);
    }
    std::ostringstream os;
    write_train_log(os, r.epochs);
    const std::string log = os.str();
    CHECK(log.rfind("epoch,steps,mean_loss,precision,recall,fscore\n", 0) == 0);
    CHECK(std::count(log.begin(), log.end(), '\n') == 3);
}

TEST_CASE("max_steps stops mid-epoch") {
    TrainConfig cfg = small_config();
    cfg.batch_size = 1;
    cfg.epochs = 5;
    cfg.max_steps = 4;
    const TrainResult r = train(scenes(3, 128, 128, 1), {}, cfg);
    CHECK(r.steps.size() == 4);
    CHECK(r.epochs.back().steps == 4);
}

TEST_CASE("LRCNet trains on disparity and evaluates through the consistency check") {
    TrainConfig cfg = small_config();
    cfg.variant = Variant::LRCNet;
    cfg.max_steps = 2;
    const auto data = scenes(2, 128, 128, 1);
    const TrainResult r = train(data, {}, cfg);
    CHECK(std::isfinite(r.steps.back().loss));
    const Evaluation ev = evaluate(r.network, data, 0.5);
    CHECK(ev.left.size() == 2);
    CHECK(ev.right.size() == 2);
    CHECK(ev.pooled.images == 4);
}

TEST_CASE("evaluation of single-view variants has no right view") {
    const Network net = Network::build(Variant::MonoNetL, 0.125, 1);
    const Evaluation ev = evaluate(net, scenes(2, 128, 128, 1), 0.5);
    CHECK(ev.left.size() == 2);
    CHECK(ev.right.empty());
    CHECK_FALSE(ev.right_total);
    CHECK(ev.pooled.images == 2);
}
