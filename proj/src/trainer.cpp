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

#include "symmocc/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace symmocc {

void TrainConfig::validate() const {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (crop_h == 0 || crop_w == 0 || crop_h % 64 != 0 || crop_w % 64 != 0) {
        throw std::invalid_argument("crop " + std::to_string(crop_h) + "x" + std::to_string(crop_w) +
                                    " must be a positive multiple of 64 in both extents");
    }
    if (!(adam.lr > 0) || !(adam.beta1 >= 0 && adam.beta1 < 1) || !(adam.beta2 >= 0 && adam.beta2 < 1) ||
        !(adam.eps > 0)) {
        throw std::invalid_argument("invalid Adam hyperparameters");
    }
    if (!(class_eps > 1.0)) throw std::invalid_argument("class-weight eps must exceed 1");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
    gt.validate();
}

EpochPlan plan_epoch(const std::vector<StereoSample>& samples, const TrainConfig& cfg, std::size_t epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(epoch), 0x6372u};
    std::mt19937_64 rng(seq);
    EpochPlan plan;
    plan.order.resize(samples.size());
    std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
    std::shuffle(plan.order.begin(), plan.order.end(), rng);
    for (std::size_t i : plan.order) {
        const StereoSample& s = samples[i];
        if (s.width() < cfg.crop_w || s.height() < cfg.crop_h) {
            throw std::invalid_argument("crop " + std::to_string(cfg.crop_h) + "x" + std::to_string(cfg.crop_w) +
                                        " exceeds sample " + std::to_string(i) + " of size " +
                                        std::to_string(s.height()) + "x" + std::to_string(s.width()));
        }
        CropRect r;
        r.width = cfg.crop_w;
        r.height = cfg.crop_h;
        r.x = std::uniform_int_distribution<std::size_t>(0, s.width() - cfg.crop_w)(rng);
        r.y = std::uniform_int_distribution<std::size_t>(0, s.height() - cfg.crop_h)(rng);
        plan.crops.push_back(r);
    }
    return plan;
}

namespace {

struct Batch {
    Tensor left, right;
    Tensor labels_left, labels_right;
    Tensor disp_left, disp_right;
    ClassWeights weights;
};

Batch make_batch(const std::vector<StereoSample>& crops, double eps) {
    std::vector<const Image*> li, ri;
    std::vector<const OcclusionMap*> lo, ro;
    std::vector<const DisparityMap*> ld, rd;
    std::vector<OcclusionMap> lo_v, ro_v;
    for (const StereoSample& c : crops) {
        li.push_back(&c.left_image);
        ri.push_back(&c.right_image);
        lo.push_back(&*c.left_occ);
        ro.push_back(&*c.right_occ);
        ld.push_back(&c.left_disp);
        rd.push_back(&c.right_disp);
        lo_v.push_back(*c.left_occ);
        ro_v.push_back(*c.right_occ);
    }
    Batch b;
    b.left = images_to_tensor(li);
    b.right = images_to_tensor(ri);
    b.labels_left = labels_to_tensor(lo);
    b.labels_right = labels_to_tensor(ro);
    b.disp_left = disparities_to_tensor(ld);
    b.disp_right = disparities_to_tensor(rd);
    b.weights = class_weights(lo_v, ro_v, eps);
    return b;
}

ClassWeights right_as_left(const ClassWeights& w) {
    ClassWeights r = w;
    r.left_occluded = w.right_occluded;
    r.left_visible = w.right_visible;
    return r;
}

// Builds the graph for one step and returns the scalar loss.
Var step_loss(Network& net, const Batch& b, const TrainConfig& cfg, std::optional<View> only) {
    LossOptions lo;
    lo.normalize = cfg.normalize_loss;
    const GraphOutput g = net.forward_graph(b.left, b.right, only);
    if (net.regresses_disparity()) {
        return scale(add(mean_abs_error(g.disp_left, b.disp_left), mean_abs_error(g.disp_right, b.disp_right)), 0.5);
    }
    if (only == View::Right) return occlusion_loss(g.prob_right, nullptr, b.labels_right, Tensor(), right_as_left(b.weights), lo);
    return occlusion_loss(g.prob_left, g.prob_right, b.labels_left, b.labels_right, b.weights, lo);
}

}  // namespace

TrainResult train(const std::vector<StereoSample>& train_set, const std::vector<StereoSample>& heldout,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    if (train_set.empty()) throw std::invalid_argument("training set is empty");
    for (const StereoSample& s : train_set) s.validate();

    BuildOptions opt;
    opt.alter_mirror = cfg.alter_mirror;
    TrainResult result{Network::build(cfg.variant, cfg.channel_scale, cfg.seed, opt), {}, {}, {}};
    Network& net = result.network;
    const auto params = net.parameters();
    result.optimizer = AdamState::for_parameters(params);

    std::size_t step = 0;
    const std::size_t limit = cfg.max_steps.value_or(static_cast<std::size_t>(-1));
    for (std::size_t epoch = 0; epoch < cfg.epochs && step < limit; ++epoch) {
        const EpochPlan plan = plan_epoch(train_set, cfg, epoch);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t first = 0; first < plan.order.size() && step < limit; first += cfg.batch_size) {
            const std::size_t last = std::min(plan.order.size(), first + cfg.batch_size);
            std::vector<StereoSample> crops;
            for (std::size_t i = first; i < last; ++i) {
                crops.push_back(crop_with_gt(train_set[plan.order[i]], plan.crops[i], cfg.gt));
            }
            const Batch batch = make_batch(crops, cfg.class_eps);

            // AlterNet swaps the stacking order on every iteration
            std::optional<View> only;
            if (cfg.variant == Variant::AlterNet) only = step % 2 == 0 ? View::Left : View::Right;

            net.zero_grad();
            const Var loss = step_loss(net, batch, cfg, only);
            backward(loss);
            adam_step(params, result.optimizer, cfg.adam);

            const double value = loss->value.data()[0];
            result.steps.push_back({value, only});
            loss_sum += value;
            ++loss_count;
            ++step;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.steps = step;
        rec.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
        if (!heldout.empty()) rec.heldout = evaluate(net, heldout, cfg.tau, cfg.gt).pooled;
        result.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    return result;
}

Evaluation evaluate(const Network& net, const std::vector<StereoSample>& samples, double tau, const GtConfig& gt) {
    Evaluation ev;
    std::vector<Metrics> pooled;
    for (const StereoSample& raw : samples) {
        StereoSample s = raw;
        if (!s.left_occ || !s.right_occ) attach_gt(s, gt);
        const Tensor l = images_to_tensor({&s.left_image});
        const Tensor r = images_to_tensor({&s.right_image});
        const NetworkOutput out = net.forward(l, r);

        OcclusionMap pl, pr;
        bool has_right = true;
        if (net.regresses_disparity()) {
            std::tie(pl, pr) = lrc_occlusion(out, 0, gt);
        } else {
            const Prediction p = predict(probabilities(out, 0), tau);
            pl = p.left;
            has_right = p.right.has_value();
            if (has_right) pr = *p.right;
        }
        ev.left.push_back(prf(pl, *s.left_occ));
        pooled.push_back(ev.left.back());
        if (has_right) {
            ev.right.push_back(prf(pr, *s.right_occ));
            pooled.push_back(ev.right.back());
        }
    }
    ev.left_total = aggregate(ev.left);
    if (!ev.right.empty()) ev.right_total = aggregate(ev.right);
    ev.pooled = aggregate(pooled);
    return ev;
}

void write_train_log(std::ostream& os, const std::vector<EpochRecord>& epochs) {
    os << "epoch,steps,mean_loss,precision,recall,fscore\n";
    os.precision(10);
    for (const EpochRecord& e : epochs) {
        os << e.epoch << ',' << e.steps << ',' << e.mean_loss << ',';
        if (e.heldout) {
            os << e.heldout->micro.precision << ',' << e.heldout->micro.recall << ',' << e.heldout->micro.fscore;
        } else {
            os << ",,";
        }
        os << '\n';
    }
}

}  // namespace symmocc
