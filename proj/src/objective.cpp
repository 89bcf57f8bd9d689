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

#include "symmocc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace symmocc {

double bounded_class_weight(double proportion, double eps) {
    if (!(eps > 1.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("class-weight bound eps must exceed 1 (got " + std::to_string(eps) + ")");
    }
    if (!(proportion >= 0.0 && proportion <= 1.0)) {
        throw std::invalid_argument("class proportion must lie in [0, 1] (got " + std::to_string(proportion) + ")");
    }
    return 1.0 / std::log(eps + proportion);
}

namespace {

double occluded_fraction(std::span<const OcclusionMap> maps) {
    std::size_t occ = 0, total = 0;
    for (const OcclusionMap& m : maps) {
        occ += m.count_occluded();
        total += m.labels.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(occ) / static_cast<double>(total);
}

void check_pair(const Var& p, const Tensor& labels, const char* view) {
    if (p->value.shape() != labels.shape()) {
        throw std::invalid_argument(std::string("occlusion_loss: ") + view + " probabilities " +
                                    p->value.shape().str() + " vs labels " + labels.shape().str());
    }
    if (p->value.shape().channels != 1) {
        throw std::invalid_argument(std::string("occlusion_loss: ") + view + " probabilities must have 1 channel");
    }
}

}  // namespace

ClassWeights class_weights(std::span<const OcclusionMap> left, std::span<const OcclusionMap> right, double eps) {
    ClassWeights w;
    w.eps = eps;
    const double ql = occluded_fraction(left);
    w.left_occluded = bounded_class_weight(ql, eps);
    w.left_visible = bounded_class_weight(1.0 - ql, eps);
    const double qr = occluded_fraction(right);
    w.right_occluded = bounded_class_weight(qr, eps);
    w.right_visible = bounded_class_weight(1.0 - qr, eps);
    return w;
}

Var occlusion_loss(const Var& prob_left, const Var& prob_right, const Tensor& labels_left,
                   const Tensor& labels_right, const ClassWeights& w, const LossOptions& opt) {
    if (!prob_left) throw std::invalid_argument("occlusion_loss: missing left probabilities");
    check_pair(prob_left, labels_left, "left");
    if (prob_right) check_pair(prob_right, labels_right, "right");
    const double lo = opt.clamp;
    const double hi = 1.0 - opt.clamp;

    std::size_t pixels = labels_left.size() + (prob_right ? labels_right.size() : 0);
    const double norm = opt.normalize && pixels > 0 ? 1.0 / static_cast<double>(pixels) : 1.0;

    auto term = [&](const Var& p, const Tensor& y, double w_occ, double w_vis) {
        double s = 0;
        const auto pv = p->value.data();
        const auto yv = y.data();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            const double c = std::min(hi, std::max(lo, pv[i]));
            s += yv[i] > 0.5 ? w_occ * std::log(c) : w_vis * std::log(1.0 - c);
        }
        return s;
    };
    double total = term(prob_left, labels_left, w.left_occluded, w.left_visible);
    if (prob_right) total += term(prob_right, labels_right, w.right_occluded, w.right_visible);

    auto node = std::make_shared<Node>();
    node->value = Tensor({1, 1, 1, 1}, -0.5 * norm * total);
    node->inputs.push_back(prob_left);
    if (prob_right) node->inputs.push_back(prob_right);
    node->requires_grad = prob_left->requires_grad || (prob_right && prob_right->requires_grad);

    const Tensor yl = labels_left;
    const Tensor yr = prob_right ? labels_right : Tensor();
    node->propagate = [yl, yr, w, lo, hi, norm](Node& self) {
        const double g = self.grad.data()[0] * -0.5 * norm;
        auto push = [&](Node& p, const Tensor& y, double w_occ, double w_vis) {
            if (!p.requires_grad) return;
            if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
            const auto pv = p.value.data();
            const auto yv = y.data();
            auto gv = p.grad.data();
            for (std::size_t i = 0; i < pv.size(); ++i) {
                if (pv[i] < lo || pv[i] > hi) continue;  // clamped: flat
                gv[i] += yv[i] > 0.5 ? g * w_occ / pv[i] : -g * w_vis / (1.0 - pv[i]);
            }
        };
        push(*self.inputs[0], yl, w.left_occluded, w.left_visible);
        if (self.inputs.size() > 1) push(*self.inputs[1], yr, w.right_occluded, w.right_visible);
    };
    return node;
}

Var mean_abs_error(const Var& prediction, const Tensor& target) {
    if (!prediction || prediction->value.shape() != target.shape()) {
        throw std::invalid_argument("mean_abs_error: prediction/target shape mismatch");
    }
    const auto pv = prediction->value.data();
    const auto tv = target.data();
    double s = 0;
    for (std::size_t i = 0; i < pv.size(); ++i) s += std::abs(pv[i] - tv[i]);
    const double n = static_cast<double>(pv.size());
    auto node = std::make_shared<Node>();
    node->value = Tensor({1, 1, 1, 1}, s / n);
    node->inputs.push_back(prediction);
    node->requires_grad = prediction->requires_grad;
    node->propagate = [target, n](Node& self) {
        Node& p = *self.inputs[0];
        if (!p.requires_grad) return;
        if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
        const double g = self.grad.data()[0] / n;
        const auto pv = p.value.data();
        const auto tv = target.data();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            const double d = pv[i] - tv[i];
            p.grad.data()[i] += d > 0 ? g : (d < 0 ? -g : 0.0);
        }
    };
    return node;
}

}  // namespace symmocc
