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

#pragma once

#include <span>

#include "symmocc/autograd.hpp"
#include "symmocc/types.hpp"

namespace symmocc {

/// Per-view, per-class loss multipliers w = 1 / ln(eps + q).
struct ClassWeights {
    double left_occluded = 1.0;
    double left_visible = 1.0;
    double right_occluded = 1.0;
    double right_visible = 1.0;
    double eps = 1.5;
};

/// Default bounds used for the three training regimes.
inline constexpr double kClassEpsSynthetic = 1.5;
inline constexpr double kClassEpsFineTune = 1.2;
inline constexpr double kClassEpsMotion = 1.01;

/// 1 / ln(eps + q); eps must exceed 1 and q lie in [0, 1].
double bounded_class_weight(double proportion, double eps);

/// Class proportions pooled over the whole batch per view. An empty right
/// span leaves the right weights at their q = 0 / q = 1 defaults of a view
/// that never occurs (they are then unused).
ClassWeights class_weights(std::span<const OcclusionMap> left, std::span<const OcclusionMap> right, double eps);

struct LossOptions {
    /// Probabilities are clamped to [clamp, 1 - clamp] before the log.
    double clamp = 1e-7;
    /// Divide by the number of labelled pixels instead of summing.
    bool normalize = false;
};

/// Class-weighted binocular cross-entropy:
///   L = -1/2 * sum_v [ w_v^o sum_{O_v=1} log P_v + w_v^vis sum_{O_v=0} log(1 - P_v) ].
/// Probabilities and labels are (B, 1, H, W); a null right probability
/// drops the right terms.
Var occlusion_loss(const Var& prob_left, const Var& prob_right, const Tensor& labels_left,
                   const Tensor& labels_right, const ClassWeights& w, const LossOptions& opt = {});

/// Mean absolute error, used when regressing disparity.
Var mean_abs_error(const Var& prediction, const Tensor& target);

}  // namespace symmocc
