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

// Adam training over random crops with per-crop ground truth.
//
// Each epoch visits every sample once in a shuffled order. The order and all
// crop rectangles of an epoch are drawn up front from a generator seeded by
// (seed, epoch), so a run is a pure function of its config and data.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "symmocc/adam.hpp"
#include "symmocc/gtgen.hpp"
#include "symmocc/metrics.hpp"
#include "symmocc/network.hpp"
#include "symmocc/objective.hpp"

namespace symmocc {

struct TrainConfig {
    Variant variant = Variant::SymmNet;
    double channel_scale = 1.0;
    std::uint64_t seed = 0;
    AdamConfig adam;
    std::size_t batch_size = 16;
    std::size_t epochs = 10;
    /// Stops after this many optimizer steps even mid-epoch.
    std::optional<std::size_t> max_steps;
    std::size_t crop_h = 256;
    std::size_t crop_w = 768;
    double class_eps = kClassEpsSynthetic;
    bool normalize_loss = false;
    bool alter_mirror = false;
    GtConfig gt;
    /// Decision threshold for the per-epoch held-out metrics.
    double tau = 0.5;

    void validate() const;
};

struct EpochPlan {
    std::vector<std::size_t> order;
    std::vector<CropRect> crops;  // crops[i] belongs to sample order[i]
};

/// The shuffled order and crop rectangles of one epoch. Crop origins are
/// uniform over every valid position, edges included.
EpochPlan plan_epoch(const std::vector<StereoSample>& samples, const TrainConfig& cfg, std::size_t epoch);

struct EpochRecord {
    std::size_t epoch = 0;
    std::size_t steps = 0;  // cumulative
    double mean_loss = 0.0;
    std::optional<Aggregate> heldout;
};

struct StepRecord {
    double loss = 0.0;
    /// The view supervised on this step; unset when both are.
    std::optional<View> view;
};

struct TrainResult {
    Network network;
    AdamState optimizer;
    std::vector<EpochRecord> epochs;
    std::vector<StepRecord> steps;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Throws on an empty training set or crops larger than a sample.
TrainResult train(const std::vector<StereoSample>& train_set, const std::vector<StereoSample>& heldout,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct Evaluation {
    std::vector<Metrics> left;
    std::vector<Metrics> right;  // empty for single-view variants
    Aggregate left_total;
    std::optional<Aggregate> right_total;
    /// Both views pooled, each view of each sample one image.
    Aggregate pooled;
};

/// Thresholded predictions against ground truth (computed from disparity
/// when a sample carries none). LRCNet goes through the consistency check.
Evaluation evaluate(const Network& net, const std::vector<StereoSample>& samples, double tau,
                    const GtConfig& gt = {});

/// `epoch,steps,mean_loss,precision,recall,fscore` with a header; metric
/// columns are empty without a held-out split.
void write_train_log(std::ostream& os, const std::vector<EpochRecord>& epochs);

}  // namespace symmocc
