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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "symmocc/types.hpp"

namespace symmocc {

struct Counts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    Counts& operator+=(const Counts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    bool operator==(const Counts&) const = default;
};

/// Precision is 1 with no positive predictions, recall is 1 with no
/// positive labels, F is 0 when P + R = 0.
struct Metrics {
    Counts counts;
    double precision = 1.0;
    double recall = 1.0;
    double fscore = 1.0;

    static Metrics from_counts(const Counts& c);
};

Metrics prf(const OcclusionMap& pred, const OcclusionMap& gt);

/// Micro = pooled counts; macro = mean of per-image P, R, F.
struct Aggregate {
    Metrics micro;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_fscore = 0.0;
    std::size_t images = 0;
};

Aggregate aggregate(std::span<const Metrics> per_image);

struct PRPoint {
    double tau = 0.0;
    double precision = 1.0;
    double recall = 1.0;
    double fscore = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;

    /// Point with the largest F; the lowest tau wins ties.
    const PRPoint& best() const;
};

/// `steps + 1` evenly spaced thresholds over [0, 1]; 0.01 spacing by default.
std::vector<double> threshold_grid(std::size_t steps = 100);

/// Pooled precision/recall of strict P > tau over every map, per threshold.
/// Thresholds must be strictly increasing within [0, 1].
PRCurve pr_curve(std::span<const ProbabilityMap> probs, std::span<const OcclusionMap> gt,
                 std::span<const double> thresholds);

/// One evaluation unit for the oracle/global protocol (e.g. a video
/// sequence): its frames' probabilities and labels, pooled within the unit.
struct Sequence {
    std::vector<ProbabilityMap> probs;
    std::vector<OcclusionMap> gt;
};

struct OracleGlobal {
    double oracle_f = 0.0;  // mean of per-sequence F at that sequence's best tau
    double global_f = 0.0;  // mean of per-sequence F at tau = 0.5
};

OracleGlobal oracle_global_f(std::span<const Sequence> sequences, std::span<const double> grid = {});

/// Fixed-width table with one row per label.
void write_metrics_table(std::ostream& os, const std::vector<std::pair<std::string, Metrics>>& rows);
/// `key=value` lines.
void write_metrics_kv(std::ostream& os, const std::string& prefix, const Metrics& m);
/// `tau,precision,recall` lines with a header.
void write_pr_csv(std::ostream& os, const PRCurve& curve);

}  // namespace symmocc
