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

#include "symmocc/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace symmocc {

Metrics Metrics::from_counts(const Counts& c) {
    Metrics m;
    m.counts = c;
    m.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double s = m.precision + m.recall;
    m.fscore = s == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / s;
    return m;
}

Metrics prf(const OcclusionMap& pred, const OcclusionMap& gt) {
    if (!pred.labels.same_size(gt.labels)) {
        throw std::invalid_argument("prf: prediction " + std::to_string(pred.width()) + "x" +
                                    std::to_string(pred.height()) + " vs ground truth " + std::to_string(gt.width()) +
                                    "x" + std::to_string(gt.height()));
    }
    Counts c;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const bool p = pred.labels.values[i] != 0;
        const bool g = gt.labels.values[i] != 0;
        if (p && g) ++c.tp;
        else if (p) ++c.fp;
        else if (g) ++c.fn;
        else ++c.tn;
    }
    return Metrics::from_counts(c);
}

Aggregate aggregate(std::span<const Metrics> per_image) {
    Aggregate a;
    a.images = per_image.size();
    Counts pooled;
    for (const Metrics& m : per_image) {
        pooled += m.counts;
        a.macro_precision += m.precision;
        a.macro_recall += m.recall;
        a.macro_fscore += m.fscore;
    }
    a.micro = Metrics::from_counts(pooled);
    if (!per_image.empty()) {
        const auto n = static_cast<double>(per_image.size());
        a.macro_precision /= n;
        a.macro_recall /= n;
        a.macro_fscore /= n;
    }
    return a;
}

const PRPoint& PRCurve::best() const {
    if (points.empty()) throw std::logic_error("PRCurve::best on an empty curve");
    const PRPoint* b = &points.front();
    for (const PRPoint& p : points) {
        if (p.fscore > b->fscore) b = &p;
    }
    return *b;
}

std::vector<double> threshold_grid(std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("threshold_grid: need at least one step");
    std::vector<double> g(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) g[i] = static_cast<double>(i) / static_cast<double>(steps);
    return g;
}

namespace {

Counts counts_at(std::span<const ProbabilityMap> probs, std::span<const OcclusionMap> gt, double tau) {
    Counts c;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const auto& pv = probs[k].values;
        const auto& gv = gt[k].labels.values;
        for (std::size_t i = 0; i < pv.size(); ++i) {
            const bool p = pv[i] > tau;
            const bool g = gv[i] != 0;
            if (p && g) ++c.tp;
            else if (p) ++c.fp;
            else if (g) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

void check_inputs(std::span<const ProbabilityMap> probs, std::span<const OcclusionMap> gt) {
    if (probs.size() != gt.size()) throw std::invalid_argument("pr_curve: probability/label count mismatch");
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (!gt[k].labels.same_size(probs[k])) throw std::invalid_argument("pr_curve: map size mismatch");
    }
}

}  // namespace

PRCurve pr_curve(std::span<const ProbabilityMap> probs, std::span<const OcclusionMap> gt,
                 std::span<const double> thresholds) {
    check_inputs(probs, gt);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0 || thresholds[i] > 1.0 || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
            throw std::invalid_argument("pr_curve: thresholds must be strictly increasing within [0, 1]");
        }
    }
    PRCurve curve;
    for (double tau : thresholds) {
        const Metrics m = Metrics::from_counts(counts_at(probs, gt, tau));
        curve.points.push_back({tau, m.precision, m.recall, m.fscore});
    }
    return curve;
}

OracleGlobal oracle_global_f(std::span<const Sequence> sequences, std::span<const double> grid) {
    if (sequences.empty()) throw std::invalid_argument("oracle_global_f: need at least one sequence");
    std::vector<double> taus = grid.empty() ? threshold_grid() : std::vector<double>(grid.begin(), grid.end());
    // the global threshold is always a candidate for the oracle search
    if (std::find(taus.begin(), taus.end(), 0.5) == taus.end()) {
        taus.push_back(0.5);
        std::sort(taus.begin(), taus.end());
    }
    OracleGlobal r;
    for (const Sequence& s : sequences) {
        const PRCurve c = pr_curve(s.probs, s.gt, taus);
        r.oracle_f += c.best().fscore;
        r.global_f += Metrics::from_counts(counts_at(s.probs, s.gt, 0.5)).fscore;
    }
    r.oracle_f /= static_cast<double>(sequences.size());
    r.global_f /= static_cast<double>(sequences.size());
    return r;
}

void write_metrics_table(std::ostream& os, const std::vector<std::pair<std::string, Metrics>>& rows) {
    os << std::left << std::setw(16) << "set" << std::right << std::setw(11) << "precision" << std::setw(11)
       << "recall" << std::setw(11) << "fscore" << std::setw(10) << "tp" << std::setw(10) << "fp" << std::setw(10)
       << "fn" << std::setw(12) << "tn" << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& [label, m] : rows) {
        os << std::left << std::setw(16) << label << std::right << std::setw(11) << m.precision << std::setw(11)
           << m.recall << std::setw(11) << m.fscore << std::setw(10) << m.counts.tp << std::setw(10) << m.counts.fp
           << std::setw(10) << m.counts.fn << std::setw(12) << m.counts.tn << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

void write_metrics_kv(std::ostream& os, const std::string& prefix, const Metrics& m) {
    os << std::setprecision(17);
    os << prefix << "precision=" << m.precision << '\n'
       << prefix << "recall=" << m.recall << '\n'
       << prefix << "fscore=" << m.fscore << '\n'
       << prefix << "tp=" << m.counts.tp << '\n'
       << prefix << "fp=" << m.counts.fp << '\n'
       << prefix << "fn=" << m.counts.fn << '\n'
       << prefix << "tn=" << m.counts.tn << '\n';
}

void write_pr_csv(std::ostream& os, const PRCurve& curve) {
    os << "tau,precision,recall\n" << std::setprecision(10);
    for (const PRPoint& p : curve.points) os << p.tau << ',' << p.precision << ',' << p.recall << '\n';
}

}  // namespace symmocc
