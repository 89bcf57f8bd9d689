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

#include "symmocc/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace symmocc {

AdamState AdamState::for_parameters(std::span<Parameter* const> params) {
    AdamState s;
    for (const Parameter* p : params) {
        s.m.emplace_back(p->value.shape());
        s.v.emplace_back(p->value.shape());
    }
    return s;
}

bool AdamState::operator==(const AdamState& o) const {
    if (step != o.step || m.size() != o.m.size() || v.size() != o.v.size()) return false;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].shape() != o.m[i].shape() || m[i].values() != o.m[i].values()) return false;
        if (v[i].shape() != o.v[i].shape() || v[i].values() != o.v[i].values()) return false;
    }
    return true;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& cfg) {
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("adam_step: optimizer state holds " + std::to_string(state.m.size()) +
                                    " moments for " + std::to_string(params.size()) + " parameters");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        if (p.grad.shape() != p.value.shape() || state.m[k].shape() != p.value.shape()) {
            throw std::invalid_argument("adam_step: shape mismatch for parameter '" + p.name + "'");
        }
        auto w = p.value.data();
        const auto g = p.grad.data();
        auto m = state.m[k].data();
        auto v = state.v[k].data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mh = m[i] / c1;
            const double vh = v[i] / c2;
            w[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
        }
    }
}

}  // namespace symmocc
