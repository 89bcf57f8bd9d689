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
#include <span>
#include <vector>

#include "symmocc/autograd.hpp"

namespace symmocc {

struct AdamConfig {
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
};

/// First/second moment per parameter, same order and shapes as the
/// parameter list it was created for.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::uint64_t step = 0;

    static AdamState for_parameters(std::span<Parameter* const> params);
    bool operator==(const AdamState& o) const;
};

/// One bias-corrected Adam update using each parameter's grad.
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& cfg);

}  // namespace symmocc
