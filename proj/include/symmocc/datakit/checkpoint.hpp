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

// Checkpoint container. All integers and floats little-endian:
//
//   "SYMMOCC\0"                     8-byte magic
//   u32 version                     kCheckpointVersion
//   u32 n, n bytes                  variant name
//   f64 channel_scale, u64 seed
//   u8 flags                        bit 0: alter_mirror
//   u32 parameter count, then per parameter:
//     u32 n, n bytes name; u32 dims[4]; f64 values[product(dims)]
//   u8 has_optimizer; if 1:
//     u64 step; per parameter f64 m[...]; per parameter f64 v[...]

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "symmocc/adam.hpp"
#include "symmocc/network.hpp"

namespace symmocc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    Network network;
    std::optional<AdamState> optimizer;
};

std::vector<std::uint8_t> serialize_checkpoint(const Network& net, const AdamState* state = nullptr);
/// Rebuilds the network from its variant tag and overwrites every parameter.
/// Throws on bad magic, version mismatch, parameter names or shapes that do
/// not match the variant, and truncation (reporting the byte offset).
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Network& net, const AdamState* state, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace symmocc
