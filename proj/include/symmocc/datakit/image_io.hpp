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

// Binary netpbm I/O: 8-bit P6 for colour images, 8-bit P5 for occlusion
// masks (255 = occluded, 0 = visible).

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "symmocc/metrics.hpp"
#include "symmocc/types.hpp"

namespace symmocc {

/// Rounds and clamps to [0, 255].
void write_ppm(const Image& image, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

void write_mask(const OcclusionMap& mask, const std::filesystem::path& path);
/// Any byte above 127 reads as occluded.
OcclusionMap read_mask(const std::filesystem::path& path, View view);

using Rgb8 = std::array<std::uint8_t, 3>;

inline constexpr Rgb8 kOverlayTruePositive{0, 255, 255};   // cyan
inline constexpr Rgb8 kOverlayFalseNegative{255, 0, 255};  // magenta
inline constexpr Rgb8 kOverlayFalsePositive{255, 255, 0};  // yellow

/// Error overlay: true positives cyan, false negatives magenta, false
/// positives yellow; true negatives show the darkened base image (or black).
Image error_overlay(const OcclusionMap& pred, const OcclusionMap& gt, const Image* base = nullptr);
/// Recounts an overlay's colour-coded pixels.
Counts count_overlay(const Image& overlay);

}  // namespace symmocc
