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

// Occlusion ground truth from dense binocular disparity via a left-right
// consistency check. A pixel of view v is occluded when its own disparity
// disagrees by more than delta with the other view's disparity sampled
// (bilinearly) at its correspondence, or when that correspondence leaves the
// image. The same routine is the LRC baseline when fed estimated disparity.

#pragma once

#include <cstddef>
#include <utility>

#include "symmocc/types.hpp"

namespace symmocc {

struct GtConfig {
    double delta = 1.0;
    bool oob_is_occluded = true;

    void validate() const;
};

struct BilinearSample {
    double value = 0.0;
    bool in_bounds = false;
};

/// Four-neighbour interpolation; in_bounds is false outside [0, W-1] x [0, H-1]
/// and the value is then 0.
BilinearSample bilinear_sample(const DisparityMap& map, double x, double y);

struct WarpResult {
    Grid<double> warped;
    Grid<std::uint8_t> out_of_bounds;
};

/// Samples `source` (view v') at each pixel's correspondence under
/// `target` (view v): x - D(p) for a left target, x + D(p) for a right one.
WarpResult warp_disparity(const DisparityMap& source, const DisparityMap& target);

/// Thresholded consistency check for the target view. Pixels flagged invalid
/// in `target` are labelled visible.
OcclusionMap occlusion_from_disparity(const DisparityMap& target, const WarpResult& warp, const GtConfig& cfg);

/// Both views' occlusion in one call.
std::pair<OcclusionMap, OcclusionMap> binocular_occlusion(const DisparityMap& left, const DisparityMap& right,
                                                          const GtConfig& cfg = {});

struct CropRect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t width = 0;
    std::size_t height = 0;

    bool operator==(const CropRect&) const = default;
};

/// Crops both views identically and recomputes occlusion on the cropped
/// disparities, so correspondences that leave the crop become occlusion.
/// Requires the rect to lie within the sample and have 64-divisible extents.
StereoSample crop_with_gt(const StereoSample& sample, const CropRect& rect, const GtConfig& cfg = {});

/// Fills left_occ/right_occ from the sample's disparities.
void attach_gt(StereoSample& sample, const GtConfig& cfg = {});

}  // namespace symmocc
