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

// Piecewise fronto-parallel stereo scenes with exact visibility.
//
// Shapes are defined in left-image coordinates (pixel centres at integer
// positions) over an infinite background plane. A surface with disparity d
// appears in the right image shifted by -d. Larger disparity is nearer and
// wins the z-buffer in both views.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "symmocc/types.hpp"

namespace symmocc {

enum class ShapeKind { Rectangle, Ellipse };

struct SceneShape {
    ShapeKind kind = ShapeKind::Rectangle;
    /// Rectangle: [cx - half_width, cx + half_width) x [cy - half_height,
    /// cy + half_height). Ellipse: strict interior.
    double cx = 0, cy = 0;
    double half_width = 0, half_height = 0;
    float disparity = 0;
    std::array<double, 3> color{128, 128, 128};

    bool covers(double x, double y) const;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    float background_disparity = 0;
    std::array<double, 3> background_color{100, 100, 100};
    std::vector<SceneShape> shapes;
    /// Seeded per-surface colour noise; flat colours when off.
    bool textured = true;
    double texture_amplitude = 45.0;

    /// Throws on negative or >= width/2 disparities, shapes not in front
    /// of the background, or overlapping shapes of equal disparity.
    void validate() const;
    /// Left-right mirror: shapes reflected about the vertical centre line;
    /// rendering it swaps and flips the two views.
    SceneSpec mirrored() const;
};

struct SynthResult {
    StereoSample sample;  // occlusion left unset; see gtgen
    OcclusionMap oracle_left;
    OcclusionMap oracle_right;
};

/// Z-buffer rendering plus exact visibility: a pixel is occluded iff its
/// correspondence falls outside [0, W-1] or is covered by a nearer surface.
SynthResult synth_scene(const SceneSpec& spec);

struct RandomSceneOptions {
    std::size_t min_shapes = 1;
    std::size_t max_shapes = 3;
    float min_background = 1.0f;
    float max_background = 6.0f;
    /// Minimum disparity step between distinct surfaces.
    float min_gap = 2.5f;
    float max_disparity = 24.0f;
    bool integer_disparities = false;
    bool allow_ellipses = true;
    bool textured = true;
};

SceneSpec random_scene_spec(std::uint64_t seed, std::size_t width, std::size_t height,
                            const RandomSceneOptions& options = {});

}  // namespace symmocc
