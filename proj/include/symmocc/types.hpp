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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symmocc/tensor.hpp"

namespace symmocc {

enum class View { Left, Right };

inline View other(View v) { return v == View::Left ? View::Right : View::Left; }
inline const char* to_string(View v) { return v == View::Left ? "left" : "right"; }

/// Row-major single-channel raster, indexed (x, y).
template <typename T>
struct Grid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<T> values;

    Grid() = default;
    Grid(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), values(w * h, fill) {}

    T& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
    const T& at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
    std::size_t size() const { return values.size(); }
    bool same_size(std::size_t w, std::size_t h) const { return width == w && height == h; }
    template <typename U>
    bool same_size(const Grid<U>& o) const {
        return width == o.width && height == o.height;
    }
    bool operator==(const Grid&) const = default;
};

/// Per-pixel disparity in pixels. Left pixel (x, y) corresponds to right
/// pixel (x - d, y); right pixel (x, y) to left pixel (x + d, y).
struct DisparityMap {
    View view = View::Left;
    Grid<float> values;
    Grid<std::uint8_t> valid;  // empty means all-valid

    DisparityMap() = default;
    DisparityMap(View v, std::size_t w, std::size_t h, float fill = 0.0f) : view(v), values(w, h, fill) {}

    std::size_t width() const { return values.width; }
    std::size_t height() const { return values.height; }
    bool is_valid(std::size_t x, std::size_t y) const { return valid.values.empty() || valid.at(x, y) != 0; }
    bool operator==(const DisparityMap&) const = default;
};

/// Binary label per pixel, 1 = occluded.
struct OcclusionMap {
    View view = View::Left;
    Grid<std::uint8_t> labels;

    OcclusionMap() = default;
    OcclusionMap(View v, std::size_t w, std::size_t h) : view(v), labels(w, h, 0) {}

    std::size_t width() const { return labels.width; }
    std::size_t height() const { return labels.height; }
    std::size_t count_occluded() const {
        std::size_t n = 0;
        for (auto l : labels.values) n += l != 0;
        return n;
    }
    bool operator==(const OcclusionMap&) const = default;
};

using ProbabilityMap = Grid<double>;

/// Planar RGB image with values in [0, 255].
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> rgb;  // 3 planes of width*height

    Image() = default;
    Image(std::size_t w, std::size_t h) : width(w), height(h), rgb(3 * w * h, 0.0) {}

    double& at(std::size_t c, std::size_t x, std::size_t y) { return rgb[(c * height + y) * width + x]; }
    double at(std::size_t c, std::size_t x, std::size_t y) const { return rgb[(c * height + y) * width + x]; }
    bool operator==(const Image&) const = default;
};

struct StereoSample {
    Image left_image;
    Image right_image;
    DisparityMap left_disp;
    DisparityMap right_disp;
    std::optional<OcclusionMap> left_occ;
    std::optional<OcclusionMap> right_occ;
    std::string provenance;

    std::size_t width() const { return left_image.width; }
    std::size_t height() const { return left_image.height; }
    /// Throws when the components disagree on size or disparities are non-finite.
    void validate() const;
    bool operator==(const StereoSample&) const = default;
};

/// Stacks images into a (B, 3, H, W) tensor of raw [0, 255] values.
Tensor images_to_tensor(const std::vector<const Image*>& images);
/// Stacks occlusion maps into a (B, 1, H, W) tensor of 0/1 labels.
Tensor labels_to_tensor(const std::vector<const OcclusionMap*>& maps);
/// Stacks disparity maps into a (B, 1, H, W) tensor.
Tensor disparities_to_tensor(const std::vector<const DisparityMap*>& maps);
/// Channel `c` of batch item `b` as a grid.
ProbabilityMap plane_to_grid(const Tensor& t, std::size_t b, std::size_t c);

}  // namespace symmocc
