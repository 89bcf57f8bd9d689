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

#include "symmocc/gtgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace symmocc {

void GtConfig::validate() const {
    if (!(delta > 0) || !std::isfinite(delta)) {
        throw std::invalid_argument("consistency threshold delta must be positive, got " + std::to_string(delta));
    }
}

BilinearSample bilinear_sample(const DisparityMap& map, double x, double y) {
    const std::size_t w = map.width();
    const std::size_t h = map.height();
    if (w == 0 || h == 0 || !(x >= 0.0) || !(y >= 0.0) || x > static_cast<double>(w - 1) ||
        y > static_cast<double>(h - 1)) {
        return {};
    }
    const auto x0 = static_cast<std::size_t>(std::floor(x));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const std::size_t x1 = x0 + 1 < w ? x0 + 1 : x0;
    const std::size_t y1 = y0 + 1 < h ? y0 + 1 : y0;
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    const auto& v = map.values;
    const double top = (1.0 - fx) * v.at(x0, y0) + fx * v.at(x1, y0);
    const double bottom = (1.0 - fx) * v.at(x0, y1) + fx * v.at(x1, y1);
    return {(1.0 - fy) * top + fy * bottom, true};
}

WarpResult warp_disparity(const DisparityMap& source, const DisparityMap& target) {
    if (!source.values.same_size(target.values)) {
        throw std::invalid_argument("warp_disparity: source " + std::to_string(source.width()) + "x" +
                                    std::to_string(source.height()) + " vs target " + std::to_string(target.width()) +
                                    "x" + std::to_string(target.height()));
    }
    if (source.view == target.view) {
        throw std::invalid_argument("warp_disparity: source and target are both the " +
                                    std::string(to_string(target.view)) + " view");
    }
    const double sign = target.view == View::Left ? -1.0 : 1.0;
    WarpResult r{Grid<double>(target.width(), target.height()), Grid<std::uint8_t>(target.width(), target.height())};
    for (std::size_t y = 0; y < target.height(); ++y) {
        for (std::size_t x = 0; x < target.width(); ++x) {
            const double tx = static_cast<double>(x) + sign * target.values.at(x, y);
            const BilinearSample s = bilinear_sample(source, tx, static_cast<double>(y));
            r.warped.at(x, y) = s.value;
            r.out_of_bounds.at(x, y) = s.in_bounds ? 0 : 1;
        }
    }
    return r;
}

OcclusionMap occlusion_from_disparity(const DisparityMap& target, const WarpResult& warp, const GtConfig& cfg) {
    cfg.validate();
    if (!warp.warped.same_size(target.values) || !warp.out_of_bounds.same_size(target.values)) {
        throw std::invalid_argument("occlusion_from_disparity: warp size does not match disparity");
    }
    OcclusionMap occ(target.view, target.width(), target.height());
    for (std::size_t y = 0; y < target.height(); ++y) {
        for (std::size_t x = 0; x < target.width(); ++x) {
            if (!target.is_valid(x, y)) continue;
            bool o;
            if (warp.out_of_bounds.at(x, y)) {
                o = cfg.oob_is_occluded;
            } else {
                o = std::abs(static_cast<double>(target.values.at(x, y)) - warp.warped.at(x, y)) > cfg.delta;
            }
            occ.labels.at(x, y) = o ? 1 : 0;
        }
    }
    return occ;
}

std::pair<OcclusionMap, OcclusionMap> binocular_occlusion(const DisparityMap& left, const DisparityMap& right,
                                                          const GtConfig& cfg) {
    if (left.view != View::Left || right.view != View::Right) {
        throw std::invalid_argument("binocular_occlusion: expected (left, right) disparity maps");
    }
    return {occlusion_from_disparity(left, warp_disparity(right, left), cfg),
            occlusion_from_disparity(right, warp_disparity(left, right), cfg)};
}

namespace {

template <typename T>
Grid<T> crop_grid(const Grid<T>& g, const CropRect& r) {
    if (g.values.empty()) return g;
    Grid<T> out(r.width, r.height);
    for (std::size_t y = 0; y < r.height; ++y)
        for (std::size_t x = 0; x < r.width; ++x) out.at(x, y) = g.at(r.x + x, r.y + y);
    return out;
}

Image crop_image(const Image& im, const CropRect& r) {
    Image out(r.width, r.height);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < r.height; ++y)
            for (std::size_t x = 0; x < r.width; ++x) out.at(c, x, y) = im.at(c, r.x + x, r.y + y);
    return out;
}

DisparityMap crop_disp(const DisparityMap& d, const CropRect& r) {
    DisparityMap out;
    out.view = d.view;
    out.values = crop_grid(d.values, r);
    out.valid = crop_grid(d.valid, r);
    return out;
}

}  // namespace

void attach_gt(StereoSample& sample, const GtConfig& cfg) {
    auto [l, r] = binocular_occlusion(sample.left_disp, sample.right_disp, cfg);
    sample.left_occ = std::move(l);
    sample.right_occ = std::move(r);
}

StereoSample crop_with_gt(const StereoSample& sample, const CropRect& rect, const GtConfig& cfg) {
    sample.validate();
    if (rect.width == 0 || rect.height == 0 || rect.x + rect.width > sample.width() ||
        rect.y + rect.height > sample.height()) {
        throw std::invalid_argument("crop rect (" + std::to_string(rect.x) + ", " + std::to_string(rect.y) + ", " +
                                    std::to_string(rect.width) + "x" + std::to_string(rect.height) +
                                    ") exceeds sample " + std::to_string(sample.width()) + "x" +
                                    std::to_string(sample.height()));
    }
    if (rect.width % 64 != 0 || rect.height % 64 != 0) {
        throw std::invalid_argument("crop extent " + std::to_string(rect.width) + "x" + std::to_string(rect.height) +
                                    " must be divisible by 64");
    }
    StereoSample out;
    out.left_image = crop_image(sample.left_image, rect);
    out.right_image = crop_image(sample.right_image, rect);
    out.left_disp = crop_disp(sample.left_disp, rect);
    out.right_disp = crop_disp(sample.right_disp, rect);
    const bool whole = rect.x == 0 && rect.y == 0 && rect.width == sample.width() && rect.height == sample.height();
    out.provenance = whole ? sample.provenance
                           : sample.provenance + "@" + std::to_string(rect.x) + "," + std::to_string(rect.y) + "+" +
                                 std::to_string(rect.width) + "x" + std::to_string(rect.height);
    attach_gt(out, cfg);
    return out;
}

}  // namespace symmocc
