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

#include "symmocc/types.hpp"

#include <algorithm>
#include <cmath>

namespace symmocc {

void StereoSample::validate() const {
    const std::size_t w = left_image.width;
    const std::size_t h = left_image.height;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("stereo sample '" + provenance + "': " + what);
    };
    if (right_image.width != w || right_image.height != h) fail("right image size differs from left");
    if (!left_disp.values.same_size(w, h) || !right_disp.values.same_size(w, h)) fail("disparity size differs from image");
    if (left_disp.view != View::Left || right_disp.view != View::Right) fail("disparity views mislabelled");
    for (const DisparityMap* d : {&left_disp, &right_disp}) {
        if (!std::all_of(d->values.values.begin(), d->values.values.end(), [](float v) { return std::isfinite(v); })) {
            fail(std::string("non-finite ") + to_string(d->view) + " disparity");
        }
    }
    if (left_occ && !left_occ->labels.same_size(w, h)) fail("left occlusion size differs");
    if (right_occ && !right_occ->labels.same_size(w, h)) fail("right occlusion size differs");
}

namespace {

template <typename Fn>
Tensor stack_planes(std::size_t n, std::size_t channels, std::size_t w, std::size_t h, Fn&& fill) {
    Tensor t({n, channels, h, w});
    for (std::size_t b = 0; b < n; ++b) fill(b, t);
    return t;
}

}  // namespace

Tensor images_to_tensor(const std::vector<const Image*>& images) {
    if (images.empty()) throw std::invalid_argument("images_to_tensor: empty batch");
    const std::size_t w = images[0]->width, h = images[0]->height;
    return stack_planes(images.size(), 3, w, h, [&](std::size_t b, Tensor& t) {
        const Image& im = *images[b];
        if (im.width != w || im.height != h) throw std::invalid_argument("images_to_tensor: ragged batch");
        std::copy(im.rgb.begin(), im.rgb.end(), t.plane(b, 0));
    });
}

Tensor labels_to_tensor(const std::vector<const OcclusionMap*>& maps) {
    if (maps.empty()) throw std::invalid_argument("labels_to_tensor: empty batch");
    const std::size_t w = maps[0]->width(), h = maps[0]->height();
    return stack_planes(maps.size(), 1, w, h, [&](std::size_t b, Tensor& t) {
        const OcclusionMap& m = *maps[b];
        if (!m.labels.same_size(w, h)) throw std::invalid_argument("labels_to_tensor: ragged batch");
        Real* dst = t.plane(b, 0);
        for (std::size_t i = 0; i < m.labels.size(); ++i) dst[i] = m.labels.values[i] ? 1.0 : 0.0;
    });
}

Tensor disparities_to_tensor(const std::vector<const DisparityMap*>& maps) {
    if (maps.empty()) throw std::invalid_argument("disparities_to_tensor: empty batch");
    const std::size_t w = maps[0]->width(), h = maps[0]->height();
    return stack_planes(maps.size(), 1, w, h, [&](std::size_t b, Tensor& t) {
        const DisparityMap& m = *maps[b];
        if (!m.values.same_size(w, h)) throw std::invalid_argument("disparities_to_tensor: ragged batch");
        Real* dst = t.plane(b, 0);
        for (std::size_t i = 0; i < m.values.size(); ++i) dst[i] = m.values.values[i];
    });
}

ProbabilityMap plane_to_grid(const Tensor& t, std::size_t b, std::size_t c) {
    const Shape s = t.shape();
    ProbabilityMap g(s.width, s.height);
    std::copy_n(t.plane(b, c), s.plane(), g.values.begin());
    return g;
}

}  // namespace symmocc
