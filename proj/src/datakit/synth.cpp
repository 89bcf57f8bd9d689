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

#include "symmocc/datakit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace symmocc {

bool SceneShape::covers(double x, double y) const {
    if (kind == ShapeKind::Rectangle) {
        return x >= cx - half_width && x < cx + half_width && y >= cy - half_height && y < cy + half_height;
    }
    const double u = (x - cx) / half_width;
    const double v = (y - cy) / half_height;
    return u * u + v * v < 1.0;
}

void SceneSpec::validate() const {
    if (width == 0 || height == 0) throw std::invalid_argument("scene: empty image size");
    const double limit = static_cast<double>(width) / 2.0;
    auto check = [&](float d, const std::string& what) {
        if (!std::isfinite(d) || d < 0.0f || d >= limit) {
            throw std::invalid_argument("scene: " + what + " disparity " + std::to_string(d) + " outside [0, " +
                                        std::to_string(limit) + ")");
        }
    };
    check(background_disparity, "background");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const SceneShape& s = shapes[i];
        check(s.disparity, "shape " + std::to_string(i));
        if (!(s.half_width > 0 && s.half_height > 0)) throw std::invalid_argument("scene: degenerate shape");
        if (s.disparity <= background_disparity) {
            throw std::invalid_argument("scene: shape " + std::to_string(i) + " is not in front of the background");
        }
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        for (std::size_t j = i + 1; j < shapes.size(); ++j) {
            if (shapes[i].disparity != shapes[j].disparity) continue;
            for (std::size_t y = 0; y < height; ++y) {
                for (std::size_t x = 0; x < width; ++x) {
                    const auto fx = static_cast<double>(x), fy = static_cast<double>(y);
                    if (shapes[i].covers(fx, fy) && shapes[j].covers(fx, fy)) {
                        throw std::invalid_argument("scene: shapes " + std::to_string(i) + " and " +
                                                    std::to_string(j) +
                                                    " overlap at equal disparity (ambiguous z-order)");
                    }
                }
            }
        }
    }
}

SceneSpec SceneSpec::mirrored() const {
    SceneSpec m = *this;
    const double w1 = static_cast<double>(width) - 1.0;
    for (SceneShape& s : m.shapes) s.cx = w1 - s.cx + s.disparity;
    return m;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Lattice noise in [-1, 1], linear along x between integer lattice points.
double lattice(std::uint64_t key, double u, long long iy) {
    const double fu = std::floor(u);
    const auto iu = static_cast<long long>(fu);
    auto at = [&](long long ix) {
        std::uint64_t h = splitmix(key ^ splitmix(static_cast<std::uint64_t>(ix) * 0x100000001b3ull) ^
                                   splitmix(static_cast<std::uint64_t>(iy) + 0x51ed27ull));
        return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    };
    const double t = u - fu;
    return (1.0 - t) * at(iu) + t * at(iu + 1);
}

struct Surface {
    float disparity;
    std::array<double, 3> color;
    const SceneShape* shape;  // null for the background
    std::uint64_t key;
};

class Renderer {
public:
    explicit Renderer(const SceneSpec& spec) : spec_(spec) {
        surfaces_.push_back({spec.background_disparity, spec.background_color, nullptr, splitmix(spec.seed)});
        for (std::size_t i = 0; i < spec.shapes.size(); ++i) {
            const SceneShape& s = spec.shapes[i];
            surfaces_.push_back({s.disparity, s.color, &s, splitmix(spec.seed ^ splitmix(i + 1))});
        }
    }

    /// Nearest surface at left-image position (x, y).
    const Surface& visible_left(double x, double y) const {
        const Surface* best = &surfaces_[0];
        for (const Surface& s : surfaces_) {
            if (s.shape && s.shape->covers(x, y) && s.disparity > best->disparity) best = &s;
        }
        return *best;
    }

    /// Nearest surface at right-image position (x, y).
    const Surface& visible_right(double x, double y) const {
        const Surface* best = &surfaces_[0];
        for (const Surface& s : surfaces_) {
            if (s.shape && s.shape->covers(x + s.disparity, y) && s.disparity > best->disparity) best = &s;
        }
        return *best;
    }

    /// Surface colour at left-image coordinates (u, y) of that surface.
    double shade(const Surface& s, std::size_t channel, double u, std::size_t y) const {
        double v = s.color[channel];
        if (spec_.textured) {
            const std::uint64_t k = s.key ^ splitmix(channel + 17);
            const auto iy = static_cast<long long>(y);
            const double fine = lattice(k, u, iy);
            const double coarse = lattice(splitmix(k), u / 4.0, iy / 4);
            v += spec_.texture_amplitude * (0.6 * fine + 0.4 * coarse);
        }
        // integral so 8-bit image files round-trip exactly
        return std::round(std::clamp(v, 0.0, 255.0));
    }

private:
    const SceneSpec& spec_;
    std::vector<Surface> surfaces_;
};

}  // namespace

SynthResult synth_scene(const SceneSpec& spec) {
    spec.validate();
    const std::size_t w = spec.width, h = spec.height;
    const double xmax = static_cast<double>(w) - 1.0;
    Renderer r(spec);

    SynthResult out;
    StereoSample& s = out.sample;
    s.left_image = Image(w, h);
    s.right_image = Image(w, h);
    s.left_disp = DisparityMap(View::Left, w, h);
    s.right_disp = DisparityMap(View::Right, w, h);
    s.provenance = "synthetic:seed=" + std::to_string(spec.seed);
    out.oracle_left = OcclusionMap(View::Left, w, h);
    out.oracle_right = OcclusionMap(View::Right, w, h);

    for (std::size_t y = 0; y < h; ++y) {
        const auto fy = static_cast<double>(y);
        for (std::size_t x = 0; x < w; ++x) {
            const auto fx = static_cast<double>(x);

            const Surface& sl = r.visible_left(fx, fy);
            s.left_disp.values.at(x, y) = sl.disparity;
            for (std::size_t c = 0; c < 3; ++c) s.left_image.at(c, x, y) = r.shade(sl, c, fx, y);
            const double xr = fx - sl.disparity;
            const bool left_occ = xr < 0.0 || xr > xmax || r.visible_right(xr, fy).disparity > sl.disparity;
            out.oracle_left.labels.at(x, y) = left_occ ? 1 : 0;

            const Surface& sr = r.visible_right(fx, fy);
            s.right_disp.values.at(x, y) = sr.disparity;
            const double xl = fx + sr.disparity;
            for (std::size_t c = 0; c < 3; ++c) s.right_image.at(c, x, y) = r.shade(sr, c, xl, y);
            const bool right_occ = xl < 0.0 || xl > xmax || r.visible_left(xl, fy).disparity > sr.disparity;
            out.oracle_right.labels.at(x, y) = right_occ ? 1 : 0;
        }
    }
    return out;
}

SceneSpec random_scene_spec(std::uint64_t seed, std::size_t width, std::size_t height,
                            const RandomSceneOptions& opt) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto quant = [&](double d) { return static_cast<float>(opt.integer_disparities ? std::round(d) : d); };

    SceneSpec spec;
    spec.seed = seed;
    spec.width = width;
    spec.height = height;
    spec.textured = opt.textured;
    const double limit = std::min<double>(opt.max_disparity, static_cast<double>(width) / 2.0 - 1.0);
    spec.background_disparity = quant(uni(opt.min_background, opt.max_background));
    for (auto& c : spec.background_color) c = uni(40, 215);

    const auto n = std::uniform_int_distribution<std::size_t>(opt.min_shapes, opt.max_shapes)(rng);
    double d = spec.background_disparity;
    const auto W = static_cast<double>(width), H = static_cast<double>(height);
    for (std::size_t i = 0; i < n; ++i) {
        const double next = quant(d + uni(opt.min_gap, opt.min_gap + 4.0));
        if (next >= limit || next - d < opt.min_gap - 1e-6) break;
        d = next;
        SceneShape s;
        s.kind = opt.allow_ellipses && uni(0, 1) < 0.4 ? ShapeKind::Ellipse : ShapeKind::Rectangle;
        s.half_width = uni(0.08 * W, 0.22 * W);
        s.half_height = uni(0.12 * H, 0.3 * H);
        s.cx = uni(0.1 * W, 0.9 * W);
        s.cy = uni(0.1 * H, 0.9 * H);
        s.disparity = static_cast<float>(d);
        for (auto& c : s.color) c = uni(30, 225);
        spec.shapes.push_back(s);
    }
    return spec;
}

}  // namespace symmocc
