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

#include "symmocc/datakit/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symmocc {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Reads the next header integer, skipping whitespace and '#' comments.
std::size_t header_int(std::istream& in, const std::string& file) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    std::string digits;
    while (c != EOF && std::isdigit(c)) {
        digits.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (digits.empty() || digits.size() > 9) throw std::runtime_error(file + ": malformed netpbm header");
    return std::stoul(digits);
}

struct Raster {
    std::size_t width, height;
    std::vector<std::uint8_t> bytes;
};

Raster read_netpbm(const std::filesystem::path& path, const char* magic, std::size_t channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char m[2] = {0, 0};
    in.read(m, 2);
    if (in.gcount() != 2 || m[0] != magic[0] || m[1] != magic[1]) {
        throw std::runtime_error(path.string() + ": expected a binary '" + magic + "' netpbm file");
    }
    Raster r;
    r.width = header_int(in, path.string());
    r.height = header_int(in, path.string());
    const std::size_t maxval = header_int(in, path.string());
    if (r.width == 0 || r.height == 0 || maxval != 255) {
        throw std::runtime_error(path.string() + ": only non-empty 8-bit images are supported");
    }
    r.bytes.resize(r.width * r.height * channels);
    in.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(r.bytes.size())) {
        throw std::runtime_error(path.string() + ": truncated pixel data");
    }
    return r;
}

void write_netpbm(const std::filesystem::path& path, const char* magic, std::size_t w, std::size_t h,
                  const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    out << magic << '\n' << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_ppm(const Image& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(3 * image.width * image.height);
    for (std::size_t y = 0; y < image.height; ++y)
        for (std::size_t x = 0; x < image.width; ++x)
            for (std::size_t c = 0; c < 3; ++c) bytes[3 * (y * image.width + x) + c] = to_byte(image.at(c, x, y));
    write_netpbm(path, "P6", image.width, image.height, bytes);
}

Image read_ppm(const std::filesystem::path& path) {
    const Raster r = read_netpbm(path, "P6", 3);
    Image im(r.width, r.height);
    for (std::size_t y = 0; y < r.height; ++y)
        for (std::size_t x = 0; x < r.width; ++x)
            for (std::size_t c = 0; c < 3; ++c) im.at(c, x, y) = r.bytes[3 * (y * r.width + x) + c];
    return im;
}

void write_mask(const OcclusionMap& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(mask.labels.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.labels.values[i] ? 255 : 0;
    write_netpbm(path, "P5", mask.width(), mask.height(), bytes);
}

OcclusionMap read_mask(const std::filesystem::path& path, View view) {
    const Raster r = read_netpbm(path, "P5", 1);
    OcclusionMap m(view, r.width, r.height);
    for (std::size_t i = 0; i < r.bytes.size(); ++i) m.labels.values[i] = r.bytes[i] > 127 ? 1 : 0;
    return m;
}

Image error_overlay(const OcclusionMap& pred, const OcclusionMap& gt, const Image* base) {
    if (!pred.labels.same_size(gt.labels)) throw std::invalid_argument("error_overlay: mask sizes differ");
    if (base && (base->width != gt.width() || base->height != gt.height())) {
        throw std::invalid_argument("error_overlay: base image size differs from masks");
    }
    Image out(gt.width(), gt.height());
    for (std::size_t y = 0; y < gt.height(); ++y) {
        for (std::size_t x = 0; x < gt.width(); ++x) {
            const bool p = pred.labels.at(x, y) != 0;
            const bool g = gt.labels.at(x, y) != 0;
            const Rgb8* colour = nullptr;
            if (p && g) colour = &kOverlayTruePositive;
            else if (g) colour = &kOverlayFalseNegative;
            else if (p) colour = &kOverlayFalsePositive;
            for (std::size_t c = 0; c < 3; ++c) {
                if (colour) {
                    out.at(c, x, y) = (*colour)[c];
                } else {
                    // at most 102 per channel, never an overlay colour
                    out.at(c, x, y) = base ? std::floor(base->at(c, x, y) * 0.4) : 0.0;
                }
            }
        }
    }
    return out;
}

Counts count_overlay(const Image& overlay) {
    Counts c;
    for (std::size_t y = 0; y < overlay.height; ++y) {
        for (std::size_t x = 0; x < overlay.width; ++x) {
            const Rgb8 px{to_byte(overlay.at(0, x, y)), to_byte(overlay.at(1, x, y)), to_byte(overlay.at(2, x, y))};
            if (px == kOverlayTruePositive) ++c.tp;
            else if (px == kOverlayFalseNegative) ++c.fn;
            else if (px == kOverlayFalsePositive) ++c.fp;
            else ++c.tn;
        }
    }
    return c;
}

}  // namespace symmocc
