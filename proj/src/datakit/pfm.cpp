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

#include "symmocc/datakit/pfm.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace symmocc {

namespace {

std::string next_token(std::istream& in, const char* what) {
    int c = in.get();
    while (c != EOF && std::isspace(c)) c = in.get();
    std::string tok;
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        if (tok.size() > 64) throw std::runtime_error(std::string("pfm: oversized ") + what + " token");
        c = in.get();
    }
    if (tok.empty()) throw std::runtime_error(std::string("pfm: missing ") + what);
    // `c` was the single whitespace separator (or EOF)
    return tok;
}

std::size_t parse_extent(const std::string& tok, const char* what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("pfm: malformed ") + what + " '" + tok + "'");
    }
    if (pos != tok.size() || v <= 0) throw std::runtime_error(std::string("pfm: invalid ") + what + " '" + tok + "'");
    return static_cast<std::size_t>(v);
}

std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

Grid<float> parse_pfm(std::istream& in) {
    const std::string magic = next_token(in, "header");
    if (magic == "PF") throw std::runtime_error("pfm: three-channel 'PF' file where a single-channel map was expected");
    if (magic != "Pf") throw std::runtime_error("pfm: bad magic '" + magic + "'");
    const std::size_t w = parse_extent(next_token(in, "width"), "width");
    const std::size_t h = parse_extent(next_token(in, "height"), "height");
    const std::string scale_tok = next_token(in, "scale");
    double scale = 0;
    try {
        std::size_t pos = 0;
        scale = std::stod(scale_tok, &pos);
        if (pos != scale_tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::runtime_error("pfm: malformed scale '" + scale_tok + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw std::runtime_error("pfm: scale must be non-zero");
    const bool little = scale < 0;
    const bool swap = little != (std::endian::native == std::endian::little);

    Grid<float> g(w, h);
    std::vector<std::uint32_t> row(w);
    for (std::size_t r = 0; r < h; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(w * sizeof(std::uint32_t)));
        if (in.gcount() != static_cast<std::streamsize>(w * sizeof(std::uint32_t))) {
            throw std::runtime_error("pfm: payload truncated at row " + std::to_string(r) + " of " + std::to_string(h));
        }
        const std::size_t y = h - 1 - r;
        for (std::size_t x = 0; x < w; ++x) {
            const std::uint32_t bits = swap ? byteswap32(row[x]) : row[x];
            g.at(x, y) = std::bit_cast<float>(bits);
        }
    }
    return g;
}

void serialize_pfm(const Grid<float>& grid, std::ostream& out) {
    out << "Pf\n" << grid.width << ' ' << grid.height << "\n-1\n";
    const bool swap = std::endian::native != std::endian::little;
    std::vector<std::uint32_t> row(grid.width);
    for (std::size_t r = 0; r < grid.height; ++r) {
        const std::size_t y = grid.height - 1 - r;
        for (std::size_t x = 0; x < grid.width; ++x) {
            const auto bits = std::bit_cast<std::uint32_t>(grid.at(x, y));
            row[x] = swap ? byteswap32(bits) : bits;
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
    }
    if (!out) throw std::runtime_error("pfm: write failed");
}

Grid<float> read_pfm_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return parse_pfm(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_pfm_grid(const Grid<float>& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    serialize_pfm(grid, out);
}

DisparityMap read_pfm(const std::filesystem::path& path, View view) {
    DisparityMap d;
    d.view = view;
    d.values = read_pfm_grid(path);
    return d;
}

void write_pfm(const DisparityMap& map, const std::filesystem::path& path) { write_pfm_grid(map.values, path); }

}  // namespace symmocc
