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

// Single-channel Portable Float Map I/O.
//
//   Pf\n<width> <height>\n<scale>\n<float32 * width * height>
//
// A negative scale marks a little-endian payload, positive big-endian. Rows
// are stored bottom-to-top. Three-channel "PF" files are rejected.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "symmocc/types.hpp"

namespace symmocc {

Grid<float> parse_pfm(std::istream& in);
/// Always writes a little-endian payload (scale -1).
void serialize_pfm(const Grid<float>& grid, std::ostream& out);

Grid<float> read_pfm_grid(const std::filesystem::path& path);
void write_pfm_grid(const Grid<float>& grid, const std::filesystem::path& path);

DisparityMap read_pfm(const std::filesystem::path& path, View view);
void write_pfm(const DisparityMap& map, const std::filesystem::path& path);

}  // namespace symmocc
