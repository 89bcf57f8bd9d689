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

// Dataset directories.
//
// A dataset is a directory of per-sample files named
//   <id>_left.ppm  <id>_right.ppm  <id>_left.pfm  <id>_right.pfm
// plus optional masks <id>_left_occ.pgm and <id>_right_occ.pgm. An optional
// manifest.txt lists the samples explicitly, one tab-separated line each:
//   id  left_image  right_image  left_disp  right_disp  left_occ  right_occ
// with paths relative to the directory and "-" for an absent mask. Lines
// starting with '#' are comments.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "symmocc/types.hpp"

namespace symmocc {

inline constexpr const char* kManifestFile = "manifest.txt";

struct ManifestEntry {
    std::string id;
    std::filesystem::path left_image;
    std::filesystem::path right_image;
    std::filesystem::path left_disp;
    std::filesystem::path right_disp;
    std::optional<std::filesystem::path> left_occ;
    std::optional<std::filesystem::path> right_occ;

    bool operator==(const ManifestEntry&) const = default;
};

/// Sorted by id. Reads manifest.txt when present, otherwise scans for the
/// naming convention. Throws when the directory or a referenced file is
/// missing.
std::vector<ManifestEntry> manifest(const std::filesystem::path& dir);

/// Writes manifest.txt with paths relative to `dir`.
void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestEntry>& entries);

StereoSample load_sample(const ManifestEntry& entry);
/// Writes the sample's files under the naming convention.
ManifestEntry save_sample(const StereoSample& sample, const std::filesystem::path& dir, const std::string& id);

std::vector<StereoSample> load_dataset(const std::filesystem::path& dir);

}  // namespace symmocc
