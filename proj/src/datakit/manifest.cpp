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

#include "symmocc/datakit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "symmocc/datakit/image_io.hpp"
#include "symmocc/datakit/pfm.hpp"

namespace fs = std::filesystem;

namespace symmocc {

namespace {

constexpr const char* kHeader = "# id\tleft_image\tright_image\tleft_disp\tright_disp\tleft_occ\tright_occ";

void require_file(const fs::path& p, const std::string& id) {
    if (!fs::is_regular_file(p)) throw std::runtime_error("sample '" + id + "': missing file " + p.string());
}

void check_entry(const ManifestEntry& e) {
    for (const fs::path* p : {&e.left_image, &e.right_image, &e.left_disp, &e.right_disp}) require_file(*p, e.id);
    if (e.left_occ) require_file(*e.left_occ, e.id);
    if (e.right_occ) require_file(*e.right_occ, e.id);
}

std::vector<ManifestEntry> read_manifest_file(const fs::path& dir) {
    const fs::path file = dir / kManifestFile;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        if (cols.size() != 5 && cols.size() != 7) {
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": expected 5 or 7 tab-separated columns, got " +
                                     std::to_string(cols.size()));
        }
        ManifestEntry e;
        e.id = cols[0];
        e.left_image = dir / cols[1];
        e.right_image = dir / cols[2];
        e.left_disp = dir / cols[3];
        e.right_disp = dir / cols[4];
        if (cols.size() == 7) {
            if (cols[5] != "-") e.left_occ = dir / cols[5];
            if (cols[6] != "-") e.right_occ = dir / cols[6];
        }
        out.push_back(std::move(e));
    }
    return out;
}

bool strip_suffix(const std::string& name, const std::string& suffix, std::string& id) {
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
        return false;
    }
    id = name.substr(0, name.size() - suffix.size());
    return true;
}

std::vector<ManifestEntry> scan(const fs::path& dir) {
    std::map<std::string, ManifestEntry> found;
    for (const auto& de : fs::directory_iterator(dir)) {
        if (!de.is_regular_file()) continue;
        std::string id;
        if (strip_suffix(de.path().filename().string(), "_left.ppm", id)) found[id].id = id;
    }
    std::vector<ManifestEntry> out;
    for (auto& [id, e] : found) {
        e.left_image = dir / (id + "_left.ppm");
        e.right_image = dir / (id + "_right.ppm");
        e.left_disp = dir / (id + "_left.pfm");
        e.right_disp = dir / (id + "_right.pfm");
        if (fs::exists(dir / (id + "_left_occ.pgm"))) e.left_occ = dir / (id + "_left_occ.pgm");
        if (fs::exists(dir / (id + "_right_occ.pgm"))) e.right_occ = dir / (id + "_right_occ.pgm");
        out.push_back(std::move(e));
    }
    return out;
}

std::string relative_to(const fs::path& p, const fs::path& dir) { return fs::relative(p, dir).generic_string(); }

}  // namespace

std::vector<ManifestEntry> manifest(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("dataset directory not found: " + dir.string());
    std::vector<ManifestEntry> entries =
        fs::exists(dir / kManifestFile) ? read_manifest_file(dir) : scan(dir);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].id == entries[i - 1].id) throw std::runtime_error("duplicate sample id '" + entries[i].id + "'");
    }
    for (const ManifestEntry& e : entries) check_entry(e);
    return entries;
}

void write_manifest(const fs::path& dir, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(dir / kManifestFile);
    if (!out) throw std::runtime_error("cannot create " + (dir / kManifestFile).string());
    out << kHeader << '\n';
    for (const ManifestEntry& e : entries) {
        out << e.id << '\t' << relative_to(e.left_image, dir) << '\t' << relative_to(e.right_image, dir) << '\t'
            << relative_to(e.left_disp, dir) << '\t' << relative_to(e.right_disp, dir) << '\t'
            << (e.left_occ ? relative_to(*e.left_occ, dir) : "-") << '\t'
            << (e.right_occ ? relative_to(*e.right_occ, dir) : "-") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + (dir / kManifestFile).string());
}

StereoSample load_sample(const ManifestEntry& e) {
    StereoSample s;
    s.left_image = read_ppm(e.left_image);
    s.right_image = read_ppm(e.right_image);
    s.left_disp = read_pfm(e.left_disp, View::Left);
    s.right_disp = read_pfm(e.right_disp, View::Right);
    if (e.left_occ) s.left_occ = read_mask(*e.left_occ, View::Left);
    if (e.right_occ) s.right_occ = read_mask(*e.right_occ, View::Right);
    s.provenance = e.left_image.string();
    s.validate();
    return s;
}

ManifestEntry save_sample(const StereoSample& s, const fs::path& dir, const std::string& id) {
    s.validate();
    fs::create_directories(dir);
    ManifestEntry e;
    e.id = id;
    e.left_image = dir / (id + "_left.ppm");
    e.right_image = dir / (id + "_right.ppm");
    e.left_disp = dir / (id + "_left.pfm");
    e.right_disp = dir / (id + "_right.pfm");
    write_ppm(s.left_image, e.left_image);
    write_ppm(s.right_image, e.right_image);
    write_pfm(s.left_disp, e.left_disp);
    write_pfm(s.right_disp, e.right_disp);
    if (s.left_occ) {
        e.left_occ = dir / (id + "_left_occ.pgm");
        write_mask(*s.left_occ, *e.left_occ);
    }
    if (s.right_occ) {
        e.right_occ = dir / (id + "_right_occ.pgm");
        write_mask(*s.right_occ, *e.right_occ);
    }
    return e;
}

std::vector<StereoSample> load_dataset(const fs::path& dir) {
    std::vector<StereoSample> out;
    for (const ManifestEntry& e : manifest(dir)) out.push_back(load_sample(e));
    return out;
}

}  // namespace symmocc
