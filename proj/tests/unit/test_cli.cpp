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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support/tempdir.hpp"
#include "symmocc/cli.hpp"
#include "symmocc/datakit/checkpoint.hpp"
#include "symmocc/datakit/image_io.hpp"
#include "symmocc/datakit/manifest.hpp"
#include "symmocc/datakit/pfm.hpp"
#include "symmocc/gtgen.hpp"
#include "symmocc/metrics.hpp"

namespace fs = std::filesystem;
using namespace symmocc;
using symmocc::testing::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "symmocc");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    const Run unknown = run({"eval", "--pred", "a", "--gt", "b", "--bogus"});
    CHECK(unknown.code == kExitUsage);
    CHECK(lines(unknown.err) == 1);
    CHECK(run({"gen-gt", "--left", "a.pfm"}).code == kExitUsage);
    CHECK(run({"infer", "--ckpt", "c", "--tau", "1.5"}).code == kExitUsage);
    CHECK(run({"gen-gt", "--left", "a", "--right", "b", "--delta", "0"}).code == kExitUsage);
}

TEST_CASE("help exits cleanly") { CHECK(run({"--help"}).code == kExitOk); }

TEST_CASE("runtime failures exit with 2 and a one-line diagnostic") {
    const Run r = run({"gen-gt", "--left", "/nonexistent/l.pfm", "--right", "/nonexistent/r.pfm"});
    CHECK(r.code == kExitFailure);
    CHECK(lines(r.err) == 1);
    CHECK(contains(r.err, "cannot open"));
    CHECK(run({"train", "--data", "/nonexistent/dir"}).code == kExitFailure);
    CHECK(run({"eval", "--pred", "a.pgm", "--pred", "b.pgm", "--gt", "a.pgm"}).code == kExitFailure);
}

TEST_CASE("every run prints its resolved config") {
    TempDir dir("cfg");
    const Run r = run({"synth", "--out", (dir / "d").string(), "--count", "1", "--width", "128", "--height", "64"});
    REQUIRE(r.code == kExitOk);
    CHECK(contains(r.out, "# resolved config: synth"));
    CHECK(contains(r.out, "count=1"));
    CHECK(contains(r.out, "seed=0"));
    CHECK(contains(r.out, "delta=1"));
}

TEST_CASE("gen-gt writes two masks matching the library") {
    TempDir dir("gengt");
    REQUIRE(run({"synth", "--out", dir.path().string(), "--count", "1", "--width", "128", "--height", "64"}).code ==
            kExitOk);
    const fs::path l = dir / "scene0000_left.pfm", r = dir / "scene0000_right.pfm";
    const Run g = run({"gen-gt", "--left", l.string(), "--right", r.string(), "--delta", "1"});
    REQUIRE(g.code == kExitOk);
    const auto [ol, orr] = binocular_occlusion(read_pfm(l, View::Left), read_pfm(r, View::Right));
    CHECK(read_mask(dir / "scene0000_left_occ.pgm", View::Left) == ol);
    CHECK(read_mask(dir / "scene0000_right_occ.pgm", View::Right) == orr);

    const Run custom = run({"gen-gt", "--left", l.string(), "--right", r.string(), "--out-left",
                            (dir / "a.pgm").string(), "--out-right", (dir / "b.pgm").string(), "--oob-visible"});
    REQUIRE(custom.code == kExitOk);
    CHECK(read_mask(dir / "a.pgm", View::Left).count_occluded() <= ol.count_occluded());
}

TEST_CASE("synth output is a loadable dataset") {
    TempDir dir("synthcli");
    REQUIRE(run({"synth", "--out", dir.path().string(), "--count", "3", "--width", "128", "--height", "64", "--seed",
                 "4"}).code == kExitOk);
    const auto entries = manifest(dir.path());
    REQUIRE(entries.size() == 3);
    CHECK(fs::exists(dir / kManifestFile));
    CHECK(entries[0].left_occ);
    CHECK(fs::exists(dir / "scene0002_right_oracle.pgm"));
}

TEST_CASE("eval of identical masks reports F = 1") {
    TempDir dir("eval");
    OcclusionMap m(View::Left, 8, 4);
    m.labels.at(2, 1) = m.labels.at(3, 1) = 1;
    write_mask(m, dir / "m.pgm");
    const Run r = run({"eval", "--pred", (dir / "m.pgm").string(), "--gt", (dir / "m.pgm").string(), "--kv",
                       (dir / "m.kv").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(contains(r.out, "fscore 1\n"));
    std::ifstream kv(dir / "m.kv");
    const std::string text{std::istreambuf_iterator<char>(kv), {}};
    CHECK(contains(text, "micro.fscore=1\n"));
    CHECK(contains(text, "macro.fscore=1\n"));
    CHECK(contains(text, "micro.tp=2\n"));
}

TEST_CASE("overlay colours match the reported counts") {
    TempDir dir("overlay");
    REQUIRE(run({"synth", "--out", dir.path().string(), "--count", "1", "--width", "128", "--height", "64"}).code ==
            kExitOk);
    // Prediction: ground truth shifted right by two pixels.
    const OcclusionMap gt = read_mask(dir / "scene0000_left_occ.pgm", View::Left);
    OcclusionMap pred(View::Left, gt.width(), gt.height());
    for (std::size_t y = 0; y < gt.height(); ++y)
        for (std::size_t x = 2; x < gt.width(); ++x) pred.labels.at(x, y) = gt.labels.at(x - 2, y);
    write_mask(pred, dir / "pred.pgm");
    const Run r = run({"eval", "--pred", (dir / "pred.pgm").string(), "--gt", (dir / "scene0000_left_occ.pgm").string(),
                       "--base", (dir / "scene0000_left.ppm").string(), "--overlay-dir", (dir / "ov").string(), "--kv",
                       (dir / "k.kv").string()});
    REQUIRE(r.code == kExitOk);
    const Counts c = count_overlay(read_ppm(dir / "ov" / "overlay_0.ppm"));
    CHECK(c == prf(pred, gt).counts);
    std::ifstream kv(dir / "k.kv");
    const std::string text{std::istreambuf_iterator<char>(kv), {}};
    CHECK(contains(text, "micro.tp=" + std::to_string(c.tp) + "\n"));
    CHECK(contains(text, "micro.fp=" + std::to_string(c.fp) + "\n"));
    CHECK(contains(text, "micro.fn=" + std::to_string(c.fn) + "\n"));
}

TEST_CASE("train, infer and pr-curve end to end") {
    TempDir dir("e2e");
    const std::string data = (dir / "data").string();
    REQUIRE(run({"synth", "--out", data, "--count", "2", "--width", "128", "--height", "64"}).code == kExitOk);
    const std::string ckpt = (dir / "m.ckpt").string();
    const Run t = run({"train", "--data", data, "--heldout", data, "--channel-scale", "0.125", "--batch-size", "2",
                       "--epochs", "1", "--crop-h", "64", "--crop-w", "64", "--ckpt", ckpt, "--log",
                       (dir / "log.csv").string()});
    REQUIRE(t.code == kExitOk);
    CHECK(contains(t.out, "lr=0.01"));
    CHECK(contains(t.out, "beta2=0.99"));
    CHECK(contains(t.out, "heldout_f"));
    CHECK(load_checkpoint(ckpt).optimizer->step == 1);

    const std::string out_dir = (dir / "pred").string();
    const Run i = run({"infer", "--ckpt", ckpt, "--data", data, "--out-dir", out_dir, "--tau", "0.5"});
    REQUIRE(i.code == kExitOk);
    const Grid<float> prob = read_pfm_grid(fs::path(out_dir) / "scene0000_left_prob.pfm");
    const OcclusionMap mask = read_mask(fs::path(out_dir) / "scene0000_left_pred.pgm", View::Left);
    for (std::size_t k = 0; k < prob.size(); ++k) CHECK(mask.labels.values[k] == (prob.values[k] > 0.5f ? 1 : 0));
    CHECK(fs::exists(fs::path(out_dir) / "scene0001_right_pred.pgm"));

    const std::string csv = (dir / "pr.csv").string();
    const Run p = run({"pr-curve", "--prob", (fs::path(out_dir) / "scene0000_left_prob.pfm").string(), "--gt",
                       (dir / "data" / "scene0000_left_occ.pgm").string(), "--out", csv, "--steps", "10"});
    REQUIRE(p.code == kExitOk);
    std::ifstream in(csv);
    const std::string text{std::istreambuf_iterator<char>(in), {}};
    CHECK(lines(text) == 12);
}

TEST_CASE("relative paths resolve against the data root") {
    TempDir dir("root");
    ::setenv(kDataRootEnv, dir.path().c_str(), 1);
    const Run r = run({"synth", "--out", "rel", "--count", "1", "--width", "128", "--height", "64"});
    ::unsetenv(kDataRootEnv);
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(dir / "rel" / kManifestFile));
    CHECK(contains(r.out, std::string("# ") + kDataRootEnv + "="));
}
