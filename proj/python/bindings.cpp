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


// Python bindings. Rasters cross the boundary as NumPy arrays: images
// (H, W, 3) float64 in [0, 255], disparities (H, W) float32, masks (H, W)
// uint8 with 1 = occluded, probabilities (H, W) float64.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <vector>

#include "symmocc/cli.hpp"
#include "symmocc/datakit/checkpoint.hpp"
#include "symmocc/datakit/pfm.hpp"
#include "symmocc/datakit/synth.hpp"
#include "symmocc/gtgen.hpp"
#include "symmocc/metrics.hpp"
#include "symmocc/network.hpp"
#include "symmocc/objective.hpp"

namespace py = pybind11;
using namespace symmocc;

namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T, typename G>
py::array_t<T> grid_to_array(const G& g) {
    py::array_t<T> a({g.height, g.width});
    auto v = a.template mutable_unchecked<2>();
    for (std::size_t y = 0; y < g.height; ++y)
        for (std::size_t x = 0; x < g.width; ++x) v(y, x) = static_cast<T>(g.at(x, y));
    return a;
}

template <typename T, typename G>
G array_to_grid(const Array<T>& a, const char* what) {
    if (a.ndim() != 2) throw py::value_error(std::string(what) + " must be a 2-D array");
    G g(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)));
    auto v = a.template unchecked<2>();
    for (std::size_t y = 0; y < g.height; ++y)
        for (std::size_t x = 0; x < g.width; ++x) g.at(x, y) = v(y, x);
    return g;
}

DisparityMap to_disparity(const Array<float>& a, View view) {
    DisparityMap d;
    d.view = view;
    d.values = array_to_grid<float, Grid<float>>(a, "disparity");
    return d;
}

OcclusionMap to_mask(const Array<std::uint8_t>& a, View view) {
    OcclusionMap m;
    m.view = view;
    m.labels = array_to_grid<std::uint8_t, Grid<std::uint8_t>>(a, "mask");
    for (auto& l : m.labels.values) l = l != 0;
    return m;
}

py::array_t<double> image_to_array(const Image& im) {
    py::array_t<double> a({im.height, im.width, std::size_t{3}});
    auto v = a.mutable_unchecked<3>();
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < im.height; ++y)
            for (std::size_t x = 0; x < im.width; ++x) v(y, x, c) = im.at(c, x, y);
    return a;
}

Image array_to_image(const Array<double>& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (H, W, 3)");
    Image im(static_cast<std::size_t>(a.shape(1)), static_cast<std::size_t>(a.shape(0)));
    auto v = a.unchecked<3>();
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < im.height; ++y)
            for (std::size_t x = 0; x < im.width; ++x) im.at(c, x, y) = v(y, x, c);
    return im;
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["tp"] = m.counts.tp;
    d["fp"] = m.counts.fp;
    d["fn"] = m.counts.fn;
    d["tn"] = m.counts.tn;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["fscore"] = m.fscore;
    return d;
}

py::dict forward(const Network& net, const Array<double>& left, const Array<double>& right) {
    const Image l = array_to_image(left), r = array_to_image(right);
    NetworkOutput out;
    {
        py::gil_scoped_release release;
        out = net.forward(images_to_tensor({&l}), images_to_tensor({&r}));
    }
    py::dict d;
    auto put = [&](const char* key, const std::optional<Tensor>& t) {
        if (t) d[key] = grid_to_array<double>(plane_to_grid(*t, 0, 0));
    };
    put("prob_left", out.prob_left);
    put("prob_right", out.prob_right);
    put("disp_left", out.disp_left);
    put("disp_right", out.disp_right);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Binocular occlusion detection: ground truth, networks and metrics";

    py::class_<Network>(m, "Network")
        .def_static(
            "build",
            [](const std::string& variant, double channel_scale, std::uint64_t seed, bool alter_mirror) {
                return Network::build(parse_variant(variant), channel_scale, seed, {.alter_mirror = alter_mirror});
            },
            py::arg("variant") = "SymmNet", py::arg("channel_scale") = 1.0, py::arg("seed") = 0,
            py::arg("alter_mirror") = false)
        .def_property_readonly("variant", [](const Network& n) { return to_string(n.variant()); })
        .def_property_readonly("channel_scale", &Network::channel_scale)
        .def_property_readonly("seed", &Network::seed)
        .def("parameter_count", &Network::parameter_count)
        .def("interior_parameter_count", &Network::interior_parameter_count)
        .def("layer_parameter_counts",
             [](const Network& n) {
                 std::vector<std::pair<std::string, std::size_t>> out;
                 for (const auto& c : n.layer_parameter_counts()) out.emplace_back(c.name, c.count);
                 return out;
             })
        .def("forward", &forward, py::arg("left"), py::arg("right"),
             "Occlusion probabilities (or LRCNet disparities) for one (H, W, 3) image pair.")
        .def("save", [](const Network& n, const std::filesystem::path& p) { save_checkpoint(n, nullptr, p); })
        .def_static("load", [](const std::filesystem::path& p) { return load_checkpoint(p).network; });

    m.def(
        "binocular_occlusion",
        [](const Array<float>& left, const Array<float>& right, double delta, bool oob_is_occluded) {
            const auto [l, r] = binocular_occlusion(to_disparity(left, View::Left), to_disparity(right, View::Right),
                                                    {.delta = delta, .oob_is_occluded = oob_is_occluded});
            return py::make_tuple(grid_to_array<std::uint8_t>(l.labels), grid_to_array<std::uint8_t>(r.labels));
        },
        py::arg("left_disp"), py::arg("right_disp"), py::arg("delta") = 1.0, py::arg("oob_is_occluded") = true);

    m.def(
        "synth_scene",
        [](std::uint64_t seed, std::size_t width, std::size_t height, bool integer_disparities, bool textured) {
            RandomSceneOptions opt;
            opt.integer_disparities = integer_disparities;
            opt.textured = textured;
            const SynthResult s = synth_scene(random_scene_spec(seed, width, height, opt));
            py::dict d;
            d["left_image"] = image_to_array(s.sample.left_image);
            d["right_image"] = image_to_array(s.sample.right_image);
            d["left_disp"] = grid_to_array<float>(s.sample.left_disp.values);
            d["right_disp"] = grid_to_array<float>(s.sample.right_disp.values);
            d["oracle_left"] = grid_to_array<std::uint8_t>(s.oracle_left.labels);
            d["oracle_right"] = grid_to_array<std::uint8_t>(s.oracle_right.labels);
            return d;
        },
        py::arg("seed"), py::arg("width") = 192, py::arg("height") = 128, py::arg("integer_disparities") = false,
        py::arg("textured") = true);

    m.def(
        "threshold",
        [](const Array<double>& probs, double tau) {
            return grid_to_array<std::uint8_t>(
                threshold(array_to_grid<double, ProbabilityMap>(probs, "probabilities"), tau, View::Left).labels);
        },
        py::arg("probs"), py::arg("tau") = 0.5);

    m.def(
        "prf",
        [](const Array<std::uint8_t>& pred, const Array<std::uint8_t>& gt) {
            return metrics_dict(prf(to_mask(pred, View::Left), to_mask(gt, View::Left)));
        },
        py::arg("pred"), py::arg("gt"));

    m.def("class_weight", &bounded_class_weight, py::arg("proportion"), py::arg("eps") = kClassEpsSynthetic);

    m.def("read_pfm", [](const std::filesystem::path& p) { return grid_to_array<float>(read_pfm_grid(p)); });
    m.def("write_pfm", [](const std::filesystem::path& p, const Array<float>& a) {
        write_pfm_grid(array_to_grid<float, Grid<float>>(a, "map"), p);
    });

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "symmocc");
            std::vector<const char*> argv;
            for (const std::string& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
