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

#include "symmocc/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>
#include <type_traits>

namespace symmocc {

namespace {

constexpr std::size_t kDepthFactor = 64;

struct Row {
    const char* name;
    LayerKind kind;
    std::size_t kernel, stride, padding, in, out;
    const char* source;
    const char* skip;
    Merge merge;
    std::size_t divisor;
};

// Full-width table; "in"/"out" of 0 are filled from the variant's image and
// output channel counts.
constexpr Row kTable[] = {
    {"dwnsp1", LayerKind::Downsample, 8, 2, 3, 0, 16, "input", "", Merge::None, 2},
    {"conv1", LayerKind::Conv, 3, 1, 1, 16, 16, "dwnsp1", "", Merge::None, 2},
    {"dwnsp2", LayerKind::Downsample, 6, 2, 2, 16, 32, "conv1", "", Merge::None, 4},
    {"conv2", LayerKind::Conv, 3, 1, 1, 32, 32, "dwnsp2", "", Merge::None, 4},
    {"dwnsp3", LayerKind::Downsample, 6, 2, 2, 32, 64, "conv2", "", Merge::None, 8},
    {"conv3", LayerKind::Conv, 3, 1, 1, 64, 64, "dwnsp3", "", Merge::None, 8},
    {"dwnsp4", LayerKind::Downsample, 4, 2, 1, 64, 128, "conv3", "", Merge::None, 16},
    {"conv4", LayerKind::Conv, 3, 1, 1, 128, 128, "dwnsp4", "", Merge::None, 16},
    {"dwnsp5", LayerKind::Downsample, 4, 2, 1, 128, 256, "conv4", "", Merge::None, 32},
    {"conv5", LayerKind::Conv, 3, 1, 1, 256, 256, "dwnsp5", "", Merge::None, 32},
    {"dwnsp6", LayerKind::Downsample, 4, 2, 1, 256, 512, "conv5", "", Merge::None, 64},
    {"conv6", LayerKind::Conv, 3, 1, 1, 512, 512, "dwnsp6", "", Merge::None, 64},
    {"upsp5", LayerKind::Upsample, 4, 2, 1, 512, 256, "conv6", "", Merge::None, 32},
    {"iconv5", LayerKind::Iconv, 3, 1, 1, 256, 256, "upsp5", "conv5", Merge::Add, 32},
    {"upsp4", LayerKind::Upsample, 4, 2, 1, 256, 128, "iconv5", "", Merge::None, 16},
    {"iconv4", LayerKind::Iconv, 3, 1, 1, 128, 128, "upsp4", "conv4", Merge::Add, 16},
    {"upsp3", LayerKind::Upsample, 4, 2, 1, 128, 64, "iconv4", "", Merge::None, 8},
    {"iconv3", LayerKind::Iconv, 3, 1, 1, 64, 64, "upsp3", "conv3", Merge::Add, 8},
    {"upsp2", LayerKind::Upsample, 4, 2, 1, 64, 32, "iconv3", "", Merge::None, 4},
    {"iconv2", LayerKind::Iconv, 3, 1, 1, 32, 32, "upsp2", "conv2", Merge::Add, 4},
    {"upsp1", LayerKind::Upsample, 4, 2, 1, 32, 16, "iconv2", "", Merge::None, 2},
    {"iconv1", LayerKind::Iconv, 3, 1, 1, 16, 16, "upsp1", "conv1", Merge::Add, 2},
    {"upsp0", LayerKind::Upsample, 4, 2, 1, 16, 8, "iconv1", "", Merge::None, 1},
    {"iconv0", LayerKind::Iconv, 3, 1, 1, 8, 8, "upsp0", "input", Merge::Concat, 1},
    {"pr", LayerKind::Predict, 3, 1, 1, 8, 0, "iconv0", "", Merge::None, 1},
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::SymmNet: return "SymmNet";
        case Variant::MonoNetL: return "MonoNetL";
        case Variant::MonoNetR: return "MonoNetR";
        case Variant::SiameseNet: return "SiameseNet";
        case Variant::AlterNet: return "AlterNet";
        case Variant::HalfNet: return "HalfNet";
        case Variant::LRCNet: return "LRCNet";
    }
    return "?";
}

std::vector<Variant> all_variants() {
    return {Variant::SymmNet,  Variant::MonoNetL, Variant::MonoNetR, Variant::SiameseNet,
            Variant::AlterNet, Variant::HalfNet,  Variant::LRCNet};
}

Variant parse_variant(std::string_view name) {
    const std::string key = lower(name);
    for (Variant v : all_variants()) {
        if (lower(to_string(v)) == key) return v;
    }
    throw std::invalid_argument("unknown network variant '" + std::string(name) + "'");
}

std::size_t scaled_channels(std::size_t base, double scale) {
    if (!(scale > 0) || !std::isfinite(scale)) {
        throw std::invalid_argument("channel_scale must be positive, got " + std::to_string(scale));
    }
    const double c = static_cast<double>(base) * scale;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9 || r < 1) {
        throw std::invalid_argument("channel_scale " + std::to_string(scale) + " turns " + std::to_string(base) +
                                    " channels into non-integer " + std::to_string(c));
    }
    return static_cast<std::size_t>(r);
}

NetworkSpec NetworkSpec::hourglass(std::size_t input_channels, std::size_t output_channels, double channel_scale) {
    NetworkSpec spec;
    spec.input_channels = input_channels;
    spec.output_channels = output_channels;
    spec.channel_scale = channel_scale;
    for (const Row& row : kTable) {
        LayerSpec l;
        l.name = row.name;
        l.kind = row.kind;
        l.kernel = row.kernel;
        l.stride = row.stride;
        l.padding = row.padding;
        l.in_channels = row.in == 0 ? input_channels : scaled_channels(row.in, channel_scale);
        l.out_channels = row.out == 0 ? output_channels : scaled_channels(row.out, channel_scale);
        l.source = row.source;
        l.skip = row.skip;
        l.merge = row.merge;
        l.relu = row.kind != LayerKind::Predict;
        l.resolution_divisor = row.divisor;
        if (l.merge == Merge::Concat) l.in_channels += spec.skip_image_channels;
        spec.layers.push_back(std::move(l));
    }
    return spec;
}

const LayerSpec& NetworkSpec::layer(std::string_view name) const {
    for (const LayerSpec& l : layers) {
        if (l.name == name) return l;
    }
    throw std::out_of_range("no layer named '" + std::string(name) + "'");
}

std::size_t NetworkSpec::parameter_count() const {
    std::size_t n = 0;
    for (const LayerSpec& l : layers) n += l.parameter_count();
    return n;
}

// ---------------------------------------------------------------------------

Hourglass::Hourglass(NetworkSpec spec, std::string prefix) : spec_(std::move(spec)), prefix_(std::move(prefix)) {
    for (const LayerSpec& l : spec_.layers) {
        params_.emplace_back(prefix_ + l.name + ".weight", Tensor({l.out_channels, l.in_channels, l.kernel, l.kernel}));
        params_.emplace_back(prefix_ + l.name + ".bias", Tensor({1, 1, 1, l.out_channels}));
    }
}

void Hourglass::initialize(std::mt19937_64& rng) {
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const LayerSpec& l = spec_.layers[i];
        // a transposed layer sees in * (k / s)^2 inputs per output pixel
        double fan_in = static_cast<double>(l.in_channels * l.kernel * l.kernel);
        if (l.transposed()) fan_in /= static_cast<double>(l.stride * l.stride);
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
        for (Real& w : params_[2 * i].value.data()) w = dist(rng);
        params_[2 * i + 1].value.fill(0);
        params_[2 * i].zero_grad();
        params_[2 * i + 1].zero_grad();
    }
}

template <typename ParamFn>
Var Hourglass::run(const Var& input, const Var& images, ParamFn&& param, std::vector<LayerTrace>* trace) const {
    std::map<std::string, Var, std::less<>> outputs;
    auto lookup = [&](const std::string& name) -> const Var& {
        if (name == "input") return input;
        auto it = outputs.find(name);
        if (it == outputs.end()) throw std::logic_error("layer source '" + name + "' not yet computed");
        return it->second;
    };
    Var last;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const LayerSpec& l = spec_.layers[i];
        Var x = lookup(l.source);
        if (l.merge == Merge::Add) {
            x = add(x, lookup(l.skip));
        } else if (l.merge == Merge::Concat) {
            x = concat(x, l.skip == "input" ? images : lookup(l.skip));
        }
        const std::size_t in_ch = x->value.shape().channels;
        const ConvGeometry g{l.stride, l.padding};
        Var y = l.transposed() ? deconv2d(x, param(2 * i), param(2 * i + 1), g)
                               : conv2d(x, param(2 * i), param(2 * i + 1), g);
        if (l.relu) y = relu(y);
        if (trace) trace->push_back({prefix_ + l.name, in_ch, y->value.shape().channels, y->value.shape()});
        outputs[l.name] = y;
        last = y;
    }
    return last;
}

Var Hourglass::forward(const Var& input, const Var& images, std::vector<LayerTrace>* trace) {
    return run(input, images, [this](std::size_t i) { return parameter(params_[i]); }, trace);
}

Var Hourglass::evaluate(const Var& input, const Var& images, std::vector<LayerTrace>* trace) const {
    return run(input, images, [this](std::size_t i) { return constant(params_[i].value); }, trace);
}

// ---------------------------------------------------------------------------

Network Network::build(Variant variant, double channel_scale, std::uint64_t seed, BuildOptions options) {
    Network net(variant, channel_scale, seed, options);
    switch (variant) {
        case Variant::SymmNet:
            net.subnets_.emplace_back(NetworkSpec::hourglass(6, 4, channel_scale), "");
            break;
        case Variant::MonoNetL:
        case Variant::MonoNetR:
        case Variant::SiameseNet:
            net.subnets_.emplace_back(NetworkSpec::hourglass(3, 2, channel_scale), "");
            break;
        case Variant::AlterNet:
            net.subnets_.emplace_back(NetworkSpec::hourglass(6, 2, channel_scale), "");
            break;
        case Variant::HalfNet:
            net.subnets_.emplace_back(NetworkSpec::hourglass(6, 2, channel_scale * 0.5), "left.");
            net.subnets_.emplace_back(NetworkSpec::hourglass(6, 2, channel_scale * 0.5), "right.");
            break;
        case Variant::LRCNet:
            net.subnets_.emplace_back(NetworkSpec::hourglass(6, 2, channel_scale), "");
            break;
    }
    std::mt19937_64 rng(seed);
    for (Hourglass& h : net.subnets_) h.initialize(rng);
    return net;
}

bool Network::predicts_right() const {
    return variant_ != Variant::MonoNetL && variant_ != Variant::MonoNetR;
}

void check_input_extent(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0 || height % kDepthFactor != 0 || width % kDepthFactor != 0) {
        auto up = [](std::size_t v) { return (v + kDepthFactor - 1) / kDepthFactor * kDepthFactor; };
        throw std::invalid_argument("input " + std::to_string(height) + "x" + std::to_string(width) +
                                    " is not divisible by 64; pad or crop to " + std::to_string(up(height)) + "x" +
                                    std::to_string(up(width)));
    }
}

Tensor normalize_images(const Tensor& raw) {
    Tensor out = raw;
    for (Real& v : out.data()) v = v / 255.0 - 0.5;
    return out;
}

template <typename Self>
GraphOutput Network::run(Self& self, const Tensor& left, const Tensor& right, std::optional<View> only,
                         std::vector<LayerTrace>* trace) {
    if (left.shape() != right.shape()) {
        throw std::invalid_argument("left " + left.shape().str() + " and right " + right.shape().str() +
                                    " image batches differ");
    }
    if (left.shape().channels != 3) {
        throw std::invalid_argument("expected 3-channel images, got " + left.shape().str());
    }
    check_input_extent(left.shape().height, left.shape().width);

    auto hg = [&](std::size_t i, const Var& in, const Var& images) {
        if constexpr (std::is_const_v<Self>) {
            return self.subnets_[i].evaluate(in, images, trace);
        } else {
            return self.subnets_[i].forward(in, images, trace);
        }
    };
    auto occ = [](const Var& logits, std::size_t pair) { return slice_channels(softmax_pairs(logits), 2 * pair, 1); };

    const Var l = constant(normalize_images(left));
    const Var r = constant(normalize_images(right));
    GraphOutput out;
    const bool want_left = !only || *only == View::Left;
    const bool want_right = !only || *only == View::Right;

    switch (self.variant_) {
        case Variant::SymmNet: {
            const Var stack = concat(l, r);
            const Var probs = softmax_pairs(hg(0, stack, stack));
            out.prob_left = slice_channels(probs, 0, 1);
            out.prob_right = slice_channels(probs, 2, 1);
            break;
        }
        case Variant::MonoNetL:
            out.prob_left = occ(hg(0, l, concat(l, l)), 0);
            break;
        case Variant::MonoNetR:
            out.prob_left = occ(hg(0, r, concat(r, r)), 0);
            break;
        case Variant::SiameseNet:
            out.prob_left = occ(hg(0, l, concat(l, l)), 0);
            out.prob_right = occ(hg(0, r, concat(r, r)), 0);
            break;
        case Variant::AlterNet: {
            if (want_left) {
                const Var stack = concat(l, r);
                out.prob_left = occ(hg(0, stack, stack), 0);
            }
            if (want_right) {
                if (self.options_.alter_mirror) {
                    const Var stack = concat(flip_width(r), flip_width(l));
                    out.prob_right = flip_width(occ(hg(0, stack, stack), 0));
                } else {
                    const Var stack = concat(r, l);
                    out.prob_right = occ(hg(0, stack, stack), 0);
                }
            }
            break;
        }
        case Variant::HalfNet: {
            const Var stack = concat(l, r);
            out.prob_left = occ(hg(0, stack, stack), 0);
            out.prob_right = occ(hg(1, stack, stack), 0);
            break;
        }
        case Variant::LRCNet: {
            const Var stack = concat(l, r);
            const Var disp = hg(0, stack, stack);
            out.disp_left = slice_channels(disp, 0, 1);
            out.disp_right = slice_channels(disp, 1, 1);
            break;
        }
    }
    return out;
}

GraphOutput Network::forward_graph(const Tensor& left, const Tensor& right, std::optional<View> only,
                                   std::vector<LayerTrace>* trace) {
    return run(*this, left, right, only, trace);
}

NetworkOutput Network::forward(const Tensor& left, const Tensor& right, std::vector<LayerTrace>* trace) const {
    const GraphOutput g = run(*this, left, right, std::nullopt, trace);
    NetworkOutput out;
    if (g.prob_left) out.prob_left = g.prob_left->value;
    if (g.prob_right) out.prob_right = g.prob_right->value;
    if (g.disp_left) out.disp_left = g.disp_left->value;
    if (g.disp_right) out.disp_right = g.disp_right->value;
    return out;
}

std::vector<Parameter*> Network::parameters() {
    std::vector<Parameter*> ps;
    for (Hourglass& h : subnets_)
        for (Parameter& p : h.parameters()) ps.push_back(&p);
    return ps;
}

std::vector<const Parameter*> Network::parameters() const {
    std::vector<const Parameter*> ps;
    for (const Hourglass& h : subnets_)
        for (const Parameter& p : h.parameters()) ps.push_back(&p);
    return ps;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Parameter* p : parameters()) n += p->value.size();
    return n;
}

std::vector<LayerParameterCount> Network::layer_parameter_counts() const {
    std::vector<LayerParameterCount> counts;
    for (const Hourglass& h : subnets_) {
        for (std::size_t i = 0; i < h.spec().layers.size(); ++i) {
            const LayerSpec& l = h.spec().layers[i];
            if (counts.size() <= i) counts.push_back({l.name, 0});
            counts[i].count += l.parameter_count();
        }
    }
    return counts;
}

std::size_t Network::interior_parameter_count() const {
    std::size_t n = 0;
    for (const LayerParameterCount& c : layer_parameter_counts()) {
        if (c.name != "dwnsp1" && c.name != "pr") n += c.count;
    }
    return n;
}

void Network::zero_grad() {
    for (Parameter* p : parameters()) p->zero_grad();
}

// ---------------------------------------------------------------------------

OcclusionProbs probabilities(const NetworkOutput& out, std::size_t b) {
    if (!out.prob_left) throw std::invalid_argument("network output carries no occlusion probabilities");
    OcclusionProbs p{plane_to_grid(*out.prob_left, b, 0), std::nullopt};
    if (out.prob_right) p.right = plane_to_grid(*out.prob_right, b, 0);
    return p;
}

OcclusionMap threshold(const ProbabilityMap& probs, double tau, View view) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("threshold tau must lie in [0, 1]");
    OcclusionMap m(view, probs.width, probs.height);
    for (std::size_t i = 0; i < probs.size(); ++i) m.labels.values[i] = probs.values[i] > tau ? 1 : 0;
    return m;
}

Prediction predict(const OcclusionProbs& probs, double tau) {
    Prediction p{threshold(probs.left, tau, View::Left), std::nullopt};
    if (probs.right) p.right = threshold(*probs.right, tau, View::Right);
    return p;
}

std::pair<OcclusionMap, OcclusionMap> lrc_occlusion(const NetworkOutput& out, std::size_t b, const GtConfig& cfg) {
    if (!out.disp_left || !out.disp_right) throw std::invalid_argument("network output carries no disparities");
    auto to_map = [b](const Tensor& t, View v) {
        const Shape s = t.shape();
        DisparityMap d(v, s.width, s.height);
        const Real* src = t.plane(b, 0);
        for (std::size_t i = 0; i < s.plane(); ++i) d.values.values[i] = static_cast<float>(std::max(0.0, src[i]));
        return d;
    };
    return binocular_occlusion(to_map(*out.disp_left, View::Left), to_map(*out.disp_right, View::Right), cfg);
}

}  // namespace symmocc
