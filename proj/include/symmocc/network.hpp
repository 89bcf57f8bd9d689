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

// The symmetric hourglass occlusion network and its ablation variants.
//
// One hourglass is six stride-2 down-sampling stages (each followed by a
// 3x3 conv), a 512-channel bottleneck, six transposed-conv up-sampling
// stages whose outputs are summed with the matching encoder features before
// a 3x3 "iconv", and a final 3x3 prediction layer. The last up-sampled map
// is concatenated with the raw stacked images instead of summed. Every
// layer but the prediction layer is followed by ReLU.
//
// Output channel convention: (0, 1) = left (occluded, visible),
// (2, 3) = right (occluded, visible).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symmocc/autograd.hpp"
#include "symmocc/gtgen.hpp"
#include "symmocc/types.hpp"

namespace symmocc {

enum class Variant { SymmNet, MonoNetL, MonoNetR, SiameseNet, AlterNet, HalfNet, LRCNet };

std::string to_string(Variant v);
/// Case-insensitive; throws std::invalid_argument on unknown names.
Variant parse_variant(std::string_view name);
std::vector<Variant> all_variants();

enum class LayerKind { Downsample, Conv, Upsample, Iconv, Predict };
enum class Merge { None, Add, Concat };

struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t padding = 1;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::string source;  // "input" or an earlier layer
    std::string skip;    // merge partner; "input" means the raw image stack
    Merge merge = Merge::None;
    bool relu = true;
    /// Output resolution as a fraction 1/divisor of the input.
    std::size_t resolution_divisor = 1;

    std::size_t parameter_count() const { return out_channels * in_channels * kernel * kernel + out_channels; }
    bool transposed() const { return kind == LayerKind::Upsample; }
};

/// Declarative layer list of one hourglass.
struct NetworkSpec {
    std::vector<LayerSpec> layers;
    std::size_t input_channels = 6;
    std::size_t skip_image_channels = 6;
    std::size_t output_channels = 4;
    double channel_scale = 1.0;

    /// The full-width layer table scaled by `channel_scale`. Interior widths
    /// must come out integral and positive.
    static NetworkSpec hourglass(std::size_t input_channels, std::size_t output_channels, double channel_scale);

    const LayerSpec& layer(std::string_view name) const;
    std::size_t parameter_count() const;
};

/// Channels after scaling; throws when not a positive integer.
std::size_t scaled_channels(std::size_t base, double scale);

/// Per-layer record of a forward pass.
struct LayerTrace {
    std::string name;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    Shape output;
};

/// One hourglass with its own parameters.
class Hourglass {
public:
    Hourglass(NetworkSpec spec, std::string prefix);

    void initialize(std::mt19937_64& rng);

    /// Returns pre-softmax prediction-layer output. `images` is the image
    /// stack concatenated before iconv0. Gradients reach parameters().
    Var forward(const Var& input, const Var& images, std::vector<LayerTrace>* trace = nullptr);
    /// Same graph with parameters entered as constants.
    Var evaluate(const Var& input, const Var& images, std::vector<LayerTrace>* trace = nullptr) const;

    const NetworkSpec& spec() const { return spec_; }
    const std::string& prefix() const { return prefix_; }
    std::vector<Parameter>& parameters() { return params_; }
    const std::vector<Parameter>& parameters() const { return params_; }

private:
    template <typename ParamFn>
    Var run(const Var& input, const Var& images, ParamFn&& param, std::vector<LayerTrace>* trace) const;

    NetworkSpec spec_;
    std::string prefix_;
    // weight, bias interleaved in layer order
    std::vector<Parameter> params_;
};

struct BuildOptions {
    /// AlterNet right-view pass on horizontally mirrored inputs.
    bool alter_mirror = false;
};

struct NetworkOutput {
    std::optional<Tensor> prob_left;  // (B, 1, H, W)
    std::optional<Tensor> prob_right;
    std::optional<Tensor> disp_left;
    std::optional<Tensor> disp_right;
};

struct GraphOutput {
    Var prob_left;
    Var prob_right;
    Var disp_left;
    Var disp_right;
};

struct OcclusionProbs {
    ProbabilityMap left;
    std::optional<ProbabilityMap> right;
};

struct LayerParameterCount {
    std::string name;
    std::size_t count = 0;
};

class Network {
public:
    static Network build(Variant variant, double channel_scale, std::uint64_t seed, BuildOptions options = {});

    Variant variant() const { return variant_; }
    double channel_scale() const { return channel_scale_; }
    std::uint64_t seed() const { return seed_; }
    const BuildOptions& options() const { return options_; }

    bool predicts_left() const { return true; }
    bool predicts_right() const;
    bool regresses_disparity() const { return variant_ == Variant::LRCNet; }

    /// Differentiable forward on raw [0, 255] image batches (B, 3, H, W).
    /// `only` restricts AlterNet to a single pass; ignored otherwise.
    GraphOutput forward_graph(const Tensor& left, const Tensor& right, std::optional<View> only = std::nullopt,
                              std::vector<LayerTrace>* trace = nullptr);
    /// Inference without gradient bookkeeping.
    NetworkOutput forward(const Tensor& left, const Tensor& right, std::vector<LayerTrace>* trace = nullptr) const;

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    std::size_t parameter_count() const;
    /// Summed over sub-networks, keyed by layer name.
    std::vector<LayerParameterCount> layer_parameter_counts() const;
    /// Everything except the first down-sampling and the prediction layer.
    std::size_t interior_parameter_count() const;

    const std::vector<Hourglass>& subnets() const { return subnets_; }
    std::vector<Hourglass>& subnets() { return subnets_; }

    void zero_grad();

private:
    Network(Variant v, double scale, std::uint64_t seed, BuildOptions opt)
        : variant_(v), channel_scale_(scale), seed_(seed), options_(opt) {}

    template <typename Self>
    static GraphOutput run(Self& self, const Tensor& left, const Tensor& right, std::optional<View> only,
                           std::vector<LayerTrace>* trace);

    Variant variant_;
    double channel_scale_;
    std::uint64_t seed_;
    BuildOptions options_;
    std::vector<Hourglass> subnets_;
};

/// Throws with a padding hint unless both extents are multiples of 64.
void check_input_extent(std::size_t height, std::size_t width);

/// Map [0, 255] to [-0.5, 0.5].
Tensor normalize_images(const Tensor& raw);

/// Probability maps of batch item `b`.
OcclusionProbs probabilities(const NetworkOutput& out, std::size_t b);

/// Strict P > tau.
OcclusionMap threshold(const ProbabilityMap& probs, double tau, View view);

struct Prediction {
    OcclusionMap left;
    std::optional<OcclusionMap> right;
};

Prediction predict(const OcclusionProbs& probs, double tau);

/// LRC baseline on regressed disparities of batch item `b` (negative
/// regressions are clamped to 0 before the consistency check).
std::pair<OcclusionMap, OcclusionMap> lrc_occlusion(const NetworkOutput& out, std::size_t b, const GtConfig& cfg);

}  // namespace symmocc
