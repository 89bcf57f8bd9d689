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

// Dense layer primitives used by the hourglass network. Every function here
// is a pure value-in/value-out kernel; the graph wrappers in autograd.hpp
// call the same kernels for both directions.

#pragma once

#include <cstddef>
#include <vector>

#include "symmocc/tensor.hpp"

namespace symmocc {

/// Weights are (out_ch, in_ch, kh, kw) for both convolution and its
/// transpose; bias has one entry per output channel.
struct ConvParams {
    Tensor weights;
    std::vector<Real> bias;
    std::size_t stride = 1;
    std::size_t padding = 0;

    std::size_t out_channels() const { return weights.shape().batch; }
    std::size_t in_channels() const { return weights.shape().channels; }
    std::size_t kernel_h() const { return weights.shape().height; }
    std::size_t kernel_w() const { return weights.shape().width; }
};

struct ConvGeometry {
    std::size_t stride = 1;
    std::size_t padding = 0;
};

Shape conv2d_output_shape(const Shape& input, const Shape& weights, ConvGeometry g);
Shape deconv2d_output_shape(const Shape& input, const Shape& weights, ConvGeometry g);

/// Zero-padded strided cross-correlation.
Tensor conv2d(const Tensor& input, const ConvParams& params);
/// Transposed convolution; output extent (h-1)*s - 2p + k.
Tensor deconv2d(const Tensor& input, const ConvParams& params);
Tensor relu(const Tensor& input);
/// Softmax over each consecutive channel pair (0,1), (2,3), ...
Tensor softmax_pairs(const Tensor& input);

namespace kernels {

Tensor conv_forward(const Tensor& in, const Tensor& w, const std::vector<Real>& bias, ConvGeometry g);
/// Accumulates into grad_in / grad_w / grad_b; any of them may be null.
void conv_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, ConvGeometry g, Tensor* grad_in,
                   Tensor* grad_w, std::vector<Real>* grad_b);

Tensor deconv_forward(const Tensor& in, const Tensor& w, const std::vector<Real>& bias, ConvGeometry g);
void deconv_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, ConvGeometry g, Tensor* grad_in,
                     Tensor* grad_w, std::vector<Real>* grad_b);

}  // namespace kernels

}  // namespace symmocc
