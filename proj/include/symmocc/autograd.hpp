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

// Minimal reverse-mode differentiation over the handful of ops the hourglass
// network needs. A forward pass builds a DAG of Nodes; backward() walks it in
// reverse topological order and accumulates into Parameter::grad.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "symmocc/layers.hpp"
#include "symmocc/tensor.hpp"

namespace symmocc {

/// A trainable tensor. Storage is owned here; graph leaves only refer to it,
/// so several branches may share one Parameter.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
    void zero_grad() { grad = Tensor(value.shape()); }
};

struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::shared_ptr<Node>> inputs;
    /// Reads this->grad and accumulates into inputs' grads.
    std::function<void(Node&)> propagate;
    Parameter* param = nullptr;
    bool requires_grad = false;
    const char* op = "";  // static string naming the producing op
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor value);
Var parameter(Parameter& p);

Var conv2d(const Var& x, const Var& weights, const Var& bias, ConvGeometry g);
Var deconv2d(const Var& x, const Var& weights, const Var& bias, ConvGeometry g);
Var relu(const Var& x);
Var softmax_pairs(const Var& x);
Var add(const Var& a, const Var& b);
/// Channel-wise concatenation [a, b].
Var concat(const Var& a, const Var& b);
/// Channels [first, first + count) as a new tensor.
Var slice_channels(const Var& x, std::size_t first, std::size_t count);
/// Mirror along the width axis.
Var flip_width(const Var& x);
Var sum_squares(const Var& x);
Var scale(const Var& x, Real factor);

/// Runs reverse accumulation from a single-element root. Throws
/// std::logic_error when no forward pass produced `root`.
void backward(const Var& root);

}  // namespace symmocc
