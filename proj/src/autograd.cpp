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

#include "symmocc/autograd.hpp"

#include <stdexcept>
#include <unordered_set>

namespace symmocc {

namespace {

Var make_node(const char* op, Tensor value, std::vector<Var> inputs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = std::move(value);
    for (const Var& in : inputs) n->requires_grad = n->requires_grad || in->requires_grad;
    n->inputs = std::move(inputs);
    return n;
}

Tensor& grad_of(Node& n) {
    if (n.grad.shape() != n.value.shape()) n.grad = Tensor(n.value.shape());
    return n.grad;
}

std::vector<Real> bias_of(const Var& b) {
    if (!b) return {};
    return {b->value.data().begin(), b->value.data().end()};
}

void require(const Var& v, const char* op) {
    if (!v) throw std::invalid_argument(std::string(op) + ": null input");
}

}  // namespace

Var constant(Tensor value) { return make_node("constant", std::move(value), {}); }

Var parameter(Parameter& p) {
    auto n = make_node("parameter", p.value, {});
    n->param = &p;
    n->requires_grad = true;
    return n;
}

Var conv2d(const Var& x, const Var& weights, const Var& bias, ConvGeometry g) {
    require(x, "conv2d");
    require(weights, "conv2d");
    auto n = make_node("conv2d", kernels::conv_forward(x->value, weights->value, bias_of(bias), g),
                       bias ? std::vector<Var>{x, weights, bias} : std::vector<Var>{x, weights});
    n->propagate = [g](Node& self) {
        Node& in = *self.inputs[0];
        Node& w = *self.inputs[1];
        Tensor* gin = in.requires_grad ? &grad_of(in) : nullptr;
        Tensor* gw = w.requires_grad ? &grad_of(w) : nullptr;
        std::vector<Real> gb;
        const bool want_b = self.inputs.size() > 2 && self.inputs[2]->requires_grad;
        if (want_b) gb.assign(w.value.shape().batch, 0);
        kernels::conv_backward(in.value, w.value, self.grad, g, gin, gw, want_b ? &gb : nullptr);
        if (want_b) {
            Tensor& dst = grad_of(*self.inputs[2]);
            for (std::size_t i = 0; i < gb.size(); ++i) dst.data()[i] += gb[i];
        }
    };
    return n;
}

Var deconv2d(const Var& x, const Var& weights, const Var& bias, ConvGeometry g) {
    require(x, "deconv2d");
    require(weights, "deconv2d");
    auto n = make_node("deconv2d", kernels::deconv_forward(x->value, weights->value, bias_of(bias), g),
                       bias ? std::vector<Var>{x, weights, bias} : std::vector<Var>{x, weights});
    n->propagate = [g](Node& self) {
        Node& in = *self.inputs[0];
        Node& w = *self.inputs[1];
        Tensor* gin = in.requires_grad ? &grad_of(in) : nullptr;
        Tensor* gw = w.requires_grad ? &grad_of(w) : nullptr;
        std::vector<Real> gb;
        const bool want_b = self.inputs.size() > 2 && self.inputs[2]->requires_grad;
        if (want_b) gb.assign(w.value.shape().batch, 0);
        kernels::deconv_backward(in.value, w.value, self.grad, g, gin, gw, want_b ? &gb : nullptr);
        if (want_b) {
            Tensor& dst = grad_of(*self.inputs[2]);
            for (std::size_t i = 0; i < gb.size(); ++i) dst.data()[i] += gb[i];
        }
    };
    return n;
}

Var relu(const Var& x) {
    require(x, "relu");
    auto n = make_node("relu", symmocc::relu(x->value), {x});
    n->propagate = [](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        const auto xv = in.value.data();
        const auto go = self.grad.data();
        for (std::size_t i = 0; i < go.size(); ++i) {
            if (xv[i] > 0) gi.data()[i] += go[i];
        }
    };
    return n;
}

Var softmax_pairs(const Var& x) {
    require(x, "softmax_pairs");
    auto n = make_node("softmax_pairs", symmocc::softmax_pairs(x->value), {x});
    n->propagate = [](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        const Shape s = self.value.shape();
        for (std::size_t b = 0; b < s.batch; ++b) {
            for (std::size_t c = 0; c < s.channels; c += 2) {
                const Real* pa = self.value.plane(b, c);
                const Real* ga = self.grad.plane(b, c);
                const Real* gz = self.grad.plane(b, c + 1);
                Real* da = gi.plane(b, c);
                Real* dz = gi.plane(b, c + 1);
                for (std::size_t i = 0; i < s.plane(); ++i) {
                    // d pa / d a = pa (1 - pa) = - d pa / d z, and pz = 1 - pa
                    const Real k = pa[i] * (1 - pa[i]) * (ga[i] - gz[i]);
                    da[i] += k;
                    dz[i] -= k;
                }
            }
        }
    };
    return n;
}

Var add(const Var& a, const Var& b) {
    require(a, "add");
    require(b, "add");
    if (a->value.shape() != b->value.shape()) {
        throw std::invalid_argument("add: shape " + a->value.shape().str() + " vs " + b->value.shape().str());
    }
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b->value.data()[i];
    auto n = make_node("add", std::move(out), {a, b});
    n->propagate = [](Node& self) {
        for (const Var& in : self.inputs) {
            if (!in->requires_grad) continue;
            Tensor& gi = grad_of(*in);
            for (std::size_t i = 0; i < gi.size(); ++i) gi.data()[i] += self.grad.data()[i];
        }
    };
    return n;
}

Var concat(const Var& a, const Var& b) {
    require(a, "concat");
    require(b, "concat");
    const Shape sa = a->value.shape();
    const Shape sb = b->value.shape();
    if (sa.batch != sb.batch || sa.height != sb.height || sa.width != sb.width) {
        throw std::invalid_argument("concat: shape " + sa.str() + " vs " + sb.str());
    }
    Tensor out({sa.batch, sa.channels + sb.channels, sa.height, sa.width});
    const std::size_t plane = sa.plane();
    for (std::size_t bi = 0; bi < sa.batch; ++bi) {
        std::copy_n(a->value.plane(bi, 0), sa.channels * plane, out.plane(bi, 0));
        std::copy_n(b->value.plane(bi, 0), sb.channels * plane, out.plane(bi, sa.channels));
    }
    auto n = make_node("concat", std::move(out), {a, b});
    n->propagate = [](Node& self) {
        const Shape so = self.value.shape();
        std::size_t offset = 0;
        for (const Var& in : self.inputs) {
            const std::size_t ch = in->value.shape().channels;
            if (in->requires_grad) {
                Tensor& gi = grad_of(*in);
                for (std::size_t bi = 0; bi < so.batch; ++bi) {
                    const Real* src = self.grad.plane(bi, offset);
                    Real* dst = gi.plane(bi, 0);
                    for (std::size_t i = 0; i < ch * so.plane(); ++i) dst[i] += src[i];
                }
            }
            offset += ch;
        }
    };
    return n;
}

Var slice_channels(const Var& x, std::size_t first, std::size_t count) {
    require(x, "slice_channels");
    const Shape s = x->value.shape();
    if (first + count > s.channels || count == 0) {
        throw std::invalid_argument("slice_channels: [" + std::to_string(first) + ", " +
                                    std::to_string(first + count) + ") out of " + std::to_string(s.channels) +
                                    " channels");
    }
    Tensor out({s.batch, count, s.height, s.width});
    for (std::size_t b = 0; b < s.batch; ++b) {
        std::copy_n(x->value.plane(b, first), count * s.plane(), out.plane(b, 0));
    }
    auto n = make_node("slice_channels", std::move(out), {x});
    n->propagate = [first, count](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        const Shape so = self.value.shape();
        for (std::size_t b = 0; b < so.batch; ++b) {
            const Real* src = self.grad.plane(b, 0);
            Real* dst = gi.plane(b, first);
            for (std::size_t i = 0; i < count * so.plane(); ++i) dst[i] += src[i];
        }
    };
    return n;
}

Var flip_width(const Var& x) {
    require(x, "flip_width");
    const Shape s = x->value.shape();
    Tensor out(s);
    for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t c = 0; c < s.channels; ++c)
            for (std::size_t y = 0; y < s.height; ++y)
                for (std::size_t xx = 0; xx < s.width; ++xx) out.at(b, c, y, xx) = x->value.at(b, c, y, s.width - 1 - xx);
    auto n = make_node("flip_width", std::move(out), {x});
    n->propagate = [](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        const Shape so = self.value.shape();
        for (std::size_t b = 0; b < so.batch; ++b)
            for (std::size_t c = 0; c < so.channels; ++c)
                for (std::size_t y = 0; y < so.height; ++y)
                    for (std::size_t xx = 0; xx < so.width; ++xx)
                        gi.at(b, c, y, so.width - 1 - xx) += self.grad.at(b, c, y, xx);
    };
    return n;
}

Var sum_squares(const Var& x) {
    require(x, "sum_squares");
    Real s = 0;
    for (Real v : x->value.data()) s += v * v;
    auto n = make_node("sum_squares", Tensor({1, 1, 1, 1}, s), {x});
    n->propagate = [](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        const Real g = self.grad.data()[0];
        for (std::size_t i = 0; i < gi.size(); ++i) gi.data()[i] += 2 * in.value.data()[i] * g;
    };
    return n;
}

Var scale(const Var& x, Real factor) {
    require(x, "scale");
    Tensor out = x->value;
    for (Real& v : out.data()) v *= factor;
    auto n = make_node("scale", std::move(out), {x});
    n->propagate = [factor](Node& self) {
        Node& in = *self.inputs[0];
        if (!in.requires_grad) return;
        Tensor& gi = grad_of(in);
        for (std::size_t i = 0; i < gi.size(); ++i) gi.data()[i] += factor * self.grad.data()[i];
    };
    return n;
}

void backward(const Var& root) {
    if (!root) throw std::logic_error("backward called before any forward pass produced a loss");
    if (root->value.size() != 1) {
        throw std::logic_error("backward requires a scalar root, got shape " + root->value.shape().str());
    }
    if (!root->requires_grad) return;

    // iterative post-order DFS; `order` ends up topologically sorted
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node* child = node->inputs[next++].get();
            if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* n : order) n->grad = Tensor();
    grad_of(*root).data()[0] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node& n = **it;
        if (n.grad.empty()) continue;
        if (n.propagate) n.propagate(n);
        if (n.param) {
            Tensor& pg = n.param->grad;
            if (pg.shape() != n.value.shape()) pg = Tensor(n.value.shape());
            for (std::size_t i = 0; i < pg.size(); ++i) pg.data()[i] += n.grad.data()[i];
        }
    }
}

}  // namespace symmocc
