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

#include "symmocc/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace symmocc {

namespace {

using std::ptrdiff_t;

// Output indices o in [lo, hi) with 0 <= o*s + k - p < in_len.
struct Span1D {
    ptrdiff_t lo;
    ptrdiff_t hi;
};

Span1D valid_range(ptrdiff_t k, ptrdiff_t p, ptrdiff_t s, ptrdiff_t in_len, ptrdiff_t out_len) {
    ptrdiff_t lo = 0;
    if (p > k) lo = (p - k + s - 1) / s;
    const ptrdiff_t top = in_len - 1 + p - k;
    ptrdiff_t hi = top < 0 ? 0 : std::min(out_len, top / s + 1);
    return {lo, std::max(lo, hi)};
}

void check_weights(const char* op, const Shape& in, const Shape& w) {
    if (w.height == 0 || w.width == 0 || w.batch == 0) {
        throw std::invalid_argument(std::string(op) + ": empty weight tensor " + w.str());
    }
    if (in.channels != w.channels) {
        throw std::invalid_argument(std::string(op) + ": input has " + std::to_string(in.channels) +
                                    " channels but weights " + w.str() + " expect " + std::to_string(w.channels));
    }
}

void check_bias(const char* op, const Shape& w, const std::vector<Real>& bias) {
    if (!bias.empty() && bias.size() != w.batch) {
        throw std::invalid_argument(std::string(op) + ": bias has " + std::to_string(bias.size()) +
                                    " entries for " + std::to_string(w.batch) + " output channels");
    }
}

}  // namespace

Shape conv2d_output_shape(const Shape& in, const Shape& w, ConvGeometry g) {
    check_weights("conv2d", in, w);
    if (g.stride == 0) throw std::invalid_argument("conv2d: stride must be positive");
    const std::size_t ph = in.height + 2 * g.padding;
    const std::size_t pw = in.width + 2 * g.padding;
    if (ph < w.height || pw < w.width) {
        throw std::invalid_argument("conv2d: kernel " + std::to_string(w.height) + "x" + std::to_string(w.width) +
                                    " larger than padded input " + std::to_string(ph) + "x" + std::to_string(pw));
    }
    if ((ph - w.height) % g.stride != 0 || (pw - w.width) % g.stride != 0) {
        throw std::invalid_argument("conv2d: (h + 2p - kh) = " + std::to_string(ph - w.height) +
                                    " and (w + 2p - kw) = " + std::to_string(pw - w.width) +
                                    " must both be divisible by stride " + std::to_string(g.stride) +
                                    " (input " + in.str() + ")");
    }
    return {in.batch, w.batch, (ph - w.height) / g.stride + 1, (pw - w.width) / g.stride + 1};
}

Shape deconv2d_output_shape(const Shape& in, const Shape& w, ConvGeometry g) {
    check_weights("deconv2d", in, w);
    if (g.stride == 0) throw std::invalid_argument("deconv2d: stride must be positive");
    if (in.height == 0 || in.width == 0) throw std::invalid_argument("deconv2d: empty input " + in.str());
    const std::size_t fh = (in.height - 1) * g.stride + w.height;
    const std::size_t fw = (in.width - 1) * g.stride + w.width;
    if (fh <= 2 * g.padding || fw <= 2 * g.padding) {
        throw std::invalid_argument("deconv2d: padding " + std::to_string(g.padding) + " consumes the whole output");
    }
    return {in.batch, w.batch, fh - 2 * g.padding, fw - 2 * g.padding};
}

namespace kernels {

Tensor conv_forward(const Tensor& in, const Tensor& w, const std::vector<Real>& bias, ConvGeometry g) {
    const Shape os = conv2d_output_shape(in.shape(), w.shape(), g);
    check_bias("conv2d", w.shape(), bias);
    Tensor out(os);
    const Shape is = in.shape();
    const Shape ws = w.shape();
    const auto s = static_cast<ptrdiff_t>(g.stride);
    const auto p = static_cast<ptrdiff_t>(g.padding);
    const auto H = static_cast<ptrdiff_t>(is.height), W = static_cast<ptrdiff_t>(is.width);
    const auto OH = static_cast<ptrdiff_t>(os.height), OW = static_cast<ptrdiff_t>(os.width);
    const auto jobs = static_cast<ptrdiff_t>(os.batch * os.channels);

#pragma omp parallel for schedule(static)
    for (ptrdiff_t job = 0; job < jobs; ++job) {
        const std::size_t b = static_cast<std::size_t>(job) / os.channels;
        const std::size_t oc = static_cast<std::size_t>(job) % os.channels;
        Real* o = out.plane(b, oc);
        std::fill(o, o + os.plane(), bias.empty() ? Real(0) : bias[oc]);
        for (std::size_t ic = 0; ic < is.channels; ++ic) {
            const Real* ip = in.plane(b, ic);
            for (std::size_t ky = 0; ky < ws.height; ++ky) {
                const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, H, OH);
                for (std::size_t kx = 0; kx < ws.width; ++kx) {
                    const Real wv = w.at(oc, ic, ky, kx);
                    if (wv == 0) continue;
                    const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, W, OW);
                    const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                    for (ptrdiff_t oy = ry.lo; oy < ry.hi; ++oy) {
                        const Real* irow = ip + (oy * s + static_cast<ptrdiff_t>(ky) - p) * W;
                        Real* orow = o + oy * OW;
                        if (s == 1) {
                            for (ptrdiff_t ox = rx.lo; ox < rx.hi; ++ox) orow[ox] += wv * irow[ox + dx];
                        } else {
                            for (ptrdiff_t ox = rx.lo; ox < rx.hi; ++ox) orow[ox] += wv * irow[ox * s + dx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

void conv_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, ConvGeometry g, Tensor* grad_in,
                   Tensor* grad_w, std::vector<Real>* grad_b) {
    const Shape is = in.shape();
    const Shape ws = w.shape();
    const Shape os = grad_out.shape();
    const auto s = static_cast<ptrdiff_t>(g.stride);
    const auto p = static_cast<ptrdiff_t>(g.padding);
    const auto H = static_cast<ptrdiff_t>(is.height), W = static_cast<ptrdiff_t>(is.width);
    const auto OH = static_cast<ptrdiff_t>(os.height), OW = static_cast<ptrdiff_t>(os.width);

    if (grad_in) {
        const auto jobs = static_cast<ptrdiff_t>(is.batch * is.channels);
#pragma omp parallel for schedule(static)
        for (ptrdiff_t job = 0; job < jobs; ++job) {
            const std::size_t b = static_cast<std::size_t>(job) / is.channels;
            const std::size_t ic = static_cast<std::size_t>(job) % is.channels;
            Real* gi = grad_in->plane(b, ic);
            for (std::size_t oc = 0; oc < os.channels; ++oc) {
                const Real* go = grad_out.plane(b, oc);
                for (std::size_t ky = 0; ky < ws.height; ++ky) {
                    const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, H, OH);
                    for (std::size_t kx = 0; kx < ws.width; ++kx) {
                        const Real wv = w.at(oc, ic, ky, kx);
                        if (wv == 0) continue;
                        const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, W, OW);
                        const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                        for (ptrdiff_t oy = ry.lo; oy < ry.hi; ++oy) {
                            Real* irow = gi + (oy * s + static_cast<ptrdiff_t>(ky) - p) * W;
                            const Real* orow = go + oy * OW;
                            for (ptrdiff_t ox = rx.lo; ox < rx.hi; ++ox) irow[ox * s + dx] += wv * orow[ox];
                        }
                    }
                }
            }
        }
    }

    if (grad_w || grad_b) {
        const auto jobs = static_cast<ptrdiff_t>(os.channels);
#pragma omp parallel for schedule(static)
        for (ptrdiff_t job = 0; job < jobs; ++job) {
            const auto oc = static_cast<std::size_t>(job);
            for (std::size_t b = 0; b < os.batch; ++b) {
                const Real* go = grad_out.plane(b, oc);
                if (grad_b) {
                    Real acc = 0;
                    for (std::size_t i = 0; i < os.plane(); ++i) acc += go[i];
                    (*grad_b)[oc] += acc;
                }
                if (!grad_w) continue;
                for (std::size_t ic = 0; ic < is.channels; ++ic) {
                    const Real* ip = in.plane(b, ic);
                    for (std::size_t ky = 0; ky < ws.height; ++ky) {
                        const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, H, OH);
                        for (std::size_t kx = 0; kx < ws.width; ++kx) {
                            const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, W, OW);
                            const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                            Real acc = 0;
                            for (ptrdiff_t oy = ry.lo; oy < ry.hi; ++oy) {
                                const Real* irow = ip + (oy * s + static_cast<ptrdiff_t>(ky) - p) * W;
                                const Real* orow = go + oy * OW;
                                for (ptrdiff_t ox = rx.lo; ox < rx.hi; ++ox) acc += orow[ox] * irow[ox * s + dx];
                            }
                            grad_w->at(oc, ic, ky, kx) += acc;
                        }
                    }
                }
            }
        }
    }
}

Tensor deconv_forward(const Tensor& in, const Tensor& w, const std::vector<Real>& bias, ConvGeometry g) {
    const Shape os = deconv2d_output_shape(in.shape(), w.shape(), g);
    check_bias("deconv2d", w.shape(), bias);
    Tensor out(os);
    const Shape is = in.shape();
    const Shape ws = w.shape();
    const auto s = static_cast<ptrdiff_t>(g.stride);
    const auto p = static_cast<ptrdiff_t>(g.padding);
    const auto H = static_cast<ptrdiff_t>(is.height), W = static_cast<ptrdiff_t>(is.width);
    const auto OH = static_cast<ptrdiff_t>(os.height), OW = static_cast<ptrdiff_t>(os.width);
    const auto jobs = static_cast<ptrdiff_t>(os.batch * os.channels);

#pragma omp parallel for schedule(static)
    for (ptrdiff_t job = 0; job < jobs; ++job) {
        const std::size_t b = static_cast<std::size_t>(job) / os.channels;
        const std::size_t oc = static_cast<std::size_t>(job) % os.channels;
        Real* o = out.plane(b, oc);
        std::fill(o, o + os.plane(), bias.empty() ? Real(0) : bias[oc]);
        for (std::size_t ic = 0; ic < is.channels; ++ic) {
            const Real* ip = in.plane(b, ic);
            for (std::size_t ky = 0; ky < ws.height; ++ky) {
                // input rows iy scatter to oy = iy*s + ky - p
                const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, OH, H);
                for (std::size_t kx = 0; kx < ws.width; ++kx) {
                    const Real wv = w.at(oc, ic, ky, kx);
                    if (wv == 0) continue;
                    const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, OW, W);
                    const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                    for (ptrdiff_t iy = ry.lo; iy < ry.hi; ++iy) {
                        const Real* irow = ip + iy * W;
                        Real* orow = o + (iy * s + static_cast<ptrdiff_t>(ky) - p) * OW;
                        for (ptrdiff_t ix = rx.lo; ix < rx.hi; ++ix) orow[ix * s + dx] += wv * irow[ix];
                    }
                }
            }
        }
    }
    return out;
}

void deconv_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, ConvGeometry g, Tensor* grad_in,
                     Tensor* grad_w, std::vector<Real>* grad_b) {
    const Shape is = in.shape();
    const Shape ws = w.shape();
    const Shape os = grad_out.shape();
    const auto s = static_cast<ptrdiff_t>(g.stride);
    const auto p = static_cast<ptrdiff_t>(g.padding);
    const auto H = static_cast<ptrdiff_t>(is.height), W = static_cast<ptrdiff_t>(is.width);
    const auto OH = static_cast<ptrdiff_t>(os.height), OW = static_cast<ptrdiff_t>(os.width);

    if (grad_in) {
        const auto jobs = static_cast<ptrdiff_t>(is.batch * is.channels);
#pragma omp parallel for schedule(static)
        for (ptrdiff_t job = 0; job < jobs; ++job) {
            const std::size_t b = static_cast<std::size_t>(job) / is.channels;
            const std::size_t ic = static_cast<std::size_t>(job) % is.channels;
            Real* gi = grad_in->plane(b, ic);
            for (std::size_t oc = 0; oc < os.channels; ++oc) {
                const Real* go = grad_out.plane(b, oc);
                for (std::size_t ky = 0; ky < ws.height; ++ky) {
                    const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, OH, H);
                    for (std::size_t kx = 0; kx < ws.width; ++kx) {
                        const Real wv = w.at(oc, ic, ky, kx);
                        if (wv == 0) continue;
                        const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, OW, W);
                        const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                        for (ptrdiff_t iy = ry.lo; iy < ry.hi; ++iy) {
                            Real* irow = gi + iy * W;
                            const Real* orow = go + (iy * s + static_cast<ptrdiff_t>(ky) - p) * OW;
                            for (ptrdiff_t ix = rx.lo; ix < rx.hi; ++ix) irow[ix] += wv * orow[ix * s + dx];
                        }
                    }
                }
            }
        }
    }

    if (grad_w || grad_b) {
        const auto jobs = static_cast<ptrdiff_t>(os.channels);
#pragma omp parallel for schedule(static)
        for (ptrdiff_t job = 0; job < jobs; ++job) {
            const auto oc = static_cast<std::size_t>(job);
            for (std::size_t b = 0; b < os.batch; ++b) {
                const Real* go = grad_out.plane(b, oc);
                if (grad_b) {
                    Real acc = 0;
                    for (std::size_t i = 0; i < os.plane(); ++i) acc += go[i];
                    (*grad_b)[oc] += acc;
                }
                if (!grad_w) continue;
                for (std::size_t ic = 0; ic < is.channels; ++ic) {
                    const Real* ip = in.plane(b, ic);
                    for (std::size_t ky = 0; ky < ws.height; ++ky) {
                        const Span1D ry = valid_range(static_cast<ptrdiff_t>(ky), p, s, OH, H);
                        for (std::size_t kx = 0; kx < ws.width; ++kx) {
                            const Span1D rx = valid_range(static_cast<ptrdiff_t>(kx), p, s, OW, W);
                            const ptrdiff_t dx = static_cast<ptrdiff_t>(kx) - p;
                            Real acc = 0;
                            for (ptrdiff_t iy = ry.lo; iy < ry.hi; ++iy) {
                                const Real* irow = ip + iy * W;
                                const Real* orow = go + (iy * s + static_cast<ptrdiff_t>(ky) - p) * OW;
                                for (ptrdiff_t ix = rx.lo; ix < rx.hi; ++ix) acc += irow[ix] * orow[ix * s + dx];
                            }
                            grad_w->at(oc, ic, ky, kx) += acc;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace kernels

Tensor conv2d(const Tensor& input, const ConvParams& params) {
    return kernels::conv_forward(input, params.weights, params.bias, {params.stride, params.padding});
}

Tensor deconv2d(const Tensor& input, const ConvParams& params) {
    return kernels::deconv_forward(input, params.weights, params.bias, {params.stride, params.padding});
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (Real& v : out.data()) v = v > 0 ? v : Real(0);
    return out;
}

Tensor softmax_pairs(const Tensor& input) {
    const Shape s = input.shape();
    if (s.channels % 2 != 0) {
        throw std::invalid_argument("softmax_pairs: channel count " + std::to_string(s.channels) + " is odd");
    }
    Tensor out(s);
    for (std::size_t b = 0; b < s.batch; ++b) {
        for (std::size_t c = 0; c < s.channels; c += 2) {
            const Real* a = input.plane(b, c);
            const Real* z = input.plane(b, c + 1);
            Real* pa = out.plane(b, c);
            Real* pz = out.plane(b, c + 1);
            for (std::size_t i = 0; i < s.plane(); ++i) {
                // logistic of the pair difference, evaluated on the stable side
                const Real d = a[i] - z[i];
                Real e;
                if (d >= 0) {
                    e = std::exp(-d);
                    pa[i] = 1 / (1 + e);
                    pz[i] = e / (1 + e);
                } else {
                    e = std::exp(d);
                    pa[i] = e / (1 + e);
                    pz[i] = 1 / (1 + e);
                }
            }
        }
    }
    return out;
}

}  // namespace symmocc
