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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace symmocc {

using Real = double;

/// NCHW extents of a dense 4-D tensor.
struct Shape {
    std::size_t batch = 0;
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t count() const { return batch * channels * height * width; }
    std::size_t plane() const { return height * width; }
    bool operator==(const Shape&) const = default;
    std::string str() const;
};

/// Dense row-major (b, c, h, w) storage.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, Real fill = 0);
    Tensor(Shape shape, std::vector<Real> values);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<Real> data() { return data_; }
    std::span<const Real> data() const { return data_; }
    const std::vector<Real>& values() const { return data_; }

    Real& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
        return data_[offset(b, c, y, x)];
    }
    Real at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
        return data_[offset(b, c, y, x)];
    }

    /// Pointer to the contiguous h*w plane of (b, c).
    Real* plane(std::size_t b, std::size_t c) { return data_.data() + (b * shape_.channels + c) * shape_.plane(); }
    const Real* plane(std::size_t b, std::size_t c) const {
        return data_.data() + (b * shape_.channels + c) * shape_.plane();
    }

    void fill(Real v);
    bool all_finite() const;
    Real sum() const;

private:
    std::size_t offset(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
        return ((b * shape_.channels + c) * shape_.height + y) * shape_.width + x;
    }

    Shape shape_;
    std::vector<Real> data_;
};

/// Largest absolute elementwise difference; shapes must agree.
Real max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace symmocc
