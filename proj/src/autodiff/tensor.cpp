/* Copyright 2026 The dagoffload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dagoffload/autodiff/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "dagoffload/error.hpp"

namespace dagoffload::ad {

std::size_t numel(const Shape& shape) noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(numel(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != numel(shape_)) {
        fail(ErrorCode::ShapeMismatch, "tensor of shape " + to_string(shape_) + " given " +
                                           std::to_string(data_.size()) + " values");
    }
}

double Tensor::item() const {
    if (data_.size() != 1) fail(ErrorCode::ShapeMismatch, "item() on tensor of shape " + to_string(shape_));
    return data_[0];
}

bool Tensor::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor& Tensor::operator+=(const Tensor& other) {
    if (other.data_.size() != data_.size()) {
        fail(ErrorCode::ShapeMismatch, "cannot add " + to_string(other.shape_) + " into " + to_string(shape_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

} // namespace dagoffload::ad
