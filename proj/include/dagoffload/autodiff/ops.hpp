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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dagoffload/autodiff/tape.hpp"

// Differentiable primitives. Binary elementwise ops accept a right operand that
// is either the same shape, a single element, or matches the trailing
// dimensions of the left operand (e.g. a bias row added to every row of a
// matrix); its gradient is summed over the broadcast copies. Matrix ops work on
// 2-D tensors. Every op throws ShapeMismatch on incompatible inputs and
// NonFinite if it produces NaN or Inf.
namespace dagoffload::ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);

Var neg(Var a);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);

Var matmul(Var a, Var b);
Var transpose(Var a);
Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t length);

// Full reductions produce a single-element tensor.
Var sum(Var a);
Var mean(Var a);
Var max(Var a);
// Row (axis 1) or column (axis 0) sums of a 2-D tensor, keeping the reduced
// dimension with extent 1.
Var sum(Var a, std::size_t axis);

Var exp(Var a);
Var log(Var a);
Var relu(Var a);

// Along axis 0 or 1 of a 2-D tensor.
Var softmax(Var a, std::size_t axis);
// Row-wise.
Var log_softmax(Var a);
// Normalises each row to zero mean and unit variance; no affine parameters.
Var layer_norm(Var a, double eps);

// Inverted dropout: kept entries are scaled by 1/(1-rate). The mask is a
// function of `seed` only. With train=false the op is the identity.
Var dropout(Var a, double rate, bool train, std::uint64_t seed);

// Rows of `table` selected by `indices`.
Var embedding_lookup(Var table, std::span<const std::size_t> indices);

// Gradient passes where lo <= a <= hi (boundaries included) and is zero outside.
Var clip(Var a, double lo, double hi);
// Elementwise min; on ties the gradient goes to `a`.
Var minimum(Var a, Var b);
// mask[i] != 0 selects a[i], otherwise b[i]. The mask is not differentiated.
Var where(const Tensor& mask, Var a, Var b);

// Overload sugar.
inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator*(double s, Var a) { return scale(a, s); }

} // namespace dagoffload::ad
