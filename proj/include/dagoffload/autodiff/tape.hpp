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

#include <deque>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "dagoffload/autodiff/tensor.hpp"

namespace dagoffload::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while its tape lives.
class Var {
  public:
    Var() = default;
    Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

    Tape* tape() const noexcept { return tape_; }
    std::size_t index() const noexcept { return index_; }
    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }

  private:
    Tape* tape_ = nullptr;
    std::size_t index_ = 0;
};

struct BackwardContext {
    const Tensor& out;
    const Tensor& grad_out;
    std::span<const Tensor* const> inputs;
    // nullptr for inputs that do not need a gradient.
    std::span<Tensor* const> input_grads;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
// tape backwards visits every node after all of its consumers. Gradients
// accumulate additively across fan-out. A tape is single-threaded; use one
// tape per concurrent evaluation.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leaf that receives a gradient.
    Var variable(Tensor value);
    // Leaf that never receives a gradient.
    Var constant(Tensor value);

    // Appends an op result. Throws NonFinite if `value` holds NaN or Inf.
    // The backward rule is dropped when no input needs a gradient.
    Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
    Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);

    const Tensor& value(Var v) const { return nodes_.at(v.index()).value; }
    bool requires_grad(Var v) const { return nodes_.at(v.index()).requires_grad; }

    // Seeds d(loss)/d(loss) = 1 and propagates. Throws NonScalarLoss unless
    // the loss holds exactly one element. Clears earlier gradients first.
    void backward(Var loss);

    // Gradient after backward(); zeros for nodes the loss does not reach.
    Tensor grad(Var v) const;

    // backward(loss) followed by grad() for each requested node.
    std::vector<Tensor> gradients(Var loss, std::span<const Var> wrt);

    std::size_t size() const noexcept { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        std::optional<Tensor> grad;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
    };

    void check_owner(Var v) const;

    std::deque<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }

} // namespace dagoffload::ad
