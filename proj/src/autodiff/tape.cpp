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

#include "dagoffload/autodiff/tape.hpp"

#include "dagoffload/error.hpp"

namespace dagoffload::ad {

void Tape::check_owner(Var v) const {
    if (v.tape() != this || v.index() >= nodes_.size()) {
        fail(ErrorCode::InvalidArgument, "variable does not belong to this tape");
    }
}

Var Tape::variable(Tensor value) {
    if (!value.all_finite()) fail(ErrorCode::NonFinite, "non-finite leaf value");
    nodes_.push_back(Node{std::move(value), std::nullopt, {}, {}, true});
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), std::nullopt, {}, {}, false});
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
    if (!value.all_finite()) fail(ErrorCode::NonFinite, "operation produced a non-finite value");
    Node node{std::move(value), std::nullopt, {}, {}, false};
    node.inputs.reserve(inputs.size());
    for (Var v : inputs) {
        check_owner(v);
        node.inputs.push_back(v.index());
        node.requires_grad = node.requires_grad || nodes_[v.index()].requires_grad;
    }
    if (node.requires_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
    check_owner(loss);
    if (value(loss).size() != 1) {
        fail(ErrorCode::NonScalarLoss, "loss has shape " + to_string(value(loss).shape()));
    }
    for (Node& n : nodes_) n.grad.reset();
    Node& root = nodes_[loss.index()];
    root.grad = Tensor(root.value.shape(), 1.0);

    std::vector<const Tensor*> in;
    std::vector<Tensor*> in_grads;
    for (std::size_t i = loss.index() + 1; i-- > 0;) {
        Node& node = nodes_[i];
        if (!node.grad || !node.backward) continue;
        in.clear();
        in_grads.clear();
        for (std::size_t j : node.inputs) {
            Node& input = nodes_[j];
            in.push_back(&input.value);
            if (input.requires_grad) {
                if (!input.grad) input.grad = Tensor::zeros_like(input.value);
                in_grads.push_back(&*input.grad);
            } else {
                in_grads.push_back(nullptr);
            }
        }
        node.backward(BackwardContext{node.value, *node.grad, in, in_grads});
    }
}

Tensor Tape::grad(Var v) const {
    check_owner(v);
    const Node& n = nodes_[v.index()];
    return n.grad ? *n.grad : Tensor::zeros_like(n.value);
}

std::vector<Tensor> Tape::gradients(Var loss, std::span<const Var> wrt) {
    backward(loss);
    std::vector<Tensor> out;
    out.reserve(wrt.size());
    for (Var v : wrt) out.push_back(grad(v));
    return out;
}

} // namespace dagoffload::ad
