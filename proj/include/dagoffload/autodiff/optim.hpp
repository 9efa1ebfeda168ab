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

#include <span>
#include <string>
#include <vector>

#include "dagoffload/autodiff/tensor.hpp"

namespace dagoffload::ad {

inline constexpr double kAdagradEps = 1e-10;

struct AdagradState {
    std::vector<Tensor> accumulators;
};

// accumulator += g^2; param -= lr * g / (sqrt(accumulator) + eps).
// Accumulators are created as zeros on first use.
void adagrad_update(std::span<Tensor> params, std::span<const Tensor> grads, AdagradState& state, double lr,
                    double eps = kAdagradEps);

struct AdamState {
    std::vector<Tensor> first;
    std::vector<Tensor> second;
    long step = 0;
};

void adam_update(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state, double lr,
                 double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

} // namespace dagoffload::ad
