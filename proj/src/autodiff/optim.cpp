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

#include "dagoffload/autodiff/optim.hpp"

#include <cmath>

#include "dagoffload/error.hpp"

namespace dagoffload::ad {

namespace {

void check_aligned(std::span<Tensor> params, std::span<const Tensor> grads) {
    if (params.size() != grads.size()) fail(ErrorCode::ShapeMismatch, "parameter and gradient counts differ");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].shape() != grads[i].shape()) {
            fail(ErrorCode::ShapeMismatch, "gradient " + std::to_string(i) + " has shape " +
                                               to_string(grads[i].shape()) + ", parameter " +
                                               to_string(params[i].shape()));
        }
    }
}

void ensure_slots(std::vector<Tensor>& slots, std::span<Tensor> params) {
    if (slots.empty()) {
        for (const Tensor& p : params) slots.push_back(Tensor::zeros_like(p));
    }
    if (slots.size() != params.size()) fail(ErrorCode::ShapeMismatch, "optimizer state does not match parameters");
}

} // namespace

void adagrad_update(std::span<Tensor> params, std::span<const Tensor> grads, AdagradState& state, double lr,
                    double eps) {
    if (!(lr >= 0.0)) fail(ErrorCode::InvalidArgument, "learning rate must be non-negative");
    check_aligned(params, grads);
    ensure_slots(state.accumulators, params);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = params[k];
        Tensor& acc = state.accumulators[k];
        const Tensor& g = grads[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc[i] += g[i] * g[i];
            p[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
        }
    }
}

void adam_update(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state, double lr, double beta1,
                 double beta2, double eps) {
    check_aligned(params, grads);
    ensure_slots(state.first, params);
    ensure_slots(state.second, params);
    ++state.step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t i = 0; i < params[k].size(); ++i) {
            const double g = grads[k][i];
            double& m = state.first[k][i];
            double& v = state.second[k][i];
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            params[k][i] -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
        }
    }
}

} // namespace dagoffload::ad
