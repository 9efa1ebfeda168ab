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
#include <memory>
#include <span>
#include <vector>

#include "dagoffload/autodiff/tape.hpp"
#include "dagoffload/latency_sim.hpp"
#include "dagoffload/policy.hpp"

namespace dagoffload {

enum class OptimizerKind { Adagrad, Adam };

struct TrainConfig {
    double lr_policy = 0.01;
    double lr_value = 0.01;
    double clip_eps = 0.2;
    double gamma = 0.99;
    double lambda = 0.95;
    double c1 = 0.5;  // value-loss coefficient
    double c2 = 0.5;  // entropy coefficient
    std::size_t epochs_per_iter = 4;
    std::size_t batch_size = 100; // steps per minibatch (whole episodes are kept together)
    std::size_t iterations = 200;
    std::size_t tasks_per_iter = 4;
    std::size_t trajectories_per_task = 8;
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::Adagrad;
    bool dropout_in_update = true;
    std::vector<double> rates_mbps{4, 7, 10, 13, 16, 19, 22};
    std::size_t threads = 1;

    void validate() const;

    // Policy lr 0.1, value lr 0.01, batch 100, clip 0.2, gamma 0.99, entropy 0.5.
    static TrainConfig paper();
    static TrainConfig toy() { return {}; }
};

Json train_config_to_json(const TrainConfig& config);

// One episode: a decision for every task of the DAG, in rank order.
struct Trajectory {
    std::shared_ptr<const EpisodeContext> context;
    std::vector<Decision> actions;
    std::vector<double> log_probs; // under the sampling policy
    std::vector<double> values;    // V(s_t)
    std::vector<double> rewards;
    double latency = 0.0; // seconds
    int set_id = -1;
    std::size_t dag_index = 0;

    std::size_t size() const noexcept { return actions.size(); }
};

Trajectory rollout(const PolicyParams& params, const PolicyConfig& config,
                   std::shared_ptr<const EpisodeContext> context, Rng& rng, ActMode mode = ActMode::Sample);

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

// `values` holds V(s_0..s_{T-1}) followed by the bootstrap V(s_T) (0 at
// episode end). A_t = delta_t + gamma*lambda*A_{t+1}; returns_t = A_t + V(s_t).
// Throws LengthMismatch unless values.size() == rewards.size() + 1.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma, double lambda);

// Zero mean, unit standard deviation (population), eps 1e-8 in the divisor.
std::vector<double> normalize_advantages(std::span<const double> advantages, double eps = 1e-8);

struct PpoSample {
    const Trajectory* trajectory = nullptr;
    std::vector<double> advantages;
    std::vector<double> returns;
};

struct LossTerms {
    ad::Var total;
    double surrogate = 0.0; // mean of min(r*A, clip(r)*A)
    double value = 0.0;     // mean squared value error
    double entropy = 0.0;   // mean policy entropy, nats
    double mean_ratio = 0.0;
    double max_ratio_deviation = 0.0; // max |r - 1|
    double clip_fraction = 0.0;
    std::size_t steps = 0;
};

// loss = -mean[min(r A, clip(r, 1-eps, 1+eps) A)] + c1 mean[(V - R)^2] - c2 mean[H],
// r = exp(log pi - log pi_sam). Advantages are normalised over the batch when
// `normalize` is set.
LossTerms ppo_loss(ad::Tape& tape, std::span<const ad::Var> params, const PolicyConfig& policy,
                   std::span<const PpoSample> batch, const TrainConfig& config, bool train, std::uint64_t seed,
                   bool normalize = true);

} // namespace dagoffload
