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

#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "dagoffload/autodiff/optim.hpp"
#include "dagoffload/dataset.hpp"
#include "dagoffload/ppo.hpp"

namespace dagoffload {

// Builds the episode context for a (DAG, transmission rate) learning task.
using EnvFactory = std::function<std::shared_ptr<const EpisodeContext>(const TaskGraph&, double rate_bps)>;

// Uses the default system profile at the given rate and feature bounds from
// the generator's default ranges.
EnvFactory default_env_factory(std::size_t index_length = kDefaultIndexLength,
                               const SystemProfile& base = SystemProfile{},
                               const FeatureBounds& bounds = FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4},
                                                                                        SystemProfile{}));

struct TrainingDag {
    const TaskGraph* graph = nullptr;
    int set_id = -1;
    std::size_t index = 0;
};

std::vector<TrainingDag> training_dags(const Dataset& dataset, Split split = Split::Train);

struct IterationMetrics {
    std::size_t iteration = 0;
    double mean_latency_ms = 0.0; // over the trajectories collected this iteration
    double surrogate = 0.0;       // averaged over every minibatch update
    double value_loss = 0.0;
    double entropy = 0.0;
    double total_loss = 0.0;
    double clip_fraction = 0.0;
    std::vector<int> set_ids; // sets the learning tasks were drawn from
};

// Adagrad (or Adam) state for the two parameter groups.
class GroupedOptimizer {
  public:
    GroupedOptimizer(const PolicyParams& params, OptimizerKind kind);

    void step(PolicyParams& params, std::span<const ad::Tensor> grads, double lr_policy, double lr_value);

    std::vector<ad::NamedTensor> state(const PolicyParams& params) const;
    void restore(const PolicyParams& params, const std::vector<ad::NamedTensor>& state);

  private:
    OptimizerKind kind_;
    std::array<std::vector<std::size_t>, 2> members_;
    std::array<ad::AdagradState, 2> adagrad_;
    std::array<ad::AdamState, 2> adam_;
};

struct TrainResult {
    PolicyParams params;
    std::vector<ad::NamedTensor> optimizer_state;
    std::vector<IterationMetrics> metrics;
};

// Called after every iteration with the updated parameters.
using IterationCallback =
    std::function<void(const IterationMetrics&, const PolicyParams&, const GroupedOptimizer&)>;

// PPO training loop: each iteration samples tasks_per_iter learning tasks
// (DAG, rate), collects trajectories under the current parameters, computes
// GAE, then runs epochs_per_iter passes of minibatch updates.
TrainResult train(std::span<const TrainingDag> dags, const EnvFactory& env_factory, const PolicyConfig& policy,
                  PolicyParams initial, const TrainConfig& config, const IterationCallback& on_iteration = {});

// iteration,mean_latency_ms,surrogate,value_loss,entropy,total_loss,clip_fraction,set_ids
void write_metrics_csv(std::ostream& os, std::span<const IterationMetrics> metrics);

struct DagEvaluation {
    double best_latency = 0.0;   // min over sampled trajectories and the greedy rollout
    double mean_latency = 0.0;   // mean over sampled trajectories
    double greedy_latency = 0.0; // argmax rollout
};

struct PolicyEvaluation {
    std::vector<DagEvaluation> dags;
    double mean_best = 0.0;
    double mean_sampled = 0.0;
    double mean_greedy = 0.0;
};

inline constexpr std::size_t kDefaultEvalTrajectories = 20;

PolicyEvaluation evaluate_policy(const PolicyParams& params, const PolicyConfig& config,
                                 std::span<const TaskGraph* const> graphs, const EnvFactory& env_factory,
                                 double rate_bps, std::size_t trajectories_per_dag = kDefaultEvalTrajectories,
                                 std::uint64_t seed = 0, std::size_t threads = 1);

} // namespace dagoffload
