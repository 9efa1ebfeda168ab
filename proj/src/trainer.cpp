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

#include "dagoffload/trainer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "dagoffload/parallel.hpp"

namespace dagoffload {

EnvFactory default_env_factory(std::size_t index_length, const SystemProfile& base, const FeatureBounds& bounds) {
    return [index_length, base, bounds](const TaskGraph& graph, double rate_bps) {
        SystemProfile p = base;
        p.rate_up = rate_bps;
        p.rate_do = rate_bps;
        return make_context(graph, p, bounds, index_length);
    };
}

std::vector<TrainingDag> training_dags(const Dataset& dataset, Split split) {
    std::vector<TrainingDag> out;
    for (const DatasetSetData* s : dataset.split(split)) {
        for (const DagRecord& r : s->dags) out.push_back({&r.graph, r.meta.set_id, r.meta.index});
    }
    return out;
}

GroupedOptimizer::GroupedOptimizer(const PolicyParams& params, OptimizerKind kind) : kind_(kind) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        members_[params.groups[i] == ParamGroup::Policy ? 0 : 1].push_back(i);
    }
}

void GroupedOptimizer::step(PolicyParams& params, std::span<const ad::Tensor> grads, double lr_policy,
                            double lr_value) {
    if (grads.size() != params.size()) fail(ErrorCode::ShapeMismatch, "gradient count differs from parameters");
    for (std::size_t g = 0; g < 2; ++g) {
        std::vector<ad::Tensor> p, d;
        for (std::size_t i : members_[g]) {
            p.push_back(std::move(params.values[i]));
            d.push_back(grads[i]);
        }
        const double lr = g == 0 ? lr_policy : lr_value;
        if (kind_ == OptimizerKind::Adagrad) {
            ad::adagrad_update(p, d, adagrad_[g], lr);
        } else {
            ad::adam_update(p, d, adam_[g], lr);
        }
        for (std::size_t k = 0; k < members_[g].size(); ++k) params.values[members_[g][k]] = std::move(p[k]);
    }
}

std::vector<ad::NamedTensor> GroupedOptimizer::state(const PolicyParams& params) const {
    std::vector<ad::NamedTensor> out;
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t k = 0; k < members_[g].size(); ++k) {
            const std::string& name = params.names[members_[g][k]];
            if (kind_ == OptimizerKind::Adagrad) {
                if (!adagrad_[g].accumulators.empty()) out.push_back({"adagrad/" + name, adagrad_[g].accumulators[k]});
            } else if (!adam_[g].first.empty()) {
                out.push_back({"adam_m/" + name, adam_[g].first[k]});
                out.push_back({"adam_v/" + name, adam_[g].second[k]});
            }
        }
    }
    return out;
}

void GroupedOptimizer::restore(const PolicyParams& params, const std::vector<ad::NamedTensor>& state) {
    if (state.empty()) return;
    auto find = [&](const std::string& name) -> const ad::Tensor& {
        for (const auto& t : state)
            if (t.name == name) return t.value;
        fail(ErrorCode::ParseError, "optimizer state lacks " + name);
    };
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t i : members_[g]) {
            const std::string& name = params.names[i];
            if (kind_ == OptimizerKind::Adagrad) {
                adagrad_[g].accumulators.push_back(find("adagrad/" + name));
            } else {
                adam_[g].first.push_back(find("adam_m/" + name));
                adam_[g].second.push_back(find("adam_v/" + name));
            }
        }
    }
}

namespace {

struct LearningTask {
    const TrainingDag* dag = nullptr;
    double rate_bps = 0.0;
};

} // namespace

TrainResult train(std::span<const TrainingDag> dags, const EnvFactory& env_factory, const PolicyConfig& policy,
                  PolicyParams initial, const TrainConfig& config, const IterationCallback& on_iteration) {
    if (dags.empty()) fail(ErrorCode::MissingDataset, "training needs at least one DAG");
    config.validate();
    policy.validate();

    TrainResult result{std::move(initial), {}, {}};
    PolicyParams& params = result.params;
    GroupedOptimizer optimizer(params, config.optimizer);

    for (std::size_t it = 0; it < config.iterations; ++it) {
        Rng rng(derive_seed(config.seed, {0x7a1ULL, it}));
        std::vector<LearningTask> tasks;
        IterationMetrics m;
        m.iteration = it;
        for (std::size_t i = 0; i < config.tasks_per_iter; ++i) {
            const TrainingDag& dag = dags[rng.index(dags.size())];
            tasks.push_back({&dag, mbps(config.rates_mbps[rng.index(config.rates_mbps.size())])});
            m.set_ids.push_back(dag.set_id);
        }

        // Rollouts read the current parameters (the sampling policy).
        const std::size_t per_task = config.trajectories_per_task;
        std::vector<Trajectory> trajectories(tasks.size() * per_task);
        std::vector<std::shared_ptr<const EpisodeContext>> contexts;
        for (const LearningTask& t : tasks) contexts.push_back(env_factory(*t.dag->graph, t.rate_bps));
        parallel_for(trajectories.size(), config.threads, [&](std::size_t k) {
            Rng episode_rng(derive_seed(config.seed, {0xe915ULL, it, k}));
            Trajectory traj = rollout(params, policy, contexts[k / per_task], episode_rng);
            traj.set_id = tasks[k / per_task].dag->set_id;
            traj.dag_index = tasks[k / per_task].dag->index;
            trajectories[k] = std::move(traj);
        });

        std::vector<PpoSample> samples;
        double latency_sum = 0.0;
        for (const Trajectory& t : trajectories) {
            std::vector<double> values = t.values;
            values.push_back(0.0);
            GaeResult gae = compute_gae(t.rewards, values, config.gamma, config.lambda);
            samples.push_back({&t, std::move(gae.advantages), std::move(gae.returns)});
            latency_sum += t.latency;
        }
        m.mean_latency_ms = 1e3 * latency_sum / static_cast<double>(trajectories.size());

        std::vector<std::size_t> order(samples.size());
        std::size_t updates = 0;
        for (std::size_t epoch = 0; epoch < config.epochs_per_iter; ++epoch) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
            std::size_t pos = 0;
            while (pos < order.size()) {
                std::vector<PpoSample> batch;
                std::size_t steps = 0;
                while (pos < order.size() &&
                       (batch.empty() || steps + samples[order[pos]].trajectory->size() <= config.batch_size)) {
                    steps += samples[order[pos]].trajectory->size();
                    batch.push_back(samples[order[pos++]]);
                }
                ad::Tape tape;
                const std::vector<ad::Var> vars = bind_params(tape, params, true);
                const LossTerms terms = ppo_loss(tape, vars, policy, batch, config, config.dropout_in_update,
                                                 derive_seed(config.seed, {0xd0ULL, it, epoch, updates}));
                const std::vector<ad::Tensor> grads = tape.gradients(terms.total, vars);
                optimizer.step(params, grads, config.lr_policy, config.lr_value);
                m.surrogate += terms.surrogate;
                m.value_loss += terms.value;
                m.entropy += terms.entropy;
                m.total_loss += terms.total.value().item();
                m.clip_fraction += terms.clip_fraction;
                ++updates;
            }
        }
        if (updates > 0) {
            const auto u = static_cast<double>(updates);
            m.surrogate /= u;
            m.value_loss /= u;
            m.entropy /= u;
            m.total_loss /= u;
            m.clip_fraction /= u;
        }
        if (on_iteration) on_iteration(m, params, optimizer);
        result.metrics.push_back(std::move(m));
    }
    result.optimizer_state = optimizer.state(params);
    return result;
}

void write_metrics_csv(std::ostream& os, std::span<const IterationMetrics> metrics) {
    os << "iteration,mean_latency_ms,surrogate,value_loss,entropy,total_loss,clip_fraction,set_ids\n";
    for (const IterationMetrics& m : metrics) {
        std::string ids;
        for (std::size_t i = 0; i < m.set_ids.size(); ++i) ids += (i ? ";" : "") + std::to_string(m.set_ids[i]);
        os << fmt::format("{},{:.6f},{:.9f},{:.9f},{:.9f},{:.9f},{:.6f},{}\n", m.iteration, m.mean_latency_ms,
                          m.surrogate, m.value_loss, m.entropy, m.total_loss, m.clip_fraction, ids);
    }
}

PolicyEvaluation evaluate_policy(const PolicyParams& params, const PolicyConfig& config,
                                 std::span<const TaskGraph* const> graphs, const EnvFactory& env_factory,
                                 double rate_bps, std::size_t trajectories_per_dag, std::uint64_t seed,
                                 std::size_t threads) {
    PolicyEvaluation out;
    out.dags.resize(graphs.size());
    parallel_for(graphs.size(), threads, [&](std::size_t i) {
        const auto ctx = env_factory(*graphs[i], rate_bps);
        Rng rng(derive_seed(seed, {0xe7a1ULL, i}));
        DagEvaluation& d = out.dags[i];
        d.greedy_latency = rollout(params, config, ctx, rng, ActMode::Greedy).latency;
        d.best_latency = d.greedy_latency;
        double sum = 0.0;
        for (std::size_t k = 0; k < trajectories_per_dag; ++k) {
            const double l = rollout(params, config, ctx, rng, ActMode::Sample).latency;
            sum += l;
            d.best_latency = std::min(d.best_latency, l);
        }
        d.mean_latency = trajectories_per_dag ? sum / static_cast<double>(trajectories_per_dag) : d.greedy_latency;
    });
    for (const DagEvaluation& d : out.dags) {
        out.mean_best += d.best_latency;
        out.mean_sampled += d.mean_latency;
        out.mean_greedy += d.greedy_latency;
    }
    if (!graphs.empty()) {
        const auto k = static_cast<double>(graphs.size());
        out.mean_best /= k;
        out.mean_sampled /= k;
        out.mean_greedy /= k;
    }
    return out;
}

} // namespace dagoffload
