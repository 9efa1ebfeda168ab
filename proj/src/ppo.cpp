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

#include "dagoffload/ppo.hpp"

#include <cmath>

#include "dagoffload/autodiff/ops.hpp"

namespace dagoffload {

void TrainConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) fail(ErrorCode::InvalidConfig, "gamma must lie in (0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::InvalidConfig, "lambda must lie in [0,1]");
    if (!(clip_eps > 0.0)) fail(ErrorCode::InvalidConfig, "clip_eps must be positive");
    if (!(c1 >= 0.0 && c2 >= 0.0)) fail(ErrorCode::InvalidConfig, "loss coefficients must be non-negative");
    if (!(lr_policy >= 0.0 && lr_value >= 0.0)) fail(ErrorCode::InvalidConfig, "learning rates must be non-negative");
    if (batch_size == 0 || tasks_per_iter == 0 || trajectories_per_task == 0) {
        fail(ErrorCode::InvalidConfig, "batch and sampling counts must be positive");
    }
    if (rates_mbps.empty()) fail(ErrorCode::InvalidConfig, "at least one training rate is required");
    for (double r : rates_mbps)
        if (!(r > 0.0)) fail(ErrorCode::InvalidConfig, "rates must be positive");
}

TrainConfig TrainConfig::paper() {
    TrainConfig c;
    c.lr_policy = 0.1;
    c.lr_value = 0.01;
    c.batch_size = 100;
    c.clip_eps = 0.2;
    c.gamma = 0.99;
    c.c2 = 0.5;
    return c;
}

Json train_config_to_json(const TrainConfig& c) {
    Json j = Json::object();
    j["policy_lr"] = c.lr_policy;
    j["value_lr"] = c.lr_value;
    j["clip_ratio"] = c.clip_eps;
    j["discount"] = c.gamma;
    j["gae_lambda"] = c.lambda;
    j["value_coef"] = c.c1;
    j["entropy_coef"] = c.c2;
    j["epochs"] = c.epochs_per_iter;
    j["batch_size"] = c.batch_size;
    j["iterations"] = c.iterations;
    j["tasks_per_iter"] = c.tasks_per_iter;
    j["trajectories_per_task"] = c.trajectories_per_task;
    j["seed"] = c.seed;
    j["optimizer"] = c.optimizer == OptimizerKind::Adagrad ? "adagrad" : "adam";
    j["dropout_in_update"] = c.dropout_in_update;
    j["rates_mbps"] = c.rates_mbps;
    return j;
}

Trajectory rollout(const PolicyParams& params, const PolicyConfig& config,
                   std::shared_ptr<const EpisodeContext> context, Rng& rng, ActMode mode) {
    Trajectory t;
    t.context = context;
    const std::size_t n = context->size();
    t.actions.reserve(n);
    t.log_probs.reserve(n);
    t.values.reserve(n);
    t.rewards.reserve(n);
    EnvState state = reset(std::move(context));
    while (!state.done()) {
        const ActResult a = act(params, config, state, rng, mode);
        StepResult r = step(std::move(state), a.action);
        state = std::move(r.state);
        t.actions.push_back(a.action);
        t.log_probs.push_back(a.log_prob);
        t.values.push_back(a.value);
        t.rewards.push_back(r.reward);
    }
    t.latency = state.latency();
    return t;
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma, double lambda) {
    if (values.size() != rewards.size() + 1) {
        fail(ErrorCode::LengthMismatch, "GAE needs one value per step plus the bootstrap value");
    }
    const std::size_t n = rewards.size();
    GaeResult out{std::vector<double>(n), std::vector<double>(n)};
    double next = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double delta = rewards[t] + gamma * values[t + 1] - values[t];
        next = delta + gamma * lambda * next;
        out.advantages[t] = next;
        out.returns[t] = next + values[t];
    }
    return out;
}

std::vector<double> normalize_advantages(std::span<const double> advantages, double eps) {
    std::vector<double> out(advantages.begin(), advantages.end());
    if (out.empty()) return out;
    double mu = 0.0;
    for (double a : out) mu += a;
    mu /= static_cast<double>(out.size());
    double var = 0.0;
    for (double a : out) var += (a - mu) * (a - mu);
    const double sd = std::sqrt(var / static_cast<double>(out.size()));
    for (double& a : out) a = (a - mu) / (sd + eps);
    return out;
}

LossTerms ppo_loss(ad::Tape& tape, std::span<const ad::Var> params, const PolicyConfig& policy,
                   std::span<const PpoSample> batch, const TrainConfig& config, bool train, std::uint64_t seed,
                   bool normalize) {
    using ad::Shape;
    using ad::Tensor;
    using ad::Var;
    if (batch.empty()) fail(ErrorCode::InvalidArgument, "empty PPO batch");

    std::vector<double> all_adv;
    for (const PpoSample& s : batch) {
        const Trajectory& t = *s.trajectory;
        if (s.advantages.size() != t.size() || s.returns.size() != t.size()) {
            fail(ErrorCode::LengthMismatch, "advantages/returns do not match trajectory length");
        }
        all_adv.insert(all_adv.end(), s.advantages.begin(), s.advantages.end());
    }
    if (normalize) all_adv = normalize_advantages(all_adv);

    LossTerms terms;
    terms.steps = all_adv.size();
    const double inv_steps = 1.0 / static_cast<double>(terms.steps);
    const double lo = 1.0 - config.clip_eps;
    const double hi = 1.0 + config.clip_eps;
    std::vector<Var> surrogate_parts, value_parts, entropy_parts;
    std::size_t offset = 0;
    std::size_t clipped = 0;
    double ratio_sum = 0.0;

    for (std::size_t e = 0; e < batch.size(); ++e) {
        const Trajectory& traj = *batch[e].trajectory;
        const std::size_t n = traj.size();
        const auto& emb = traj.context->embeddings;
        const std::uint64_t ep_seed = derive_seed(seed, {e});

        Var logits, values;
        if (policy.causal) {
            const PolicyVars out = forward(tape, params, policy, PolicyInput{emb, traj.actions, n, {}}, train, ep_seed);
            logits = out.logits;
            values = out.values;
        } else {
            // Without the causal mask each step needs its own pass over its own prefix of decisions.
            std::vector<Var> lrows, vrows;
            for (std::size_t t = 0; t < n; ++t) {
                const PolicyVars out = forward(tape, params, policy,
                                               PolicyInput{emb, std::span(traj.actions).first(t), n, {}}, train,
                                               derive_seed(ep_seed, {t}));
                lrows.push_back(ad::slice(out.logits, 0, t, 1));
                vrows.push_back(ad::slice(out.values, 0, t, 1));
            }
            logits = ad::concat(lrows, 0);
            values = ad::concat(vrows, 0);
        }

        Tensor onehot(Shape{n, 2});
        Tensor old_lp(Shape{n, 1});
        Tensor adv(Shape{n, 1});
        Tensor ret(Shape{n, 1});
        for (std::size_t t = 0; t < n; ++t) {
            onehot.at(t, traj.actions[t] == kOffload ? 1 : 0) = 1.0;
            old_lp[t] = traj.log_probs[t];
            adv[t] = all_adv[offset + t];
            ret[t] = batch[e].returns[t];
        }
        offset += n;

        const Var logp = ad::log_softmax(logits);
        const Var chosen = ad::sum(ad::mul(logp, tape.constant(onehot)), 1);
        const Var ratio = ad::exp(ad::sub(chosen, tape.constant(old_lp)));
        const Var adv_c = tape.constant(adv);
        const Var surrogate = ad::minimum(ad::mul(ratio, adv_c), ad::mul(ad::clip(ratio, lo, hi), adv_c));
        surrogate_parts.push_back(ad::sum(surrogate));

        const Var err = ad::sub(values, tape.constant(ret));
        value_parts.push_back(ad::sum(ad::mul(err, err)));

        const Var entropy = ad::neg(ad::sum(ad::mul(ad::exp(logp), logp), 1));
        entropy_parts.push_back(ad::sum(entropy));

        for (double r : ratio.value().data()) {
            ratio_sum += r;
            terms.max_ratio_deviation = std::max(terms.max_ratio_deviation, std::abs(r - 1.0));
            if (r < lo || r > hi) ++clipped;
        }
    }

    auto total_of = [](const std::vector<Var>& parts) {
        Var acc = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) acc = ad::add(acc, parts[i]);
        return acc;
    };
    const Var surrogate_sum = total_of(surrogate_parts);
    const Var value_sum = total_of(value_parts);
    const Var entropy_sum = total_of(entropy_parts);

    terms.surrogate = surrogate_sum.value().item() * inv_steps;
    terms.value = value_sum.value().item() * inv_steps;
    terms.entropy = entropy_sum.value().item() * inv_steps;
    terms.mean_ratio = ratio_sum * inv_steps;
    terms.clip_fraction = static_cast<double>(clipped) * inv_steps;

    Var loss = ad::scale(surrogate_sum, -inv_steps);
    loss = ad::add(loss, ad::scale(value_sum, config.c1 * inv_steps));
    loss = ad::add(loss, ad::scale(entropy_sum, -config.c2 * inv_steps));
    terms.total = loss;
    return terms;
}

} // namespace dagoffload
