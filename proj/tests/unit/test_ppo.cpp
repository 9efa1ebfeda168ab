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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dagoffload/autodiff/ops.hpp"
#include "dagoffload/error.hpp"
#include "dagoffload/ppo.hpp"
#include "finite_diff.hpp"
#include "fixtures.hpp"

using namespace dagoffload;
using reftest::context_for;
using reftest::random_graph;

namespace {

// Advantage as the explicit double sum over future TD errors.
std::vector<double> gae_direct(const std::vector<double>& r, const std::vector<double>& v, double gamma, double lambda) {
    const std::size_t T = r.size();
    std::vector<double> out(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; t + k < T; ++k) {
            const double delta = r[t + k] + gamma * v[t + k + 1] - v[t + k];
            acc += std::pow(gamma * lambda, static_cast<double>(k)) * delta;
        }
        out[t] = acc;
    }
    return out;
}

struct Episode {
    std::vector<double> rewards;
    std::vector<double> values;
};

Episode random_episode(std::uint64_t seed, std::size_t T) {
    Rng rng(seed);
    Episode e;
    for (std::size_t t = 0; t < T; ++t) {
        e.rewards.push_back(rng.uniform(-1.0, 1.0));
        e.values.push_back(rng.uniform(-2.0, 2.0));
    }
    e.values.push_back(0.0);
    return e;
}

PolicyConfig tiny_config() {
    PolicyConfig c;
    c.layers = 1;
    c.heads = 2;
    c.d_model = 8;
    c.d_ff = 8;
    c.dropout = 0.0;
    c.index_length = 2;
    return c;
}

std::vector<Trajectory> collect(const PolicyParams& params, const PolicyConfig& c, std::size_t episodes,
                                std::size_t n, std::uint64_t seed) {
    std::vector<Trajectory> out;
    for (std::size_t e = 0; e < episodes; ++e) {
        const TaskGraph g = random_graph(seed + e, n);
        const SystemProfile p;
        auto ctx = make_context(g, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p), c.index_length);
        Rng rng(seed * 31 + e);
        out.push_back(rollout(params, c, ctx, rng));
    }
    return out;
}

std::vector<PpoSample> samples(const std::vector<Trajectory>& trajs, const TrainConfig& tc) {
    std::vector<PpoSample> out;
    for (const Trajectory& t : trajs) {
        std::vector<double> v = t.values;
        v.push_back(0.0);
        GaeResult g = compute_gae(t.rewards, v, tc.gamma, tc.lambda);
        out.push_back({&t, std::move(g.advantages), std::move(g.returns)});
    }
    return out;
}

} // namespace

TEST(Gae, MatchesDirectDoubleSum) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Episode e = random_episode(seed, 1 + seed % 17);
        const GaeResult g = compute_gae(e.rewards, e.values, 0.99, 0.95);
        const auto direct = gae_direct(e.rewards, e.values, 0.99, 0.95);
        for (std::size_t t = 0; t < direct.size(); ++t) {
            EXPECT_LE(std::abs(g.advantages[t] - direct[t]), 1e-12);
            EXPECT_DOUBLE_EQ(g.returns[t], g.advantages[t] + e.values[t]);
        }
    }
}

TEST(Gae, LambdaZeroIsOneStepTd) {
    const Episode e = random_episode(7, 6);
    const GaeResult g = compute_gae(e.rewards, e.values, 0.9, 0.0);
    for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(g.advantages[t], e.rewards[t] + 0.9 * e.values[t + 1] - e.values[t]);
}

TEST(Gae, LambdaOneZeroValuesIsRewardToGo) {
    Episode e = random_episode(8, 6);
    std::fill(e.values.begin(), e.values.end(), 0.0);
    const GaeResult g = compute_gae(e.rewards, e.values, 0.9, 1.0);
    for (std::size_t t = 0; t < 6; ++t) {
        double togo = 0.0;
        for (std::size_t k = 5 + 1; k-- > t;) togo = e.rewards[k] + 0.9 * togo;
        EXPECT_EQ(g.advantages[t], togo);
    }
}

TEST(Gae, LengthMismatch) {
    const std::vector<double> r{1.0, 2.0}, v{0.0, 0.0};
    try {
        compute_gae(r, v, 0.99, 0.95);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
}

TEST(Advantages, Normalize) {
    const std::vector<double> a{1.0, 2.0, 3.0, 6.0};
    const auto n = normalize_advantages(a);
    double mean = 0.0, var = 0.0;
    for (double x : n) mean += x / 4.0;
    for (double x : n) var += (x - mean) * (x - mean) / 4.0;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-6);
}

TEST(PpoLoss, IdentityEpoch) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 2);
    const auto trajs = collect(params, c, 4, 7, 11);
    TrainConfig tc;
    const auto batch = samples(trajs, tc);
    ad::Tape tape;
    const auto vars = bind_params(tape, params, true);
    const LossTerms t = ppo_loss(tape, vars, c, batch, tc, false, 0);
    EXPECT_LE(t.max_ratio_deviation, 1e-12);
    EXPECT_EQ(t.clip_fraction, 0.0);
    // Normalised advantages have mean 0, so the surrogate is -mean(A) = 0.
    EXPECT_NEAR(t.surrogate, 0.0, 1e-12);
    EXPECT_NEAR(t.entropy, std::numbers::ln2, 0.01 * std::numbers::ln2);
    EXPECT_EQ(t.steps, 28u);
}

TEST(PpoLoss, ClippedTermAboveOnePlusEps) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 2);
    auto trajs = collect(params, c, 2, 5, 3);
    for (Trajectory& t : trajs) {
        for (double& lp : t.log_probs) lp -= std::log(1.5);
    }
    TrainConfig tc;
    tc.c1 = tc.c2 = 0.0;
    std::vector<PpoSample> batch;
    for (const Trajectory& t : trajs) batch.push_back({&t, std::vector<double>(t.size(), 2.0), std::vector<double>(t.size(), 0.0)});
    ad::Tape tape;
    const auto vars = bind_params(tape, params, true);
    const LossTerms terms = ppo_loss(tape, vars, c, batch, tc, false, 0, false);
    EXPECT_NEAR(terms.surrogate, 1.2 * 2.0, 1e-9);
    EXPECT_NEAR(terms.total.value().item(), -2.4, 1e-9);
    EXPECT_EQ(terms.clip_fraction, 1.0);
    for (const ad::Tensor& g : tape.gradients(terms.total, vars)) {
        for (double x : g.data()) EXPECT_EQ(x, 0.0);
    }
}

TEST(PpoLoss, InvariantToAdvantageShift) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 4);
    const auto trajs = collect(params, c, 3, 6, 5);
    TrainConfig tc;
    auto batch = samples(trajs, tc);
    ad::Tape t1;
    const double base = ppo_loss(t1, bind_params(t1, params, false), c, batch, tc, false, 0).total.value().item();
    for (auto& s : batch) {
        for (double& a : s.advantages) a += 17.0;
    }
    ad::Tape t2;
    const double shifted = ppo_loss(t2, bind_params(t2, params, false), c, batch, tc, false, 0).total.value().item();
    EXPECT_NEAR(base, shifted, 1e-9);
}

TEST(PpoLoss, LargeEpsMatchesVanillaPolicyGradient) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 6);
    auto trajs = collect(params, c, 3, 5, 9);
    // Move the sampling log-probs so the ratios differ from 1.
    Rng rng(1);
    for (Trajectory& t : trajs) {
        for (double& lp : t.log_probs) lp += rng.uniform(-0.3, 0.3);
    }
    TrainConfig tc;
    tc.clip_eps = 1e9;
    tc.c1 = tc.c2 = 0.0;
    const auto batch = samples(trajs, tc);
    ad::Tape tape;
    const auto vars = bind_params(tape, params, true);
    const LossTerms terms = ppo_loss(tape, vars, c, batch, tc, false, 0, false);
    const auto grads = tape.gradients(terms.total, vars);

    // -1/N sum_t A_t r_t grad log pi(a_t|s_t), one tape per step.
    std::size_t steps = 0;
    for (const Trajectory& t : trajs) steps += t.size();
    std::vector<ad::Tensor> expected;
    for (const auto& v : params.values) expected.emplace_back(v.shape());
    for (std::size_t e = 0; e < trajs.size(); ++e) {
        const Trajectory& t = trajs[e];
        for (std::size_t s = 0; s < t.size(); ++s) {
            ad::Tape st;
            const auto sv = bind_params(st, params, true);
            const PolicyVars out = forward(st, sv, c, PolicyInput{t.context->embeddings, std::span(t.actions).first(s), 0, {}}, false, 0);
            const ad::Var logp = ad::slice(ad::slice(ad::log_softmax(out.logits), 0, s, 1), 1, t.actions[s], 1);
            const double ratio = std::exp(logp.value().item() - t.log_probs[s]);
            const double w = -batch[e].advantages[s] * ratio / static_cast<double>(steps);
            const auto g = st.gradients(ad::sum(logp), sv);
            for (std::size_t i = 0; i < g.size(); ++i) {
                for (std::size_t k = 0; k < g[i].size(); ++k) expected[i][k] += w * g[i][k];
            }
        }
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        for (std::size_t k = 0; k < grads[i].size(); ++k) EXPECT_NEAR(grads[i][k], expected[i][k], 1e-8) << params.names[i];
    }
}

TEST(PpoLoss, GradientMatchesFiniteDifferences) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 6);
    auto trajs = collect(params, c, 2, 4, 12);
    Rng rng(2);
    for (Trajectory& t : trajs) {
        for (double& lp : t.log_probs) lp += rng.uniform(-0.1, 0.1);
    }
    TrainConfig tc;
    const auto batch = samples(trajs, tc);
    const auto loss_at = [&](const PolicyParams& p) {
        ad::Tape tape;
        return ppo_loss(tape, bind_params(tape, p, false), c, batch, tc, false, 0).total.value().item();
    };
    ad::Tape tape;
    const auto vars = bind_params(tape, params, true);
    const auto grads = tape.gradients(ppo_loss(tape, vars, c, batch, tc, false, 0).total, vars);
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t k = 0; k < params.values[i].size(); ++k) {
            PolicyParams p = params;
            const double h = 1e-6;
            p.values[i][k] += h;
            const double plus = loss_at(p);
            p.values[i][k] -= 2 * h;
            const double minus = loss_at(p);
            worst = std::max(worst, reftest::relative_error(grads[i][k], (plus - minus) / (2 * h)));
        }
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(PpoLoss, SmallStepLowersLoss) {
    const PolicyConfig c = tiny_config();
    auto params = PolicyParams::initialize(c, 6);
    const auto trajs = collect(params, c, 4, 6, 13);
    TrainConfig tc;
    const auto batch = samples(trajs, tc);
    ad::Tape tape;
    const auto vars = bind_params(tape, params, true);
    const LossTerms before = ppo_loss(tape, vars, c, batch, tc, false, 0);
    const auto grads = tape.gradients(before.total, vars);
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t k = 0; k < grads[i].size(); ++k) params.values[i][k] -= 1e-3 * grads[i][k];
    }
    ad::Tape t2;
    const double after = ppo_loss(t2, bind_params(t2, params, false), c, batch, tc, false, 0).total.value().item();
    EXPECT_LT(after, before.total.value().item());
}

TEST(Rollout, RewardsSumToMinusLatency) {
    const PolicyConfig c = tiny_config();
    const auto params = PolicyParams::initialize(c, 6);
    for (const Trajectory& t : collect(params, c, 20, 9, 100)) {
        double sum = 0.0;
        for (double r : t.rewards) sum += r;
        EXPECT_LT(std::abs(sum + t.latency), 1e-9);
        const auto plan = evaluate_plan(t.context->graph, t.context->seq, OffloadingPlan{t.actions}, t.context->profile);
        EXPECT_DOUBLE_EQ(plan.latency, t.latency);
    }
}

TEST(TrainConfigTest, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.gamma = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.lambda = 1.5;
    EXPECT_THROW(c.validate(), Error);
    c = TrainConfig{};
    c.clip_eps = 0.0;
    EXPECT_THROW(c.validate(), Error);
    const TrainConfig p = TrainConfig::paper();
    EXPECT_EQ(p.lr_policy, 0.1);
    EXPECT_EQ(p.lr_value, 0.01);
    EXPECT_EQ(p.batch_size, 100u);
    EXPECT_EQ(p.clip_eps, 0.2);
    EXPECT_EQ(p.gamma, 0.99);
    EXPECT_EQ(p.c2, 0.5);
}
