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

#include <algorithm>

#include "dagoffload/latency_sim.hpp"
#include "fixtures.hpp"

using namespace dagoffload;
using reftest::chain;
using reftest::independent;
using reftest::make_task;

namespace {

std::shared_ptr<const EpisodeContext> context(const TaskGraph& g, const SystemProfile& p = SystemProfile{}) {
    return make_context(g, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p));
}

} // namespace

TEST(TaskTimes, ClosedForms) {
    const SystemProfile p;
    const TaskTimes t = task_times(make_task(0, 1e7, 5000.0, 5000.0), p);
    EXPECT_NEAR(t.local * 1e3, 10.0, 1e-12);
    EXPECT_NEAR(t.edge * 1e3, 1.0, 1e-12);
    EXPECT_NEAR(t.up * 1e3, 40000.0 / 8.5e6 * 1e3, 1e-12);
    EXPECT_NEAR(t.up * 1e3, 4.706, 1e-3);
    EXPECT_DOUBLE_EQ(t.down, t.up);
}

TEST(TaskTimes, ContainerShare) {
    SystemProfile p;
    p.users = 4;
    EXPECT_DOUBLE_EQ(p.edge_speed(), 2.5e9);
    EXPECT_DOUBLE_EQ(task_times(make_task(0, 1e7), p).edge, 1e7 / 2.5e9);
    p.rate_up = 0.0;
    EXPECT_THROW(p.validate(), Error);
}

TEST(Step, SingleTaskLocal) {
    const TaskGraph g = independent({1e7});
    auto s = reset(context(g));
    EXPECT_EQ(s.cursor(), 0u);
    EXPECT_EQ(s.latency(), 0.0);
    const StepResult r = step(s, kLocal);
    EXPECT_DOUBLE_EQ(r.reward, -0.01);
    EXPECT_DOUBLE_EQ(r.state.schedule.finish[0].ud, 0.01);
    EXPECT_TRUE(r.state.done());
    EXPECT_THROW(step(r.state, kLocal), Error);
}

TEST(Step, SingleTaskOffload) {
    const TaskGraph g = independent({1e7});
    const StepResult r = step(reset(context(g)), kOffload);
    const TaskTimes t = task_times(g.task(0), SystemProfile{});
    EXPECT_DOUBLE_EQ(r.reward, -(t.up + t.edge + t.down));
    const TaskFinish& f = r.state.schedule.finish[0];
    EXPECT_EQ(f.ud, 0.0);
    EXPECT_LE(f.up, f.ec);
    EXPECT_LE(f.ec, f.down);
}

TEST(Step, UplinkSerialisation) {
    const TaskGraph g = independent({1e7, 1e7});
    auto s = step(reset(context(g)), kOffload).state;
    s = step(s, kOffload).state;
    const TaskTimes t = task_times(g.task(0), SystemProfile{});
    EXPECT_DOUBLE_EQ(s.schedule.finish[1].up, 2 * t.up);
}

TEST(Step, DeviceSerialisation) {
    const TaskGraph g = independent({1e7, 2e7});
    const auto ctx = context(g);
    auto s = step(reset(ctx), kLocal).state;
    s = step(s, kLocal).state;
    EXPECT_NEAR(s.latency(), 0.03, 1e-15);
}

TEST(Step, ResetIsFresh) {
    const TaskGraph g = reftest::random_graph(4, 10);
    const auto ctx = context(g);
    auto s = reset(ctx);
    while (!s.done()) s = step(s, kOffload).state;
    const EnvState a = reset(ctx);
    const EnvState b = reset(ctx);
    EXPECT_EQ(a.cursor(), 0u);
    EXPECT_EQ(a.latency(), 0.0);
    EXPECT_EQ(a.plan, b.plan);
    EXPECT_EQ(a.embeddings(), b.embeddings());
    EXPECT_EQ(a.schedule.free_at.uplink, 0.0);
}

TEST(EvaluatePlan, LocalChain) {
    const TaskGraph g = chain(3, 1e7);
    const SystemProfile p;
    const auto ev = evaluate_plan(g, compute_ranks(g, p), OffloadingPlan::uniform(3, kLocal), p);
    EXPECT_NEAR(ev.latency, 0.03, 1e-15);
}

TEST(EvaluatePlan, IncompletePlan) {
    const TaskGraph g = chain(3);
    const SystemProfile p;
    try {
        evaluate_plan(g, compute_ranks(g, p), OffloadingPlan::uniform(2, kLocal), p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IncompletePlan);
    }
}

TEST(EvaluatePlan, Bitstrings) {
    EXPECT_EQ(OffloadingPlan::from_bitstring("0110").to_bitstring(), "0110");
    EXPECT_THROW(OffloadingPlan::from_bitstring("012"), Error);
}

TEST(EvaluatePlan, MatchesRecursiveReferenceAndStepFold) {
    Rng rng(99);
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const TaskGraph g = reftest::random_graph(seed + 7, 1 + seed % 12);
        const SystemProfile p = SystemProfile::with_rate(mbps(rng.uniform(4.0, 22.0)));
        const RankedSequence seq = compute_ranks(g, p);
        OffloadingPlan plan;
        for (std::size_t i = 0; i < g.size(); ++i) plan.decisions.push_back(rng.bernoulli(0.5) ? kOffload : kLocal);
        const auto ev = evaluate_plan(g, seq, plan, p);
        const auto ref = reftest::reference_latency(g, seq.order, reftest::to_ints(plan.decisions), reftest::ref_profile(p));
        EXPECT_EQ(ev.latency, ref.latency);
        for (TaskId v = 0; v < g.size(); ++v) {
            EXPECT_EQ(ev.schedule.finish[v].ud, ref.finish[v].ud);
            EXPECT_EQ(ev.schedule.finish[v].down, ref.finish[v].down);
        }
        auto s = reset(make_context(g, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p)));
        double total = 0.0;
        for (Decision d : plan.decisions) {
            auto r = step(s, d);
            total += r.reward;
            s = std::move(r.state);
        }
        EXPECT_EQ(s.latency(), ev.latency);
        EXPECT_NEAR(total, -ev.latency, 1e-12);
    }
}

TEST(EvaluatePlan, ScheduleInvariants) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const TaskGraph g = reftest::random_graph(seed + 300, 12);
        const SystemProfile p;
        const RankedSequence seq = compute_ranks(g, p);
        Rng rng(seed);
        OffloadingPlan plan;
        for (std::size_t i = 0; i < g.size(); ++i) plan.decisions.push_back(rng.bernoulli(0.5) ? kOffload : kLocal);
        const auto ev = evaluate_plan(g, seq, plan, p);
        struct Interval {
            double start, end;
        };
        std::vector<Interval> device, up, edge, down;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const TaskId v = seq.order[k];
            const TaskFinish& f = ev.schedule.finish[v];
            const TaskTimes t = task_times(g.task(v), p);
            if (plan.decisions[k] == kLocal) {
                EXPECT_GT(f.ud, 0.0);
                EXPECT_EQ(f.up + f.ec + f.down, 0.0);
                device.push_back({f.ud - t.local, f.ud});
                for (TaskId q : g.parents(v)) {
                    EXPECT_LE(ev.schedule.finish[q].completion(), f.ud - t.local + 1e-15);
                }
            } else {
                EXPECT_EQ(f.ud, 0.0);
                EXPECT_GT(f.up, 0.0);
                EXPECT_LE(f.up, f.ec);
                EXPECT_LE(f.ec, f.down);
                up.push_back({f.up - t.up, f.up});
                edge.push_back({f.ec - t.edge, f.ec});
                down.push_back({f.down - t.down, f.down});
                for (TaskId q : g.parents(v)) {
                    const TaskFinish& pf = ev.schedule.finish[q];
                    EXPECT_LE(std::max(pf.ud, pf.up), f.up - t.up + 1e-15);
                    EXPECT_LE(pf.ec, f.ec - t.edge + 1e-15);
                }
            }
        }
        for (auto* res : {&device, &up, &edge, &down}) {
            std::sort(res->begin(), res->end(), [](auto a, auto b) { return a.start < b.start; });
            for (std::size_t i = 1; i < res->size(); ++i) EXPECT_LE((*res)[i - 1].end, (*res)[i].start + 1e-15);
        }
    }
}

TEST(EvaluatePlan, MonotoneInRatesForFixedSequence) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TaskGraph g = reftest::random_graph(seed + 500, 12);
        const RankedSequence seq = compute_ranks(g, SystemProfile{});
        Rng rng(seed);
        OffloadingPlan plan;
        for (std::size_t i = 0; i < g.size(); ++i) plan.decisions.push_back(rng.bernoulli(0.6) ? kOffload : kLocal);
        double prev = std::numeric_limits<double>::infinity();
        for (double r = 4.0; r <= 22.0; r += 1.0) {
            const double al = evaluate_plan(g, seq, plan, SystemProfile::with_rate(mbps(r))).latency;
            EXPECT_LE(al, prev);
            prev = al;
        }
        // Uplink and downlink independently.
        SystemProfile a, b;
        b.rate_up = a.rate_up * 2;
        EXPECT_LE(evaluate_plan(g, seq, plan, b).latency, evaluate_plan(g, seq, plan, a).latency);
        b = a;
        b.rate_do = a.rate_do * 2;
        EXPECT_LE(evaluate_plan(g, seq, plan, b).latency, evaluate_plan(g, seq, plan, a).latency);
        const auto local = OffloadingPlan::uniform(g.size(), kLocal);
        EXPECT_EQ(evaluate_plan(g, seq, local, SystemProfile::with_rate(mbps(4))).latency,
                  evaluate_plan(g, seq, local, SystemProfile::with_rate(mbps(22))).latency);
    }
}

TEST(EvaluatePlan, AllLocalIsSerialisedSum) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TaskGraph g = reftest::random_graph(seed + 900, 15);
        const SystemProfile p;
        double sum = 0.0;
        for (TaskId v = 0; v < g.size(); ++v) sum += task_times(g.task(v), p).local;
        const double al = evaluate_plan(g, compute_ranks(g, p), OffloadingPlan::uniform(g.size(), kLocal), p).latency;
        EXPECT_NEAR(al, sum, 1e-12);
    }
}
