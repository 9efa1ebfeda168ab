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

#include "dagoffload/embedding.hpp"
#include "dagoffload/ranking.hpp"
#include "dagoffload/serialization.hpp"
#include "fixtures.hpp"

using namespace dagoffload;
using reftest::chain;
using reftest::independent;
using reftest::make_task;

namespace {

ErrorCode code_of(const std::vector<Task>& tasks, const std::vector<Edge>& edges) {
    auto err = validate(tasks, edges);
    EXPECT_TRUE(err.has_value());
    return err ? err->code : ErrorCode::InvalidArgument;
}

std::vector<Task> three() { return {make_task(0, 1e7), make_task(1, 1e7), make_task(2, 1e7)}; }

} // namespace

TEST(Validate, ChainIsValid) { EXPECT_FALSE(validate(three(), std::vector<Edge>{{0, 1}, {1, 2}}).has_value()); }

TEST(Validate, TwoCycle) {
    std::vector<Task> t{make_task(0, 1e7), make_task(1, 1e7)};
    EXPECT_EQ(code_of(t, {{0, 1}, {1, 0}}), ErrorCode::CycleDetected);
}

TEST(Validate, LongerCycleAmongValidTasks) {
    EXPECT_EQ(code_of(three(), {{0, 1}, {1, 2}, {2, 1}}), ErrorCode::CycleDetected);
}

TEST(Validate, DanglingEdge) { EXPECT_EQ(code_of(three(), {{0, 7}}), ErrorCode::DanglingEdge); }

TEST(Validate, EmptyGraph) { EXPECT_EQ(code_of({}, {}), ErrorCode::EmptyGraph); }

TEST(Validate, SelfAndDuplicateEdges) {
    EXPECT_EQ(code_of(three(), {{1, 1}}), ErrorCode::SelfEdge);
    EXPECT_EQ(code_of(three(), {{0, 1}, {0, 1}}), ErrorCode::DuplicateEdge);
}

TEST(Validate, TaskInvariants) {
    EXPECT_EQ(code_of({make_task(0, 0.0)}, {}), ErrorCode::InvalidTask);
    EXPECT_EQ(code_of({make_task(0, 1e7, -1.0)}, {}), ErrorCode::InvalidTask);
    EXPECT_EQ(code_of({make_task(1, 1e7)}, {}), ErrorCode::InvalidTask);
}

TEST(TaskGraph, ConstructorThrowsOnInvalid) {
    try {
        TaskGraph g(three(), {{0, 1}, {1, 0}});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CycleDetected);
    }
}

TEST(TaskGraph, EntryAndExitTasks) {
    TaskGraph g(three(), {{0, 2}, {1, 2}});
    EXPECT_EQ(g.entry_tasks(), (std::vector<TaskId>{0, 1}));
    EXPECT_EQ(g.exit_tasks(), (std::vector<TaskId>{2}));
    EXPECT_EQ(g.parents(2), (std::vector<TaskId>{0, 1}));
    EXPECT_TRUE(g.children(2).empty());
}

TEST(TaskGraph, JsonRoundTripAndDot) {
    const TaskGraph g = reftest::random_graph(5, 15);
    const Json j = graph_to_json(g);
    EXPECT_EQ(j["n"].get<std::size_t>(), 15u);
    EXPECT_EQ(graph_from_json(Json::parse(dump(j))), g);
    const std::string dot = to_dot(g);
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    for (const Edge& e : g.edges()) {
        EXPECT_NE(dot.find("t" + std::to_string(e.parent) + " -> t" + std::to_string(e.child)), std::string::npos);
    }
}

TEST(TaskGraph, MalformedJson) {
    EXPECT_THROW(graph_from_json(Json::parse(R"({"n": 1, "tasks": [{"id": 0}]})")), Error);
    try {
        graph_from_json(Json::parse(R"({"n": 2, "tasks": [{"id":0,"cycles":1,"data_up":1,"data_do":1},
            {"id":1,"cycles":1,"data_up":1,"data_do":1}], "edges": [[0,1],[1,0]]})"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CycleDetected);
    }
}

TEST(Ranks, SingleTask) {
    const TaskGraph g = independent({1e7});
    const SystemProfile p;
    const RankedSequence s = compute_ranks(g, p);
    EXPECT_EQ(s.order, (std::vector<TaskId>{0}));
    const TaskTimes t = task_times(g.task(0), p);
    EXPECT_DOUBLE_EQ(s.rank[0], 0.5 * (t.local + t.offload_roundtrip()));
}

TEST(Ranks, HeavierIndependentTaskFirst) {
    const RankedSequence s = compute_ranks(independent({1e7, 1e8}), SystemProfile{});
    EXPECT_EQ(s.order, (std::vector<TaskId>{1, 0}));
}

TEST(Ranks, TiesByAscendingId) {
    const RankedSequence s = compute_ranks(independent({1e7, 1e7, 1e7}), SystemProfile{});
    EXPECT_EQ(s.order, (std::vector<TaskId>{0, 1, 2}));
}

TEST(Ranks, ChainOrder) {
    const RankedSequence s = compute_ranks(chain(2), SystemProfile{});
    EXPECT_EQ(s.order, (std::vector<TaskId>{0, 1}));
}

TEST(Ranks, ChildListedBeforeParentById) {
    // Parent has the larger id; the order must still put it first.
    TaskGraph g({make_task(0, 1e8), make_task(1, 1e7)}, {{1, 0}});
    EXPECT_EQ(compute_ranks(g, SystemProfile{}).order, (std::vector<TaskId>{1, 0}));
}

TEST(Ranks, MatchRecursiveReferenceAndAreTopological) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const TaskGraph g = reftest::random_graph(seed, 3 + seed % 18);
        const SystemProfile p = SystemProfile::with_rate(mbps(4.0 + static_cast<double>(seed % 7) * 3.0));
        const RankedSequence s = compute_ranks(g, p);
        const std::vector<double> ref = reftest::reference_ranks(g, reftest::ref_profile(p));
        for (TaskId v = 0; v < g.size(); ++v) EXPECT_NEAR(s.rank[v], ref[v], 1e-15 * ref[v]);
        EXPECT_TRUE(is_topological(g, s.order));
        for (const Edge& e : g.edges()) EXPECT_GT(s.rank[e.parent], s.rank[e.child]);
        for (std::size_t k = 0; k < s.order.size(); ++k) EXPECT_EQ(s.position[s.order[k]], k);
    }
}

TEST(Ranks, IsTopologicalRejectsBadOrders) {
    const TaskGraph g = chain(3);
    EXPECT_TRUE(is_topological(g, {0, 1, 2}));
    EXPECT_FALSE(is_topological(g, {1, 0, 2}));
    EXPECT_FALSE(is_topological(g, {0, 1}));
    EXPECT_FALSE(is_topological(g, {0, 0, 2}));
}

TEST(Embedding, EntryTaskPadding) {
    const TaskGraph g = chain(3);
    const SystemProfile p;
    const RankedSequence s = compute_ranks(g, p);
    const auto e = embed(g, s, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p));
    ASSERT_EQ(e.size(), 3u);
    EXPECT_EQ(e[0].parents, std::vector<int>(12, -1));
    EXPECT_EQ(e[0].children[0], 1);
    EXPECT_EQ(e[1].parents[0], 0);
    EXPECT_EQ(e[2].children, std::vector<int>(12, -1));
}

TEST(Embedding, TruncationKeepsHighestRankParents) {
    // Parents 0,1,2 with distinct ranks feed task 3.
    TaskGraph g({make_task(0, 3e7), make_task(1, 9e7), make_task(2, 6e7), make_task(3, 1e7)},
                {{0, 3}, {1, 3}, {2, 3}});
    const SystemProfile p;
    const RankedSequence s = compute_ranks(g, p);
    EXPECT_EQ(s.order, (std::vector<TaskId>{1, 2, 0, 3}));
    const auto e = embed(g, s, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p), 2);
    EXPECT_EQ(e[3].parents, (std::vector<int>{0, 1}));
    EXPECT_EQ(e[0].children, (std::vector<int>{3, -1}));
}

TEST(Embedding, RangeEndpoints) {
    TaskGraph g({make_task(0, 1e8, 5e4, 5e3), make_task(1, 1e7, 5e3, 5e4)}, {});
    const SystemProfile p;
    const RankedSequence s = compute_ranks(g, p);
    const auto e = embed(g, s, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p));
    const auto& big = e[s.position[0]];
    const auto& small = e[s.position[1]];
    EXPECT_DOUBLE_EQ(big.profile[0], 1.0);
    EXPECT_DOUBLE_EQ(big.profile[1], 1.0);
    EXPECT_DOUBLE_EQ(big.profile[2], 0.0);
    EXPECT_DOUBLE_EQ(big.profile[3], 1.0);
    EXPECT_DOUBLE_EQ(small.profile[0], 0.0);
    EXPECT_DOUBLE_EQ(small.profile[3], 0.0);
}

TEST(Embedding, DeterministicAndBounded) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TaskGraph g = reftest::random_graph(seed + 100, 20);
        for (double rate : {4.0, 8.5, 22.0}) {
            const SystemProfile p = SystemProfile::with_rate(mbps(rate));
            const RankedSequence s = compute_ranks(g, p);
            const FeatureBounds b = FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p);
            const auto e1 = embed(g, s, p, b);
            EXPECT_EQ(e1, embed(g, s, p, b));
            for (const auto& t : e1) {
                for (double f : t.profile) {
                    EXPECT_GE(f, 0.0);
                    EXPECT_LE(f, 1.0);
                }
                EXPECT_EQ(t.parents.size(), kDefaultIndexLength);
            }
        }
    }
}

TEST(Embedding, ZeroIndexLengthRejected) {
    const TaskGraph g = chain(2);
    const SystemProfile p;
    EXPECT_THROW(embed(g, compute_ranks(g, p), p, FeatureBounds{}, 0), Error);
}
