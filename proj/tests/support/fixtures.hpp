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

#include <vector>

#include "dagoffload/embedding.hpp"
#include "dagoffload/generator.hpp"
#include "dagoffload/latency_sim.hpp"
#include "dagoffload/rng.hpp"
#include "dagoffload/system_profile.hpp"
#include "dagoffload/task_graph.hpp"
#include "reference_latency.hpp"

namespace reftest {

using dagoffload::Edge;
using dagoffload::Task;
using dagoffload::TaskGraph;

inline Task make_task(std::size_t id, double cycles, double up = 5000.0, double down = 5000.0) {
    return Task{id, cycles, up, down};
}

inline TaskGraph chain(std::size_t n, double cycles = 1e7, double up = 5000.0, double down = 5000.0) {
    std::vector<Task> tasks;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        tasks.push_back(make_task(i, cycles, up, down));
        if (i > 0) edges.push_back({i - 1, i});
    }
    return TaskGraph(tasks, edges);
}

inline TaskGraph independent(std::vector<double> cycles, double up = 5000.0, double down = 5000.0) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < cycles.size(); ++i) tasks.push_back(make_task(i, cycles[i], up, down));
    return TaskGraph(tasks, {});
}

// Generated DAG with shape parameters drawn from the seed.
inline TaskGraph random_graph(std::uint64_t seed, std::size_t n) {
    dagoffload::Rng rng(seed);
    dagoffload::GeneratorConfig c;
    c.n = n;
    c.fat = rng.uniform(0.2, 1.0);
    c.density = rng.uniform(0.1, 1.0);
    c.ccr = rng.uniform(0.1, 2.0);
    c.seed = seed;
    return dagoffload::generate_dag(c);
}

inline RefProfile ref_profile(const dagoffload::SystemProfile& p) {
    return RefProfile{p.device_speed, p.edge_total / static_cast<double>(p.users), p.rate_up, p.rate_do};
}

inline std::vector<int> to_ints(const std::vector<std::uint8_t>& d) { return {d.begin(), d.end()}; }

inline std::shared_ptr<const dagoffload::EpisodeContext> context_for(const TaskGraph& g,
                                                                    const dagoffload::SystemProfile& p = {}) {
    using namespace dagoffload;
    return make_context(g, p, FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, p));
}

} // namespace reftest
