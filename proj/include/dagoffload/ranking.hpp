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

#include "dagoffload/system_profile.hpp"
#include "dagoffload/task_graph.hpp"

namespace dagoffload {

// Tasks in scheduling order. `order[k]` is the task placed k-th and
// `position[id]` inverts it.
struct RankedSequence {
    std::vector<TaskId> order;
    std::vector<double> rank;
    std::vector<std::size_t> position;
};

// Upward ranks: rank(i) = avg_cost(i) + max_{j in children(i)} (data_do(i)/r_do + rank(j)),
// where avg_cost is the mean of local execution time and the full offload
// round trip. Order is by descending rank, ties by ascending id, which is a
// topological order because every rank strictly exceeds its children's.
RankedSequence compute_ranks(const TaskGraph& graph, const SystemProfile& profile);

// True when `order` is a permutation in which every parent precedes its children.
bool is_topological(const TaskGraph& graph, const std::vector<TaskId>& order);

} // namespace dagoffload
