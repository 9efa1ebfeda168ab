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

#include "dagoffload/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace dagoffload {

RankedSequence compute_ranks(const TaskGraph& graph, const SystemProfile& profile) {
    profile.validate();
    const std::size_t n = graph.size();
    RankedSequence seq;
    seq.rank.assign(n, 0.0);

    // Ids are not topologically sorted in general, so evaluate the recurrence
    // in reverse topological order obtained from a DFS post-order.
    std::vector<TaskId> post;
    post.reserve(n);
    std::vector<char> state(n, 0);
    std::vector<std::pair<TaskId, std::size_t>> stack;
    for (TaskId root = 0; root < n; ++root) {
        if (state[root]) continue;
        stack.emplace_back(root, 0);
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            const auto& ch = graph.children(v);
            if (next < ch.size()) {
                TaskId c = ch[next++];
                if (!state[c]) {
                    state[c] = 1;
                    stack.emplace_back(c, 0);
                }
            } else {
                post.push_back(v);
                stack.pop_back();
            }
        }
    }

    for (TaskId v : post) {
        const Task& t = graph.task(v);
        const TaskTimes times = task_times(t, profile);
        const double avg_cost = 0.5 * (times.local + times.offload_roundtrip());
        const double comm = times.down;
        double best_child = 0.0;
        for (TaskId c : graph.children(v)) best_child = std::max(best_child, comm + seq.rank[c]);
        seq.rank[v] = avg_cost + best_child;
    }

    seq.order.resize(n);
    std::iota(seq.order.begin(), seq.order.end(), TaskId{0});
    std::stable_sort(seq.order.begin(), seq.order.end(),
                     [&](TaskId a, TaskId b) { return seq.rank[a] > seq.rank[b]; });
    seq.position.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) seq.position[seq.order[k]] = k;
    return seq;
}

bool is_topological(const TaskGraph& graph, const std::vector<TaskId>& order) {
    if (order.size() != graph.size()) return false;
    std::vector<std::size_t> pos(graph.size(), graph.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] >= graph.size() || pos[order[k]] != graph.size()) return false;
        pos[order[k]] = k;
    }
    return std::all_of(graph.edges().begin(), graph.edges().end(),
                       [&](const Edge& e) { return pos[e.parent] < pos[e.child]; });
}

} // namespace dagoffload
