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

#include "dagoffload/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dagoffload {

std::optional<GraphError> validate(std::span<const Task> tasks, std::span<const Edge> edges) {
    const std::size_t n = tasks.size();
    if (n == 0) return GraphError{ErrorCode::EmptyGraph, "graph has no tasks"};

    for (std::size_t i = 0; i < n; ++i) {
        const Task& t = tasks[i];
        if (t.id != i) {
            return GraphError{ErrorCode::InvalidTask,
                              "task at position " + std::to_string(i) + " has id " + std::to_string(t.id)};
        }
        if (!(t.cycles > 0.0) || !std::isfinite(t.cycles)) {
            return GraphError{ErrorCode::InvalidTask, "task " + std::to_string(i) + " needs cycles > 0"};
        }
        if (!(t.data_up >= 0.0) || !(t.data_do >= 0.0) || !std::isfinite(t.data_up) || !std::isfinite(t.data_do)) {
            return GraphError{ErrorCode::InvalidTask, "task " + std::to_string(i) + " has negative data size"};
        }
    }

    std::set<Edge> seen;
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<TaskId>> out(n);
    for (const Edge& e : edges) {
        if (e.parent >= n || e.child >= n) {
            return GraphError{ErrorCode::DanglingEdge, "edge (" + std::to_string(e.parent) + "," +
                                                           std::to_string(e.child) + ") references a missing task"};
        }
        if (e.parent == e.child) {
            return GraphError{ErrorCode::SelfEdge, "self edge on task " + std::to_string(e.parent)};
        }
        if (!seen.insert(e).second) {
            return GraphError{ErrorCode::DuplicateEdge, "duplicate edge (" + std::to_string(e.parent) + "," +
                                                            std::to_string(e.child) + ")"};
        }
        ++indegree[e.child];
        out[e.parent].push_back(e.child);
    }

    // Kahn's algorithm; leftover vertices sit on a cycle.
    std::vector<TaskId> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t visited = 0;
    while (!ready.empty()) {
        TaskId v = ready.back();
        ready.pop_back();
        ++visited;
        for (TaskId c : out[v])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (visited != n) return GraphError{ErrorCode::CycleDetected, "graph contains a cycle"};
    // Acyclic and nonempty implies at least one entry and one exit task.
    return std::nullopt;
}

TaskGraph::TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)) {
    if (auto err = validate(tasks_, edges_)) throw Error(err->code, err->message);
    std::sort(edges_.begin(), edges_.end());
    parents_.resize(tasks_.size());
    children_.resize(tasks_.size());
    for (const Edge& e : edges_) {
        parents_[e.child].push_back(e.parent);
        children_[e.parent].push_back(e.child);
    }
}

std::vector<TaskId> TaskGraph::entry_tasks() const {
    std::vector<TaskId> out;
    for (TaskId i = 0; i < size(); ++i)
        if (is_entry(i)) out.push_back(i);
    return out;
}

std::vector<TaskId> TaskGraph::exit_tasks() const {
    std::vector<TaskId> out;
    for (TaskId i = 0; i < size(); ++i)
        if (is_exit(i)) out.push_back(i);
    return out;
}

std::string to_dot(const TaskGraph& graph) {
    std::ostringstream os;
    os << "digraph dag {\n";
    for (const Task& t : graph.tasks()) {
        os << "  t" << t.id << " [label=\"" << t.id << "\\nc=" << t.cycles << "\\nup=" << t.data_up
           << "\\ndo=" << t.data_do << "\"];\n";
    }
    for (const Edge& e : graph.edges()) os << "  t" << e.parent << " -> t" << e.child << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace dagoffload
