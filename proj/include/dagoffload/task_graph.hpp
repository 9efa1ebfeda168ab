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

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagoffload/error.hpp"

namespace dagoffload {

using TaskId = std::size_t;

// A unit of computation. Data sizes are bytes; cycles are CPU cycles.
struct Task {
    TaskId id = 0;
    double cycles = 0.0;
    double data_up = 0.0;
    double data_do = 0.0;

    friend bool operator==(const Task&, const Task&) = default;
};

struct Edge {
    TaskId parent = 0;
    TaskId child = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct GraphError {
    ErrorCode code;
    std::string message;
};

// Checks every TaskGraph invariant and reports the first violation.
std::optional<GraphError> validate(std::span<const Task> tasks, std::span<const Edge> edges);

// Immutable application DAG. Construction validates and throws Error on the
// first violated invariant, so every live TaskGraph is well formed.
class TaskGraph {
  public:
    TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges);

    std::size_t size() const noexcept { return tasks_.size(); }
    const std::vector<Task>& tasks() const noexcept { return tasks_; }
    const Task& task(TaskId id) const { return tasks_.at(id); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    const std::vector<TaskId>& parents(TaskId id) const { return parents_.at(id); }
    const std::vector<TaskId>& children(TaskId id) const { return children_.at(id); }

    bool is_entry(TaskId id) const { return parents_.at(id).empty(); }
    bool is_exit(TaskId id) const { return children_.at(id).empty(); }
    std::vector<TaskId> entry_tasks() const;
    std::vector<TaskId> exit_tasks() const;

    friend bool operator==(const TaskGraph& a, const TaskGraph& b) {
        return a.tasks_ == b.tasks_ && a.edges_ == b.edges_;
    }

  private:
    std::vector<Task> tasks_;
    std::vector<Edge> edges_; // sorted
    std::vector<std::vector<TaskId>> parents_;
    std::vector<std::vector<TaskId>> children_;
};

// Graphviz rendering for inspection; not parsed back.
std::string to_dot(const TaskGraph& graph);

} // namespace dagoffload
