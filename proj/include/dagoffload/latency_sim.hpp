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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dagoffload/embedding.hpp"
#include "dagoffload/ranking.hpp"
#include "dagoffload/system_profile.hpp"
#include "dagoffload/task_graph.hpp"

namespace dagoffload {

// 0 runs the task on the user device, 1 offloads it to the edge container.
using Decision = std::uint8_t;
inline constexpr Decision kLocal = 0;
inline constexpr Decision kOffload = 1;

// Decisions aligned with the ranked sequence: decisions[k] is for seq.order[k].
struct OffloadingPlan {
    std::vector<Decision> decisions;

    std::size_t size() const noexcept { return decisions.size(); }
    std::string to_bitstring() const;
    static OffloadingPlan from_bitstring(std::string_view bits);
    static OffloadingPlan uniform(std::size_t n, Decision d) { return {std::vector<Decision>(n, d)}; }

    friend bool operator==(const OffloadingPlan&, const OffloadingPlan&) = default;
};

// Finish times of one task on the device CPU, uplink, edge CPU and downlink.
// Unused resources stay at 0.
struct TaskFinish {
    double ud = 0.0;
    double up = 0.0;
    double ec = 0.0;
    double down = 0.0;

    double completion() const noexcept { return ud > down ? ud : down; }
};

struct ResourceClock {
    double device = 0.0;
    double uplink = 0.0;
    double edge = 0.0;
    double downlink = 0.0;
};

struct Schedule {
    std::vector<TaskFinish> finish; // indexed by task id
    ResourceClock free_at;
    // Latest completion among scheduled tasks; for a complete plan this is
    // the application latency.
    double latency = 0.0;

    explicit Schedule(std::size_t n = 0) : finish(n) {}
};

// Finish times `task` would get if placed now, honouring precedence and the
// one-task-at-a-time resources. Does not modify the schedule.
TaskFinish preview_task(const TaskGraph& graph, const Schedule& schedule, TaskId task, Decision decision,
                        const TaskTimes& times);

// Like preview_task but ignores resource occupancy: only the precedence ready
// times of the parents are respected.
TaskFinish precedence_only_estimate(const TaskGraph& graph, const Schedule& schedule, TaskId task,
                                    Decision decision, const TaskTimes& times);

// Places the task and advances the resources it used.
TaskFinish place_task(const TaskGraph& graph, Schedule& schedule, TaskId task, Decision decision,
                      const TaskTimes& times);

// Immutable per-episode data shared by every state of that episode.
struct EpisodeContext {
    TaskGraph graph;
    SystemProfile profile;
    RankedSequence seq;
    std::vector<TaskEmbedding> embeddings; // in seq order
    std::vector<TaskTimes> times;          // by task id

    std::size_t size() const noexcept { return graph.size(); }
};

std::shared_ptr<const EpisodeContext> make_context(TaskGraph graph, const SystemProfile& profile,
                                                   const FeatureBounds& bounds,
                                                   std::size_t index_length = kDefaultIndexLength);

struct EnvState {
    std::shared_ptr<const EpisodeContext> context;
    OffloadingPlan plan;
    Schedule schedule;

    std::size_t cursor() const noexcept { return plan.size(); }
    bool done() const noexcept { return plan.size() == context->size(); }
    double latency() const noexcept { return schedule.latency; }
    const std::vector<TaskEmbedding>& embeddings() const noexcept { return context->embeddings; }
    const SystemProfile& profile() const noexcept { return context->profile; }
};

struct StepResult {
    EnvState state;
    double reward = 0.0; // -(AL after - AL before), seconds
};

EnvState reset(std::shared_ptr<const EpisodeContext> context);

// Schedules the task at the cursor. Throws EpisodeFinished past the last task.
StepResult step(EnvState state, Decision action);

struct PlanEvaluation {
    double latency = 0.0; // seconds
    Schedule schedule;
};

// Application latency of a complete plan: the latest max(FT_ud, FT_do) over
// exit tasks.
PlanEvaluation evaluate_plan(const TaskGraph& graph, const RankedSequence& seq, const OffloadingPlan& plan,
                             const SystemProfile& profile);

} // namespace dagoffload
