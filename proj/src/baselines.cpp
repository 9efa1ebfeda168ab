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

#include "dagoffload/baselines.hpp"

#include <limits>

#include "dagoffload/rng.hpp"

namespace dagoffload {

std::string_view to_string(SchedulerKind kind) noexcept {
    switch (kind) {
    case SchedulerKind::Heft: return "heft";
    case SchedulerKind::Greedy: return "greedy";
    case SchedulerKind::AllLocal: return "all_local";
    case SchedulerKind::AllRemote: return "all_remote";
    case SchedulerKind::Random: return "random";
    case SchedulerKind::Oracle: return "oracle";
    }
    return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept {
    std::string s(name);
    for (char& c : s)
        if (c == '-') c = '_';
    for (auto k : {SchedulerKind::Heft, SchedulerKind::Greedy, SchedulerKind::AllLocal, SchedulerKind::AllRemote,
                   SchedulerKind::Random, SchedulerKind::Oracle}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

namespace {

template <typename Estimate>
OffloadingPlan earliest_finish_schedule(const TaskGraph& graph, const RankedSequence& seq,
                                        const SystemProfile& profile, Estimate estimate) {
    profile.validate();
    Schedule schedule(graph.size());
    OffloadingPlan plan;
    plan.decisions.reserve(graph.size());
    for (TaskId task : seq.order) {
        const TaskTimes times = task_times(graph.task(task), profile);
        const double local = estimate(graph, schedule, task, kLocal, times).ud;
        const double remote = estimate(graph, schedule, task, kOffload, times).down;
        const Decision d = remote < local ? kOffload : kLocal;
        place_task(graph, schedule, task, d, times);
        plan.decisions.push_back(d);
    }
    return plan;
}

struct OracleSearch {
    const TaskGraph& graph;
    const RankedSequence& seq;
    std::vector<TaskTimes> times;
    std::vector<Decision> current;
    OracleResult best;
    bool found = false;

    void run(std::size_t k, const Schedule& schedule) {
        // Partial latency never decreases as tasks are added, so a prefix that
        // already matches the incumbent cannot yield a strictly better plan.
        if (found && schedule.latency >= best.latency) return;
        if (k == seq.order.size()) {
            best.plan.decisions = current;
            best.latency = schedule.latency;
            found = true;
            return;
        }
        const TaskId task = seq.order[k];
        for (Decision d : {kLocal, kOffload}) {
            Schedule next = schedule;
            place_task(graph, next, task, d, times[task]);
            current.push_back(d);
            run(k + 1, next);
            current.pop_back();
        }
    }
};

} // namespace

OffloadingPlan heft_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile) {
    return earliest_finish_schedule(graph, seq, profile, preview_task);
}

OffloadingPlan greedy_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile) {
    return earliest_finish_schedule(graph, seq, profile, precedence_only_estimate);
}

OffloadingPlan random_schedule(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    OffloadingPlan plan;
    plan.decisions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) plan.decisions.push_back(rng.bernoulli(0.5) ? kOffload : kLocal);
    return plan;
}

OracleResult oracle_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile,
                             std::size_t cap) {
    profile.validate();
    if (graph.size() > cap) {
        fail(ErrorCode::TooLarge, "oracle limited to " + std::to_string(cap) + " tasks, graph has " +
                                      std::to_string(graph.size()));
    }
    OracleSearch search{graph, seq, {}, {}, {}, false};
    search.times.reserve(graph.size());
    for (const Task& t : graph.tasks()) search.times.push_back(task_times(t, profile));
    search.run(0, Schedule(graph.size()));
    return search.best;
}

OffloadingPlan run_scheduler(SchedulerKind kind, const TaskGraph& graph, const RankedSequence& seq,
                             const SystemProfile& profile, const SchedulerOptions& options) {
    switch (kind) {
    case SchedulerKind::Heft: return heft_schedule(graph, seq, profile);
    case SchedulerKind::Greedy: return greedy_schedule(graph, seq, profile);
    case SchedulerKind::AllLocal: return OffloadingPlan::uniform(graph.size(), kLocal);
    case SchedulerKind::AllRemote: return OffloadingPlan::uniform(graph.size(), kOffload);
    case SchedulerKind::Random: return random_schedule(graph.size(), options.seed);
    case SchedulerKind::Oracle: return oracle_schedule(graph, seq, profile, options.oracle_cap).plan;
    }
    fail(ErrorCode::InvalidArgument, "unknown scheduler");
}

} // namespace dagoffload
