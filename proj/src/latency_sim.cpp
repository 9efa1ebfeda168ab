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

#include "dagoffload/latency_sim.hpp"

#include <algorithm>

namespace dagoffload {

std::string OffloadingPlan::to_bitstring() const {
    std::string s;
    s.reserve(decisions.size());
    for (Decision d : decisions) s.push_back(d ? '1' : '0');
    return s;
}

OffloadingPlan OffloadingPlan::from_bitstring(std::string_view bits) {
    OffloadingPlan plan;
    plan.decisions.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') fail(ErrorCode::InvalidPlan, "plan bitstring may only contain 0 and 1");
        plan.decisions.push_back(c == '1' ? kOffload : kLocal);
    }
    return plan;
}

namespace {

struct ReadyTimes {
    double device = 0.0; // RT_ud
    double uplink = 0.0; // RT_up
    double parents_edge = 0.0;
};

ReadyTimes ready_times(const TaskGraph& graph, const Schedule& schedule, TaskId task) {
    ReadyTimes rt;
    for (TaskId p : graph.parents(task)) {
        const TaskFinish& f = schedule.finish[p];
        rt.device = std::max({rt.device, f.ud, f.down});
        rt.uplink = std::max({rt.uplink, f.ud, f.up});
        rt.parents_edge = std::max(rt.parents_edge, f.ec);
    }
    return rt;
}

TaskFinish finish_times(const ReadyTimes& rt, const ResourceClock& free_at, Decision decision,
                        const TaskTimes& times) {
    TaskFinish f;
    if (decision == kLocal) {
        f.ud = std::max(rt.device, free_at.device) + times.local;
    } else {
        f.up = std::max(rt.uplink, free_at.uplink) + times.up;
        f.ec = std::max({f.up, rt.parents_edge, free_at.edge}) + times.edge;
        f.down = std::max(f.ec, free_at.downlink) + times.down;
    }
    return f;
}

void check_decision(Decision d) {
    if (d != kLocal && d != kOffload) fail(ErrorCode::InvalidPlan, "decisions must be 0 or 1");
}

} // namespace

TaskFinish preview_task(const TaskGraph& graph, const Schedule& schedule, TaskId task, Decision decision,
                        const TaskTimes& times) {
    check_decision(decision);
    return finish_times(ready_times(graph, schedule, task), schedule.free_at, decision, times);
}

TaskFinish precedence_only_estimate(const TaskGraph& graph, const Schedule& schedule, TaskId task,
                                    Decision decision, const TaskTimes& times) {
    check_decision(decision);
    return finish_times(ready_times(graph, schedule, task), ResourceClock{}, decision, times);
}

TaskFinish place_task(const TaskGraph& graph, Schedule& schedule, TaskId task, Decision decision,
                      const TaskTimes& times) {
    const TaskFinish f = preview_task(graph, schedule, task, decision, times);
    schedule.finish[task] = f;
    if (decision == kLocal) {
        schedule.free_at.device = f.ud;
    } else {
        schedule.free_at.uplink = f.up;
        schedule.free_at.edge = f.ec;
        schedule.free_at.downlink = f.down;
    }
    schedule.latency = std::max(schedule.latency, f.completion());
    return f;
}

std::shared_ptr<const EpisodeContext> make_context(TaskGraph graph, const SystemProfile& profile,
                                                   const FeatureBounds& bounds, std::size_t index_length) {
    profile.validate();
    RankedSequence seq = compute_ranks(graph, profile);
    std::vector<TaskEmbedding> embeddings = embed(graph, seq, profile, bounds, index_length);
    std::vector<TaskTimes> times;
    times.reserve(graph.size());
    for (const Task& t : graph.tasks()) times.push_back(task_times(t, profile));
    return std::make_shared<const EpisodeContext>(EpisodeContext{
        std::move(graph), profile, std::move(seq), std::move(embeddings), std::move(times)});
}

EnvState reset(std::shared_ptr<const EpisodeContext> context) {
    if (!context) fail(ErrorCode::InvalidArgument, "reset needs an episode context");
    const std::size_t n = context->size();
    EnvState state{std::move(context), {}, Schedule(n)};
    state.plan.decisions.reserve(n);
    return state;
}

StepResult step(EnvState state, Decision action) {
    if (state.done()) fail(ErrorCode::EpisodeFinished, "episode already scheduled every task");
    const EpisodeContext& ctx = *state.context;
    const TaskId task = ctx.seq.order[state.cursor()];
    const double before = state.schedule.latency;
    place_task(ctx.graph, state.schedule, task, action, ctx.times[task]);
    state.plan.decisions.push_back(action);
    const double reward = -(state.schedule.latency - before);
    return {std::move(state), reward};
}

PlanEvaluation evaluate_plan(const TaskGraph& graph, const RankedSequence& seq, const OffloadingPlan& plan,
                             const SystemProfile& profile) {
    profile.validate();
    if (plan.size() != graph.size()) {
        fail(ErrorCode::IncompletePlan, "plan has " + std::to_string(plan.size()) + " decisions for " +
                                            std::to_string(graph.size()) + " tasks");
    }
    if (seq.order.size() != graph.size()) fail(ErrorCode::LengthMismatch, "ranked sequence does not match graph");
    PlanEvaluation out{0.0, Schedule(graph.size())};
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const TaskId task = seq.order[k];
        place_task(graph, out.schedule, task, plan.decisions[k], task_times(graph.task(task), profile));
    }
    for (TaskId e : graph.exit_tasks()) out.latency = std::max(out.latency, out.schedule.finish[e].completion());
    return out;
}

} // namespace dagoffload
