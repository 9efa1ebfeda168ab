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
#include <optional>
#include <string>
#include <string_view>

#include "dagoffload/latency_sim.hpp"

namespace dagoffload {

enum class SchedulerKind { Heft, Greedy, AllLocal, AllRemote, Random, Oracle };

std::string_view to_string(SchedulerKind kind) noexcept;
// Accepts both "all_local" and "all-local" spellings.
std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept;

inline constexpr std::size_t kDefaultOracleCap = 20;

// Places tasks in rank order on whichever side finishes first under the
// simulator's contention-aware semantics. Ties go local.
OffloadingPlan heft_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile);

// Same rule, but the finish-time estimate sees only parent ready times and
// not the queues on the device, channels or edge CPU.
OffloadingPlan greedy_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile);

OffloadingPlan random_schedule(std::size_t n, std::uint64_t seed);

struct OracleResult {
    OffloadingPlan plan;
    double latency = 0.0;
};

// Exhaustive search over all 2^n plans with prefix pruning. Among equal
// latencies the plan with the smallest binary value (first decision most
// significant) wins. Throws TooLarge when n exceeds `cap`.
OracleResult oracle_schedule(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile,
                             std::size_t cap = kDefaultOracleCap);

struct SchedulerOptions {
    std::uint64_t seed = 0;
    std::size_t oracle_cap = kDefaultOracleCap;
};

OffloadingPlan run_scheduler(SchedulerKind kind, const TaskGraph& graph, const RankedSequence& seq,
                             const SystemProfile& profile, const SchedulerOptions& options = {});

} // namespace dagoffload
