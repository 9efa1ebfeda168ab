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

#include <cstddef>

#include "dagoffload/task_graph.hpp"

namespace dagoffload {

// Data sizes are bytes and rates are bits/sec; every transfer time multiplies
// by this factor.
inline constexpr double kBitsPerByte = 8.0;

constexpr double mbps(double megabits_per_second) noexcept { return megabits_per_second * 1e6; }

struct SystemProfile {
    double device_speed = 1e9;  // cycles/sec of the user device
    double edge_total = 10e9;   // cycles/sec of the edge server
    std::size_t users = 1;      // containers sharing the edge server
    double rate_up = mbps(8.5); // bits/sec
    double rate_do = mbps(8.5); // bits/sec

    // Per-container capacity cs_ct = cs_j / k.
    double edge_speed() const noexcept { return edge_total / static_cast<double>(users); }

    // Throws InvalidConfig unless all speeds and rates are positive.
    void validate() const;

    static SystemProfile with_rate(double rate_bps) {
        SystemProfile p;
        p.rate_up = rate_bps;
        p.rate_do = rate_bps;
        return p;
    }
};

// Durations in seconds of each stage a task can occupy.
struct TaskTimes {
    double up = 0.0;
    double edge = 0.0;
    double local = 0.0;
    double down = 0.0;

    double offload_roundtrip() const noexcept { return up + edge + down; }
};

TaskTimes task_times(const Task& task, const SystemProfile& profile);

} // namespace dagoffload
