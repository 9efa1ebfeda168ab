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

#include <array>
#include <cstddef>
#include <vector>

#include "dagoffload/ranking.hpp"
#include "dagoffload/system_profile.hpp"
#include "dagoffload/task_graph.hpp"

namespace dagoffload {

inline constexpr std::size_t kProfileFeatures = 5;
inline constexpr std::size_t kDefaultIndexLength = 12;
inline constexpr int kIndexPadding = -1;

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

// Min-max bounds for the profile features. They derive from the generator's
// configured ranges, not from the DAG at hand, so embeddings of different
// DAGs share one scale.
struct FeatureBounds {
    Range cycles{1e7, 1e8};
    Range data{5e3, 5e4};
    Range local_time;
    Range roundtrip_time;

    // local_time spans cycles/device_speed; roundtrip_time spans the edge
    // execution floor up to a full upload+download of data.hi at `slowest_rate`.
    static FeatureBounds from_ranges(Range cycles, Range data, const SystemProfile& profile,
                                     double slowest_rate_bps = mbps(4.0));
};

struct TaskEmbedding {
    // [cycles, data_up, data_do, local_exec_time, offload_roundtrip_time], each in [0,1].
    std::array<double, kProfileFeatures> profile{};
    // Sequence positions of parents/children, ascending, padded with -1.
    std::vector<int> parents;
    std::vector<int> children;

    friend bool operator==(const TaskEmbedding&, const TaskEmbedding&) = default;
};

// One embedding per task, listed in seq.order. When a task has more than
// `index_length` neighbours the highest-ranked ones (earliest positions) are kept.
std::vector<TaskEmbedding> embed(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile,
                                 const FeatureBounds& bounds, std::size_t index_length = kDefaultIndexLength);

} // namespace dagoffload
