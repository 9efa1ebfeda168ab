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

#include "dagoffload/embedding.hpp"

#include <algorithm>

namespace dagoffload {

namespace {

double normalize(double v, Range r) {
    if (r.hi <= r.lo) return v >= r.hi ? 1.0 : 0.0;
    return std::clamp((v - r.lo) / (r.hi - r.lo), 0.0, 1.0);
}

std::vector<int> neighbour_positions(const std::vector<TaskId>& ids, const RankedSequence& seq, std::size_t len) {
    std::vector<int> pos;
    pos.reserve(ids.size());
    for (TaskId id : ids) pos.push_back(static_cast<int>(seq.position[id]));
    std::sort(pos.begin(), pos.end());
    pos.resize(len, kIndexPadding);
    return pos;
}

} // namespace

FeatureBounds FeatureBounds::from_ranges(Range cycles, Range data, const SystemProfile& profile,
                                         double slowest_rate_bps) {
    FeatureBounds b;
    b.cycles = cycles;
    b.data = data;
    b.local_time = {cycles.lo / profile.device_speed, cycles.hi / profile.device_speed};
    b.roundtrip_time = {cycles.lo / profile.edge_speed(),
                        cycles.hi / profile.edge_speed() + 2.0 * data.hi * kBitsPerByte / slowest_rate_bps};
    return b;
}

std::vector<TaskEmbedding> embed(const TaskGraph& graph, const RankedSequence& seq, const SystemProfile& profile,
                                 const FeatureBounds& bounds, std::size_t index_length) {
    if (index_length == 0) fail(ErrorCode::InvalidArgument, "index length must be at least 1");
    if (seq.order.size() != graph.size()) fail(ErrorCode::LengthMismatch, "ranked sequence does not match graph");

    std::vector<TaskEmbedding> out;
    out.reserve(graph.size());
    for (TaskId id : seq.order) {
        const Task& t = graph.task(id);
        const TaskTimes times = task_times(t, profile);
        TaskEmbedding e;
        e.profile = {
            normalize(t.cycles, bounds.cycles),
            normalize(t.data_up, bounds.data),
            normalize(t.data_do, bounds.data),
            normalize(times.local, bounds.local_time),
            normalize(times.offload_roundtrip(), bounds.roundtrip_time),
        };
        e.parents = neighbour_positions(graph.parents(id), seq, index_length);
        e.children = neighbour_positions(graph.children(id), seq, index_length);
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace dagoffload
