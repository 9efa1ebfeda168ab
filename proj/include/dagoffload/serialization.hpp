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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dagoffload/latency_sim.hpp"
#include "dagoffload/task_graph.hpp"

namespace dagoffload {

using Json = nlohmann::json;

// {n, tasks:[{id,cycles,data_up,data_do}], edges:[[p,c],...]}
Json graph_to_json(const TaskGraph& graph);
// Throws ParseError on malformed input and the validation error on an
// invalid graph.
TaskGraph graph_from_json(const Json& j);

// One row per task in rank order with its decision and finish times in ms.
Json schedule_to_json(const RankedSequence& seq, const OffloadingPlan& plan, const Schedule& schedule);

// Canonical text form used for every file this library writes: two-space
// indent, keys sorted, trailing newline.
std::string dump(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace dagoffload
