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

#include "dagoffload/serialization.hpp"

#include <fstream>
#include <sstream>

namespace dagoffload {

Json schedule_to_json(const RankedSequence& seq, const OffloadingPlan& plan, const Schedule& schedule) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < seq.order.size(); ++k) {
        const TaskId id = seq.order[k];
        const TaskFinish& f = schedule.finish[id];
        Json r = Json::object();
        r["task"] = id;
        r["position"] = k;
        r["decision"] = plan.decisions[k] == kOffload ? "edge" : "local";
        r["ft_ud_ms"] = f.ud * 1e3;
        r["ft_up_ms"] = f.up * 1e3;
        r["ft_ec_ms"] = f.ec * 1e3;
        r["ft_do_ms"] = f.down * 1e3;
        r["completion_ms"] = f.completion() * 1e3;
        rows.push_back(r);
    }
    return rows;
}

Json graph_to_json(const TaskGraph& graph) {
    Json tasks = Json::array();
    for (const Task& t : graph.tasks()) {
        tasks.push_back(Json{{"id", t.id}, {"cycles", t.cycles}, {"data_up", t.data_up}, {"data_do", t.data_do}});
    }
    Json edges = Json::array();
    for (const Edge& e : graph.edges()) edges.push_back(Json::array({e.parent, e.child}));
    Json out = Json::object();
    out["n"] = graph.size();
    out["tasks"] = std::move(tasks);
    out["edges"] = std::move(edges);
    return out;
}

TaskGraph graph_from_json(const Json& j) {
    std::vector<Task> tasks;
    std::vector<Edge> edges;
    try {
        for (const Json& t : j.at("tasks")) {
            tasks.push_back(Task{t.at("id").get<TaskId>(), t.at("cycles").get<double>(),
                                 t.at("data_up").get<double>(), t.at("data_do").get<double>()});
        }
        for (const Json& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) fail(ErrorCode::ParseError, "edge must be a [parent, child] pair");
            edges.push_back(Edge{e[0].get<TaskId>(), e[1].get<TaskId>()});
        }
        if (j.contains("n") && j.at("n").get<std::size_t>() != tasks.size()) {
            fail(ErrorCode::ParseError, "field n disagrees with the task list");
        }
    } catch (const Json::exception& ex) {
        fail(ErrorCode::ParseError, std::string("malformed task graph: ") + ex.what());
    }
    return TaskGraph(std::move(tasks), std::move(edges));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::exception& ex) {
        fail(ErrorCode::ParseError, path.string() + ": " + ex.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

} // namespace dagoffload
