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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dagoffload/baselines.hpp"
#include "dagoffload/error.hpp"
#include "dagoffload/generator.hpp"
#include "dagoffload/ppo.hpp"
#include "dagoffload/serialization.hpp"

namespace py = pybind11;
using namespace dagoffload;

namespace {

TaskGraph parse_graph(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        fail(ErrorCode::ParseError, std::string("malformed DAG JSON: ") + e.what());
    }
    return graph_from_json(j);
}

SystemProfile profile_for(double rate_up_mbps, double rate_do_mbps) {
    SystemProfile p;
    p.rate_up = mbps(rate_up_mbps);
    p.rate_do = mbps(rate_do_mbps);
    p.validate();
    return p;
}

std::string evaluation_json(const std::string& label, const TaskGraph& graph, const RankedSequence& seq,
                            const OffloadingPlan& plan, const SystemProfile& profile) {
    const PlanEvaluation ev = evaluate_plan(graph, seq, plan, profile);
    Json j = Json::object();
    j["algorithm"] = label;
    j["AL_ms"] = ev.latency * 1e3;
    j["plan"] = plan.to_bitstring();
    j["rank_order"] = seq.order;
    j["schedule"] = schedule_to_json(seq, plan, ev.schedule);
    return dump(j);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "DAG offloading simulator and baseline schedulers";

    static py::exception<Error> error_type(m, "DagoffloadError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::tuple args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
            PyErr_SetObject(error_type.ptr(), args.ptr());
        }
    });

    m.def(
        "generate_dag",
        [](std::size_t n, double fat, double density, double ccr, std::uint64_t seed) {
            GeneratorConfig c;
            c.n = n;
            c.fat = fat;
            c.density = density;
            c.ccr = ccr;
            c.seed = seed;
            return dump(graph_to_json(generate_dag(c)));
        },
        py::arg("n") = 20, py::arg("fat") = 0.5, py::arg("density") = 0.5, py::arg("ccr") = 0.4, py::arg("seed") = 0,
        "Layered random DAG as a JSON string.");

    m.def(
        "evaluate_plan",
        [](const std::string& dag, const std::string& plan, double rate_up, double rate_do) {
            const TaskGraph g = parse_graph(dag);
            const SystemProfile p = profile_for(rate_up, rate_do);
            const OffloadingPlan op = OffloadingPlan::from_bitstring(plan);
            if (op.size() != g.size()) fail(ErrorCode::InvalidPlan, "plan length differs from the task count");
            return evaluation_json("plan", g, compute_ranks(g, p), op, p);
        },
        py::arg("dag"), py::arg("plan"), py::arg("rate_up_mbps") = 8.5, py::arg("rate_do_mbps") = 8.5,
        "Schedule of a rank-ordered bitstring plan, as a JSON string.");

    m.def(
        "schedule",
        [](const std::string& dag, const std::string& algorithm, double rate_up, double rate_do, std::uint64_t seed,
           std::size_t oracle_cap) {
            const TaskGraph g = parse_graph(dag);
            const SystemProfile p = profile_for(rate_up, rate_do);
            const auto kind = parse_scheduler(algorithm);
            if (!kind) fail(ErrorCode::InvalidArgument, "unknown algorithm '" + algorithm + "'");
            const RankedSequence seq = compute_ranks(g, p);
            const OffloadingPlan plan = run_scheduler(*kind, g, seq, p, {seed, oracle_cap});
            return evaluation_json(std::string(to_string(*kind)), g, seq, plan, p);
        },
        py::arg("dag"), py::arg("algorithm"), py::arg("rate_up_mbps") = 8.5, py::arg("rate_do_mbps") = 8.5,
        py::arg("seed") = 0, py::arg("oracle_cap") = kDefaultOracleCap,
        "Run a baseline scheduler and return its schedule as a JSON string.");

    m.def(
        "compute_gae",
        [](const std::vector<double>& rewards, const std::vector<double>& values, double gamma, double lambda) {
            GaeResult r = compute_gae(rewards, values, gamma, lambda);
            return py::make_tuple(r.advantages, r.returns);
        },
        py::arg("rewards"), py::arg("values"), py::arg("gamma") = 0.99, py::arg("lam") = 0.95,
        "Advantages and returns; `values` carries one bootstrap entry past the last reward.");
}
