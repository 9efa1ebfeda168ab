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

// Recursive latency evaluation written directly from the finish-time
// definitions, sharing no code with the simulator. Each finish time is a
// memoised function of the task's parents and of the previous task (in the
// given order) that used the same resource.

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "dagoffload/task_graph.hpp"

namespace reftest {

struct RefProfile {
    double device_speed = 1e9;
    double edge_speed = 10e9;
    double rate_up = 8.5e6;
    double rate_do = 8.5e6;
};

struct RefFinish {
    double ud = 0.0, up = 0.0, ec = 0.0, down = 0.0;
};

struct RefResult {
    double latency = 0.0;
    std::vector<RefFinish> finish; // by task id
};

// `decisions[k]` applies to order[k]; 1 offloads.
inline RefResult reference_latency(const dagoffload::TaskGraph& graph, const std::vector<std::size_t>& order,
                                   const std::vector<int>& decisions, const RefProfile& p) {
    const std::size_t n = graph.size();
    std::vector<std::vector<std::size_t>> parents(n);
    std::vector<bool> has_child(n, false);
    for (const auto& e : graph.edges()) {
        parents[e.child].push_back(e.parent);
        has_child[e.parent] = true;
    }
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
    auto offloaded = [&](std::size_t task) { return decisions[pos[task]] == 1; };
    // Previous task in the order occupying the same side.
    auto previous = [&](std::size_t task) -> std::optional<std::size_t> {
        for (std::size_t k = pos[task]; k-- > 0;) {
            if (offloaded(order[k]) == offloaded(task)) return order[k];
        }
        return std::nullopt;
    };

    std::vector<std::optional<RefFinish>> memo(n);
    std::function<RefFinish(std::size_t)> ft = [&](std::size_t v) -> RefFinish {
        if (memo[v]) return *memo[v];
        const auto& t = graph.task(v);
        RefFinish f;
        const auto prev = previous(v);
        const RefFinish before = prev ? ft(*prev) : RefFinish{};
        if (!offloaded(v)) {
            double rt = 0.0;
            for (std::size_t q : parents[v]) rt = std::max(rt, std::max(ft(q).ud, ft(q).down));
            f.ud = std::max(rt, before.ud) + t.cycles / p.device_speed;
        } else {
            double rt_up = 0.0, rt_ec = 0.0;
            for (std::size_t q : parents[v]) {
                rt_up = std::max(rt_up, std::max(ft(q).ud, ft(q).up));
                rt_ec = std::max(rt_ec, ft(q).ec);
            }
            f.up = std::max(rt_up, before.up) + t.data_up * 8.0 / p.rate_up;
            f.ec = std::max(std::max(f.up, rt_ec), before.ec) + t.cycles / p.edge_speed;
            f.down = std::max(f.ec, before.down) + t.data_do * 8.0 / p.rate_do;
        }
        memo[v] = f;
        return f;
    };

    RefResult out;
    out.finish.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        out.finish[v] = ft(v);
        if (!has_child[v]) out.latency = std::max(out.latency, std::max(out.finish[v].ud, out.finish[v].down));
    }
    return out;
}

// Upward rank straight from its recurrence, by memoised recursion over children.
inline std::vector<double> reference_ranks(const dagoffload::TaskGraph& graph, const RefProfile& p) {
    const std::size_t n = graph.size();
    std::vector<std::vector<std::size_t>> children(n);
    for (const auto& e : graph.edges()) children[e.parent].push_back(e.child);
    std::vector<std::optional<double>> memo(n);
    std::function<double(std::size_t)> rank = [&](std::size_t v) -> double {
        if (memo[v]) return *memo[v];
        const auto& t = graph.task(v);
        const double local = t.cycles / p.device_speed;
        const double up = t.data_up * 8.0 / p.rate_up;
        const double edge = t.cycles / p.edge_speed;
        const double down = t.data_do * 8.0 / p.rate_do;
        double best = 0.0;
        for (std::size_t c : children[v]) best = std::max(best, down + rank(c));
        memo[v] = 0.5 * (local + (up + edge + down)) + best;
        return *memo[v];
    };
    std::vector<double> out(n);
    for (std::size_t v = 0; v < n; ++v) out[v] = rank(v);
    return out;
}

} // namespace reftest
