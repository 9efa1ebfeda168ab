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

#include "dagoffload/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dagoffload/rng.hpp"

namespace dagoffload {

void GeneratorConfig::validate() const {
    auto bad_range = [](Range r) { return !(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi); };
    if (n < 1) fail(ErrorCode::InvalidConfig, "generator needs n >= 1");
    if (!(fat > 0.0 && fat <= 1.0)) fail(ErrorCode::InvalidConfig, "fat must lie in (0,1]");
    if (!(density > 0.0 && density <= 1.0)) fail(ErrorCode::InvalidConfig, "density must lie in (0,1]");
    if (!(ccr > 0.0) || !std::isfinite(ccr)) fail(ErrorCode::InvalidConfig, "ccr must be positive");
    if (bad_range(cycles_range) || bad_range(data_range)) {
        fail(ErrorCode::InvalidConfig, "cycle and data ranges need positive bounds with lo <= hi");
    }
    if (!(reference_rate > 0.0) || !(device_speed > 0.0)) {
        fail(ErrorCode::InvalidConfig, "reference rate and device speed must be positive");
    }
}

namespace {

std::size_t max_width(const GeneratorConfig& c) {
    const auto w = std::lround(c.fat * std::sqrt(static_cast<double>(c.n)));
    return static_cast<std::size_t>(std::max<long>(1, w));
}

std::vector<std::size_t> draw_widths(const GeneratorConfig& c, Rng& rng) {
    const std::size_t wmax = std::min(max_width(c), c.n);
    const std::size_t rest = c.n - wmax;
    std::vector<std::size_t> widths;
    std::size_t placed = 0;
    while (placed < rest) {
        auto w = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_width(c))));
        w = std::min(w, rest - placed);
        widths.push_back(w);
        placed += w;
    }
    // One level is exactly width_max wide.
    const std::size_t slot = rng.index(widths.size() + 1);
    widths.insert(widths.begin() + static_cast<std::ptrdiff_t>(slot), wmax);
    return widths;
}

} // namespace

std::vector<std::size_t> level_widths(const GeneratorConfig& config) {
    config.validate();
    Rng rng(config.seed);
    return draw_widths(config, rng);
}

TaskGraph generate_dag(const GeneratorConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const std::vector<std::size_t> widths = draw_widths(config, rng);

    std::vector<std::vector<TaskId>> levels;
    TaskId next = 0;
    for (std::size_t w : widths) {
        std::vector<TaskId> level(w);
        for (auto& id : level) id = next++;
        levels.push_back(std::move(level));
    }

    std::set<Edge> edges;
    for (std::size_t l = 1; l < levels.size(); ++l) {
        const auto& prev = levels[l - 1];
        for (TaskId v : levels[l]) edges.insert({prev[rng.index(prev.size())], v});
        for (TaskId u : prev)
            for (TaskId v : levels[l])
                if (rng.bernoulli(config.density)) edges.insert({u, v});
    }

    std::vector<Task> tasks(config.n);
    for (TaskId i = 0; i < config.n; ++i) {
        Task& t = tasks[i];
        t.id = i;
        t.cycles = std::round(rng.uniform(config.cycles_range.lo, config.cycles_range.hi));
        t.data_up = rng.uniform(config.data_range.lo, config.data_range.hi);
        t.data_do = rng.uniform(0.1, 1.0) * t.data_up;
    }

    double comp = 0.0;
    double comm = 0.0;
    for (const Task& t : tasks) {
        comp += t.cycles / config.device_speed;
        comm += (t.data_up + t.data_do) * kBitsPerByte / config.reference_rate;
    }
    const double scale = config.ccr * comp / comm;
    for (Task& t : tasks) {
        t.data_up = std::max(1.0, std::round(t.data_up * scale));
        t.data_do = std::max(1.0, std::round(t.data_do * scale));
    }

    return TaskGraph(std::move(tasks), std::vector<Edge>(edges.begin(), edges.end()));
}

double measured_ccr(const TaskGraph& graph, double reference_rate, double device_speed) {
    double comp = 0.0;
    double comm = 0.0;
    for (const Task& t : graph.tasks()) {
        comp += t.cycles / device_speed;
        comm += (t.data_up + t.data_do) * kBitsPerByte / reference_rate;
    }
    return comm / comp;
}

} // namespace dagoffload
