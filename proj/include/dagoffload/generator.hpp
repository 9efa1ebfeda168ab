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

#include "dagoffload/embedding.hpp"
#include "dagoffload/system_profile.hpp"
#include "dagoffload/task_graph.hpp"

namespace dagoffload {

struct GeneratorConfig {
    std::size_t n = 20;
    double fat = 0.5;     // (0,1], widens levels
    double density = 0.5; // (0,1], probability of each inter-level edge
    double ccr = 0.4;     // target mean round-trip transfer time / mean local compute time
    Range cycles_range{1e7, 1e8};
    Range data_range{5e3, 5e4}; // bytes
    std::uint64_t seed = 0;
    // Reference platform at which ccr is enforced.
    double reference_rate = mbps(10.0);
    double device_speed = 1e9;

    // Throws InvalidConfig on any out-of-range field.
    void validate() const;
};

// Layered random DAG. With width_max = max(1, round(fat * sqrt(n))), one
// level at a random slot is width_max wide and the others draw widths
// uniformly from [1, width_max] until n tasks are placed. Every
// non-first-level task receives one parent from the previous level plus each
// other previous-level task with probability `density`. Data sizes are rescaled by a single factor so the
// DAG's communication/computation ratio equals `ccr` (up to byte rounding).
TaskGraph generate_dag(const GeneratorConfig& config);

// Widths of the levels generate_dag would build for this configuration.
std::vector<std::size_t> level_widths(const GeneratorConfig& config);

// Mean round-trip transfer time over mean local execution time at the
// configuration's reference platform.
double measured_ccr(const TaskGraph& graph, double reference_rate, double device_speed);

} // namespace dagoffload
