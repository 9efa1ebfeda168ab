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

#include "dagoffload/system_profile.hpp"

#include <cmath>

namespace dagoffload {

void SystemProfile::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(device_speed) || !positive(edge_total) || users == 0 || !positive(rate_up) || !positive(rate_do)) {
        fail(ErrorCode::InvalidConfig, "system profile needs positive speeds, rates and user count");
    }
}

TaskTimes task_times(const Task& task, const SystemProfile& profile) {
    return TaskTimes{
        .up = task.data_up * kBitsPerByte / profile.rate_up,
        .edge = task.cycles / profile.edge_speed(),
        .local = task.cycles / profile.device_speed,
        .down = task.data_do * kBitsPerByte / profile.rate_do,
    };
}

} // namespace dagoffload
