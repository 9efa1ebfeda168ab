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

#include "dagoffload/parallel.hpp"

#include <cstdlib>
#include <string>

#include "dagoffload/error.hpp"

namespace dagoffload {

std::size_t default_thread_count() {
    const char* env = std::getenv("DAGOFFLOAD_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(env, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::string(env).size() || value < 1) {
        fail(ErrorCode::InvalidConfig, std::string("DAGOFFLOAD_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<std::size_t>(value);
}

} // namespace dagoffload
