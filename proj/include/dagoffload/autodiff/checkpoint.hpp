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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dagoffload/autodiff/tensor.hpp"

namespace dagoffload::ad {

struct NamedTensor {
    std::string name;
    Tensor value;

    friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

// Binary layout, all integers and doubles little-endian:
//   "DOCKPT\0\0" | u32 version
//   u32 count, then per tensor: u32 name_len, name, u32 rank, u64 dims[rank], f64 values[]
//   (same block again for optimizer state)
//   u32 metadata_len, metadata (free-form UTF-8, JSON by convention)
struct Checkpoint {
    std::vector<NamedTensor> params;
    std::vector<NamedTensor> optimizer;
    std::string metadata;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& checkpoint);
// Throws ParseError on truncated or foreign data.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace dagoffload::ad
