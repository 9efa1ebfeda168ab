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

#include "dagoffload/autodiff/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "dagoffload/error.hpp"
#include "dagoffload/serialization.hpp"

namespace dagoffload::ad {

namespace {

constexpr std::array<char, 8> kMagic{'D', 'O', 'C', 'K', 'P', 'T', '\0', '\0'};

template <typename T>
void put(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), bytes.size());
}

class Reader {
  public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        std::array<char, sizeof(T)> raw;
        take(raw.data(), raw.size());
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
        T value;
        std::memcpy(&value, raw.data(), sizeof(T));
        return value;
    }

    std::string get_string(std::size_t n) {
        std::string s(n, '\0');
        take(s.data(), n);
        return s;
    }

    bool at_end() const noexcept { return pos_ == bytes_.size(); }

  private:
    void take(char* dst, std::size_t n) {
        if (bytes_.size() - pos_ < n) fail(ErrorCode::ParseError, "checkpoint is truncated");
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

void put_block(std::string& out, const std::vector<NamedTensor>& tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const NamedTensor& t : tensors) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
        out += t.name;
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.value.rank()));
        for (std::size_t d : t.value.shape()) put<std::uint64_t>(out, d);
        for (double v : t.value.data()) put<double>(out, v);
    }
}

std::vector<NamedTensor> get_block(Reader& in) {
    const auto count = in.get<std::uint32_t>();
    std::vector<NamedTensor> out;
    for (std::uint32_t k = 0; k < count; ++k) {
        NamedTensor t;
        t.name = in.get_string(in.get<std::uint32_t>());
        const auto rank = in.get<std::uint32_t>();
        if (rank > 8) fail(ErrorCode::ParseError, "implausible tensor rank in checkpoint");
        Shape shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(in.get<std::uint64_t>());
        std::vector<double> data(numel(shape));
        for (double& v : data) v = in.get<double>();
        t.value = Tensor(std::move(shape), std::move(data));
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

std::string encode_checkpoint(const Checkpoint& checkpoint) {
    std::string out(kMagic.begin(), kMagic.end());
    put<std::uint32_t>(out, kCheckpointVersion);
    put_block(out, checkpoint.params);
    put_block(out, checkpoint.optimizer);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(checkpoint.metadata.size()));
    out += checkpoint.metadata;
    return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    Reader in(bytes);
    if (in.get_string(kMagic.size()) != std::string(kMagic.begin(), kMagic.end())) {
        fail(ErrorCode::ParseError, "not a checkpoint file");
    }
    const auto version = in.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
        fail(ErrorCode::ParseError, "unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint c;
    c.params = get_block(in);
    c.optimizer = get_block(in);
    c.metadata = in.get_string(in.get<std::uint32_t>());
    if (!in.at_end()) fail(ErrorCode::ParseError, "trailing bytes after checkpoint");
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    write_text_file(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_text_file(path)); }

} // namespace dagoffload::ad
