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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dagoffload/autodiff/checkpoint.hpp"
#include "dagoffload/autodiff/tape.hpp"
#include "dagoffload/embedding.hpp"
#include "dagoffload/latency_sim.hpp"
#include "dagoffload/rng.hpp"
#include "dagoffload/serialization.hpp"

namespace dagoffload {

struct PolicyConfig {
    std::size_t layers = 2;
    std::size_t heads = 4;
    std::size_t d_model = 64;
    std::size_t d_k = 0; // per head; 0 derives d_model / heads
    std::size_t d_v = 0; // per head; 0 derives d_model / heads
    std::size_t d_ff = 128;
    double dropout = 0.1;
    std::size_t action_dim = 2;
    // Position i attends only to positions <= i.
    bool causal = true;
    std::size_t index_length = kDefaultIndexLength;
    double layer_norm_eps = 1e-5;

    std::size_t key_dim() const noexcept { return d_k ? d_k : d_model / heads; }
    std::size_t value_dim() const noexcept { return d_v ? d_v : d_model / heads; }
    std::size_t input_width() const noexcept { return kProfileFeatures + 2 * index_length; }

    void validate() const;

    // 3 layers, 8 heads, d_k = d_v = 1024, d_ff 512, hidden 512, dropout 0.4.
    static PolicyConfig paper();
    static PolicyConfig toy() { return {}; }
};

Json policy_config_to_json(const PolicyConfig& config);
PolicyConfig policy_config_from_json(const Json& j);

// Which optimizer group a tensor belongs to: the critic head uses the value
// learning rate, everything else (including the shared encoder) the policy one.
enum class ParamGroup { Policy, Value };

struct PolicyParams {
    std::vector<std::string> names;
    std::vector<ad::Tensor> values;
    std::vector<ParamGroup> groups;

    std::size_t size() const noexcept { return values.size(); }
    std::size_t index(const std::string& name) const;
    std::size_t scalar_count() const noexcept;

    // Xavier-uniform matrices, zero biases, unit layer-norm gains; the actor
    // head starts 100x smaller so the initial policy is close to uniform.
    static PolicyParams initialize(const PolicyConfig& config, std::uint64_t seed);

    std::vector<ad::NamedTensor> named() const;
    // Throws ShapeMismatch if names or shapes disagree with `config`.
    static PolicyParams from_named(const std::vector<ad::NamedTensor>& tensors, const PolicyConfig& config);
};

// Decision-token vocabulary.
inline constexpr std::size_t kTokenUndecided = 0;
inline constexpr std::size_t kTokenLocal = 1;
inline constexpr std::size_t kTokenOffload = 2;

// Token at position i carries the decision of the task at position i-1
// (position 0 and every position past the decided prefix carry "undecided").
// Under the causal mask the output at position t therefore sees task
// embeddings 0..t and decisions 0..t-1, which is exactly the state at step t,
// and one pass over a finished episode reproduces every per-step output.
std::vector<std::size_t> decision_tokens(std::span<const Decision> decisions, std::size_t length);

// Network input rows: profile features followed by parent and child positions
// mapped to (pos+1)/n, padding to 0.
ad::Tensor encode_features(std::span<const TaskEmbedding> embeddings, std::size_t length, std::size_t index_length);

struct PolicyInput {
    std::span<const TaskEmbedding> embeddings;
    std::span<const Decision> decisions; // decided prefix
    std::size_t length = 0;              // positions to run; 0 means all
    std::span<const std::size_t> positions; // position-encoding indices; empty means 0..length-1
};

struct PolicyVars {
    ad::Var logits; // [length, 2]
    ad::Var values; // [length, 1]
};

// Places parameters on a tape, as gradient-receiving leaves or as constants.
std::vector<ad::Var> bind_params(ad::Tape& tape, const PolicyParams& params, bool trainable);

PolicyVars forward(ad::Tape& tape, std::span<const ad::Var> params, const PolicyConfig& config,
                   const PolicyInput& input, bool train, std::uint64_t dropout_seed);

struct PolicyOutput {
    ad::Tensor logits;
    ad::Tensor values;
};

// Gradient-free convenience wrapper.
PolicyOutput forward(const PolicyParams& params, const PolicyConfig& config, const PolicyInput& input,
                     bool train = false, std::uint64_t dropout_seed = 0);

enum class ActMode { Sample, Greedy };

struct ActResult {
    Decision action = kLocal;
    double log_prob = 0.0;
    double value = 0.0;
    std::array<double, 2> probs{};
};

// Action for the task at the cursor. Throws EpisodeFinished on a done state.
ActResult act(const PolicyParams& params, const PolicyConfig& config, const EnvState& state, Rng& rng,
              ActMode mode = ActMode::Sample);

ad::Checkpoint make_checkpoint(const PolicyParams& params, const PolicyConfig& config,
                               std::vector<ad::NamedTensor> optimizer_state = {});

struct LoadedPolicy {
    PolicyConfig config;
    PolicyParams params;
    std::vector<ad::NamedTensor> optimizer_state;
};

LoadedPolicy policy_from_checkpoint(const ad::Checkpoint& checkpoint);

} // namespace dagoffload
