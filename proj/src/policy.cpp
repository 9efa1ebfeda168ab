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

#include "dagoffload/policy.hpp"

#include <cmath>

#include "dagoffload/autodiff/ops.hpp"

namespace dagoffload {

namespace {

using ad::Shape;
using ad::Tensor;
using ad::Var;

constexpr double kMaskedScore = -1e9;
constexpr double kActorInitScale = 0.01;

// Indices into the bound parameter list, resolved once per forward.
struct LayerSlots {
    std::size_t ln1_gain, ln1_bias, query, key, value, output, ln2_gain, ln2_bias, w1, b1, w2, b2;
};

struct Slots {
    std::size_t input_weight, input_bias, decision;
    std::vector<LayerSlots> layers;
    std::size_t final_gain, final_bias, actor_weight, actor_bias, critic_weight, critic_bias;
};

struct Layout {
    std::vector<std::string> names;
    std::vector<Shape> shapes;
    std::vector<ParamGroup> groups;
    Slots slots;

    std::size_t add(std::string name, Shape shape, ParamGroup group = ParamGroup::Policy) {
        names.push_back(std::move(name));
        shapes.push_back(std::move(shape));
        groups.push_back(group);
        return names.size() - 1;
    }
};

Layout make_layout(const PolicyConfig& c) {
    Layout l;
    const std::size_t d = c.d_model;
    const std::size_t qk = c.heads * c.key_dim();
    const std::size_t vv = c.heads * c.value_dim();
    l.slots.input_weight = l.add("input.weight", {c.input_width(), d});
    l.slots.input_bias = l.add("input.bias", {d});
    l.slots.decision = l.add("decision_embedding", {3, d});
    for (std::size_t i = 0; i < c.layers; ++i) {
        const std::string p = "layer" + std::to_string(i) + ".";
        LayerSlots s{};
        s.ln1_gain = l.add(p + "ln1.gain", {d});
        s.ln1_bias = l.add(p + "ln1.bias", {d});
        s.query = l.add(p + "attn.query", {d, qk});
        s.key = l.add(p + "attn.key", {d, qk});
        s.value = l.add(p + "attn.value", {d, vv});
        s.output = l.add(p + "attn.output", {vv, d});
        s.ln2_gain = l.add(p + "ln2.gain", {d});
        s.ln2_bias = l.add(p + "ln2.bias", {d});
        s.w1 = l.add(p + "ff.w1", {d, c.d_ff});
        s.b1 = l.add(p + "ff.b1", {c.d_ff});
        s.w2 = l.add(p + "ff.w2", {c.d_ff, d});
        s.b2 = l.add(p + "ff.b2", {d});
        l.slots.layers.push_back(s);
    }
    l.slots.final_gain = l.add("final_ln.gain", {d});
    l.slots.final_bias = l.add("final_ln.bias", {d});
    l.slots.actor_weight = l.add("actor.weight", {d, c.action_dim});
    l.slots.actor_bias = l.add("actor.bias", {c.action_dim});
    l.slots.critic_weight = l.add("critic.weight", {d, 1}, ParamGroup::Value);
    l.slots.critic_bias = l.add("critic.bias", {1}, ParamGroup::Value);
    return l;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Tensor sinusoidal_encoding(std::span<const std::size_t> positions, std::size_t d) {
    Tensor pe(Shape{positions.size(), d});
    for (std::size_t r = 0; r < positions.size(); ++r) {
        const auto pos = static_cast<double>(positions[r]);
        for (std::size_t i = 0; i < d; ++i) {
            const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
            pe.at(r, i) = (i % 2 == 0) ? std::sin(pos * freq) : std::cos(pos * freq);
        }
    }
    return pe;
}

Var affine_norm(Var x, Var gain, Var bias, double eps) { return ad::layer_norm(x, eps) * gain + bias; }

} // namespace

void PolicyConfig::validate() const {
    if (layers == 0 || heads == 0 || d_model == 0 || d_ff == 0) {
        fail(ErrorCode::InvalidConfig, "policy dimensions must be positive");
    }
    if ((d_k == 0 || d_v == 0) && d_model % heads != 0) {
        fail(ErrorCode::InvalidConfig, "d_model must be divisible by heads when d_k/d_v derive from it");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorCode::InvalidConfig, "dropout must lie in [0,1)");
    if (action_dim != 2) fail(ErrorCode::InvalidConfig, "offloading actions are binary; action_dim must be 2");
    if (index_length == 0) fail(ErrorCode::InvalidConfig, "index_length must be positive");
    if (!(layer_norm_eps > 0.0)) fail(ErrorCode::InvalidConfig, "layer_norm_eps must be positive");
}

PolicyConfig PolicyConfig::paper() {
    PolicyConfig c;
    c.layers = 3;
    c.heads = 8;
    c.d_model = 512;
    c.d_k = 1024;
    c.d_v = 1024;
    c.d_ff = 512;
    c.dropout = 0.4;
    return c;
}

Json policy_config_to_json(const PolicyConfig& c) {
    Json j = Json::object();
    j["layers"] = c.layers;
    j["heads"] = c.heads;
    j["d_model"] = c.d_model;
    j["d_k"] = c.d_k;
    j["d_v"] = c.d_v;
    j["d_ff"] = c.d_ff;
    j["dropout"] = c.dropout;
    j["action_dim"] = c.action_dim;
    j["causal"] = c.causal;
    j["index_length"] = c.index_length;
    j["layer_norm_eps"] = c.layer_norm_eps;
    return j;
}

PolicyConfig policy_config_from_json(const Json& j) {
    PolicyConfig c;
    try {
        c.layers = j.value("layers", c.layers);
        c.heads = j.value("heads", c.heads);
        c.d_model = j.value("d_model", c.d_model);
        c.d_k = j.value("d_k", c.d_k);
        c.d_v = j.value("d_v", c.d_v);
        c.d_ff = j.value("d_ff", c.d_ff);
        c.dropout = j.value("dropout", c.dropout);
        c.action_dim = j.value("action_dim", c.action_dim);
        c.causal = j.value("causal", c.causal);
        c.index_length = j.value("index_length", c.index_length);
        c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
    } catch (const Json::exception& ex) {
        fail(ErrorCode::ParseError, std::string("bad policy config: ") + ex.what());
    }
    c.validate();
    return c;
}

std::size_t PolicyParams::index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    fail(ErrorCode::InvalidArgument, "no parameter named " + name);
}

std::size_t PolicyParams::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& v : values) n += v.size();
    return n;
}

PolicyParams PolicyParams::initialize(const PolicyConfig& config, std::uint64_t seed) {
    config.validate();
    const Layout layout = make_layout(config);
    PolicyParams p;
    p.names = layout.names;
    p.groups = layout.groups;
    Rng rng(seed);
    for (std::size_t i = 0; i < layout.names.size(); ++i) {
        const std::string& name = layout.names[i];
        const Shape& shape = layout.shapes[i];
        Tensor t(shape);
        if (ends_with(name, ".gain")) {
            t = Tensor(shape, 1.0);
        } else if (shape.size() == 2) {
            const double limit = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
            const double s = name == "actor.weight" ? kActorInitScale : 1.0;
            for (double& v : t.data()) v = s * rng.uniform(-limit, limit);
        }
        p.values.push_back(std::move(t));
    }
    return p;
}

std::vector<ad::NamedTensor> PolicyParams::named() const {
    std::vector<ad::NamedTensor> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({names[i], values[i]});
    return out;
}

PolicyParams PolicyParams::from_named(const std::vector<ad::NamedTensor>& tensors, const PolicyConfig& config) {
    const Layout layout = make_layout(config);
    if (tensors.size() != layout.names.size()) {
        fail(ErrorCode::ShapeMismatch, "checkpoint holds " + std::to_string(tensors.size()) + " tensors, config needs " +
                                           std::to_string(layout.names.size()));
    }
    PolicyParams p;
    p.names = layout.names;
    p.groups = layout.groups;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].name != layout.names[i] || tensors[i].value.shape() != layout.shapes[i]) {
            fail(ErrorCode::ShapeMismatch, "checkpoint tensor " + tensors[i].name + " does not match " +
                                               layout.names[i] + " " + ad::to_string(layout.shapes[i]));
        }
        p.values.push_back(tensors[i].value);
    }
    return p;
}

std::vector<std::size_t> decision_tokens(std::span<const Decision> decisions, std::size_t length) {
    std::vector<std::size_t> tokens(length, kTokenUndecided);
    for (std::size_t i = 1; i < length && i - 1 < decisions.size(); ++i) {
        tokens[i] = decisions[i - 1] == kOffload ? kTokenOffload : kTokenLocal;
    }
    return tokens;
}

Tensor encode_features(std::span<const TaskEmbedding> embeddings, std::size_t length, std::size_t index_length) {
    const std::size_t width = kProfileFeatures + 2 * index_length;
    Tensor x(Shape{length, width});
    const auto n = static_cast<double>(embeddings.size());
    auto index_feature = [n](int pos) { return pos < 0 ? 0.0 : (static_cast<double>(pos) + 1.0) / n; };
    for (std::size_t r = 0; r < length; ++r) {
        const TaskEmbedding& e = embeddings[r];
        if (e.parents.size() != index_length || e.children.size() != index_length) {
            fail(ErrorCode::ShapeMismatch, "embedding index vectors do not match the policy's index_length");
        }
        std::size_t c = 0;
        for (double v : e.profile) x.at(r, c++) = v;
        for (int p : e.parents) x.at(r, c++) = index_feature(p);
        for (int p : e.children) x.at(r, c++) = index_feature(p);
    }
    return x;
}

std::vector<Var> bind_params(ad::Tape& tape, const PolicyParams& params, bool trainable) {
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (const Tensor& t : params.values) vars.push_back(trainable ? tape.variable(t) : tape.constant(t));
    return vars;
}

PolicyVars forward(ad::Tape& tape, std::span<const Var> params, const PolicyConfig& config, const PolicyInput& input,
                   bool train, std::uint64_t dropout_seed) {
    const Slots s = make_layout(config).slots;
    if (params.size() != s.critic_bias + 1) fail(ErrorCode::ShapeMismatch, "parameter list does not match config");
    const std::size_t len = input.length ? input.length : input.embeddings.size();
    if (len == 0 || len > input.embeddings.size()) {
        fail(ErrorCode::ShapeMismatch, "policy input needs 1..n positions");
    }

    std::vector<std::size_t> positions(input.positions.begin(), input.positions.end());
    if (positions.empty()) {
        positions.resize(len);
        for (std::size_t i = 0; i < len; ++i) positions[i] = i;
    }
    if (positions.size() != len) fail(ErrorCode::ShapeMismatch, "position list length differs from input length");

    auto P = [&](std::size_t slot) { return params[slot]; };
    const double rate = config.dropout;
    const double eps = config.layer_norm_eps;
    std::uint64_t site = 0;
    auto drop = [&](Var v) { return ad::dropout(v, rate, train, derive_seed(dropout_seed, {site++})); };

    const Var features = tape.constant(encode_features(input.embeddings, len, config.index_length));
    const std::vector<std::size_t> tokens = decision_tokens(input.decisions, len);
    Var x = ad::matmul(features, P(s.input_weight)) + P(s.input_bias);
    x = x + ad::embedding_lookup(P(s.decision), tokens);
    x = x + tape.constant(sinusoidal_encoding(positions, config.d_model));

    // Row i may attend to every row whose position does not exceed its own.
    Tensor mask(Shape{len, len}, 1.0);
    if (config.causal) {
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; j < len; ++j) mask.at(i, j) = positions[j] <= positions[i] ? 1.0 : 0.0;
    }
    const Var masked = tape.constant(Tensor(Shape{len, len}, kMaskedScore));
    const std::size_t dk = config.key_dim();
    const std::size_t dv = config.value_dim();
    const double score_scale = 1.0 / std::sqrt(static_cast<double>(dk));

    for (const LayerSlots& l : s.layers) {
        const Var a = affine_norm(x, P(l.ln1_gain), P(l.ln1_bias), eps);
        const Var q = ad::matmul(a, P(l.query));
        const Var k = ad::matmul(a, P(l.key));
        const Var v = ad::matmul(a, P(l.value));
        std::vector<Var> heads;
        heads.reserve(config.heads);
        for (std::size_t h = 0; h < config.heads; ++h) {
            const Var qh = ad::slice(q, 1, h * dk, dk);
            const Var kh = ad::slice(k, 1, h * dk, dk);
            const Var vh = ad::slice(v, 1, h * dv, dv);
            Var scores = ad::scale(ad::matmul(qh, ad::transpose(kh)), score_scale);
            if (config.causal) scores = ad::where(mask, scores, masked);
            heads.push_back(ad::matmul(ad::softmax(scores, 1), vh));
        }
        const Var attended = ad::matmul(ad::concat(heads, 1), P(l.output));
        x = x + drop(attended);

        const Var b = affine_norm(x, P(l.ln2_gain), P(l.ln2_bias), eps);
        const Var hidden = ad::relu(ad::matmul(b, P(l.w1)) + P(l.b1));
        x = x + drop(ad::matmul(hidden, P(l.w2)) + P(l.b2));
    }

    const Var out = affine_norm(x, P(s.final_gain), P(s.final_bias), eps);
    return PolicyVars{
        ad::matmul(out, P(s.actor_weight)) + P(s.actor_bias),
        ad::matmul(out, P(s.critic_weight)) + P(s.critic_bias),
    };
}

PolicyOutput forward(const PolicyParams& params, const PolicyConfig& config, const PolicyInput& input, bool train,
                     std::uint64_t dropout_seed) {
    ad::Tape tape;
    const std::vector<Var> vars = bind_params(tape, params, false);
    const PolicyVars out = forward(tape, vars, config, input, train, dropout_seed);
    return PolicyOutput{out.logits.value(), out.values.value()};
}

ActResult act(const PolicyParams& params, const PolicyConfig& config, const EnvState& state, Rng& rng,
              ActMode mode) {
    if (state.done()) fail(ErrorCode::EpisodeFinished, "no task left to decide");
    const std::size_t cursor = state.cursor();
    // Causal attention makes later positions irrelevant to the cursor's output.
    const std::size_t length = config.causal ? cursor + 1 : state.context->size();
    const PolicyOutput out =
        forward(params, config, PolicyInput{state.embeddings(), state.plan.decisions, length, {}}, false, 0);

    const double l0 = out.logits.at(cursor, 0);
    const double l1 = out.logits.at(cursor, 1);
    const double m = std::max(l0, l1);
    const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
    ActResult r;
    r.probs = {std::exp(l0 - lse), std::exp(l1 - lse)};
    if (mode == ActMode::Greedy) {
        r.action = l1 > l0 ? kOffload : kLocal;
    } else {
        r.action = rng.uniform() < r.probs[1] ? kOffload : kLocal;
    }
    r.log_prob = (r.action == kOffload ? l1 : l0) - lse;
    r.value = out.values.at(cursor, 0);
    return r;
}

ad::Checkpoint make_checkpoint(const PolicyParams& params, const PolicyConfig& config,
                               std::vector<ad::NamedTensor> optimizer_state) {
    Json meta = Json::object();
    meta["policy"] = policy_config_to_json(config);
    return ad::Checkpoint{params.named(), std::move(optimizer_state), meta.dump()};
}

LoadedPolicy policy_from_checkpoint(const ad::Checkpoint& checkpoint) {
    Json meta;
    try {
        meta = Json::parse(checkpoint.metadata);
    } catch (const Json::exception& ex) {
        fail(ErrorCode::ParseError, std::string("checkpoint metadata: ") + ex.what());
    }
    LoadedPolicy out;
    out.config = policy_config_from_json(meta.value("policy", Json::object()));
    out.params = PolicyParams::from_named(checkpoint.params, out.config);
    out.optimizer_state = checkpoint.optimizer;
    return out;
}

} // namespace dagoffload
