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

#include "dagoffload/dataset.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "dagoffload/parallel.hpp"
#include "dagoffload/rng.hpp"

namespace dagoffload {

namespace {

constexpr std::array<double, 5> kProtocolShapeValues{0.4, 0.5, 0.6, 0.7, 0.8};
constexpr int kManifestVersion = 1;

Json config_to_json(const GeneratorConfig& c) {
    Json j = Json::object();
    j["n"] = c.n;
    j["fat"] = c.fat;
    j["density"] = c.density;
    j["ccr"] = c.ccr;
    j["cycles_range"] = {c.cycles_range.lo, c.cycles_range.hi};
    j["data_range"] = {c.data_range.lo, c.data_range.hi};
    j["reference_rate_bps"] = c.reference_rate;
    j["device_speed"] = c.device_speed;
    return j;
}

GeneratorConfig config_from_json(const Json& j) {
    GeneratorConfig c;
    c.n = j.value("n", c.n);
    c.fat = j.value("fat", c.fat);
    c.density = j.value("density", c.density);
    c.ccr = j.value("ccr", c.ccr);
    if (j.contains("cycles_range")) c.cycles_range = {j["cycles_range"].at(0), j["cycles_range"].at(1)};
    if (j.contains("data_range")) c.data_range = {j["data_range"].at(0), j["data_range"].at(1)};
    c.reference_rate = j.value("reference_rate_bps", c.reference_rate);
    c.device_speed = j.value("device_speed", c.device_speed);
    return c;
}

Json meta_to_json(const DagMeta& m) {
    Json j = Json::object();
    j["set_id"] = m.set_id;
    j["index"] = m.index;
    j["fat"] = m.fat;
    j["density"] = m.density;
    j["ccr"] = m.ccr;
    j["seed"] = m.seed;
    return j;
}

DagMeta meta_from_json(const Json& j) {
    return DagMeta{j.at("set_id").get<int>(), j.at("index").get<std::size_t>(), j.at("fat").get<double>(),
                   j.at("density").get<double>(), j.at("ccr").get<double>(), j.at("seed").get<std::uint64_t>()};
}

} // namespace

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

void DatasetManifest::validate() const {
    std::set<int> ids;
    for (const DatasetSet& s : sets) {
        if (!ids.insert(s.set_id).second) {
            fail(ErrorCode::InvalidConfig, "duplicate set_id " + std::to_string(s.set_id));
        }
        s.config.validate();
    }
}

DatasetManifest paper_protocol_manifest(std::uint64_t seed, std::size_t n, std::size_t set_count,
                                        std::size_t dag_count, std::size_t train_count) {
    if (train_count > set_count) fail(ErrorCode::InvalidConfig, "more training sets than sets");
    DatasetManifest m;
    m.seed = seed;
    std::vector<int> ids(set_count);
    for (std::size_t i = 0; i < set_count; ++i) ids[i] = static_cast<int>(i);
    // Fisher-Yates on our own generator so the split is portable.
    Rng rng(derive_seed(seed, {0x5ea1ULL}));
    for (std::size_t i = set_count; i > 1; --i) std::swap(ids[i - 1], ids[rng.index(i)]);
    std::set<int> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));
    for (std::size_t i = 0; i < set_count; ++i) {
        DatasetSet s;
        s.set_id = static_cast<int>(i);
        s.config.n = n;
        s.dag_count = dag_count;
        s.split = train.contains(s.set_id) ? Split::Train : Split::Test;
        s.paper_protocol = true;
        m.sets.push_back(s);
    }
    return m;
}

DagRecord generate_record(const DatasetManifest& manifest, const DatasetSet& set, std::size_t index) {
    const std::uint64_t sub = derive_seed(manifest.seed, {static_cast<std::uint64_t>(set.set_id), index});
    GeneratorConfig cfg = set.config;
    if (set.paper_protocol) {
        Rng rng(sub);
        cfg.fat = kProtocolShapeValues[rng.index(kProtocolShapeValues.size())];
        cfg.density = kProtocolShapeValues[rng.index(kProtocolShapeValues.size())];
        cfg.ccr = rng.uniform(0.3, 0.5);
        cfg.seed = rng.next_u64();
    } else {
        cfg.seed = sub;
    }
    return DagRecord{generate_dag(cfg), DagMeta{set.set_id, index, cfg.fat, cfg.density, cfg.ccr, cfg.seed}};
}

Dataset generate_dataset(const DatasetManifest& manifest, std::size_t threads) {
    manifest.validate();
    Dataset ds;
    ds.manifest = manifest;
    for (const DatasetSet& s : manifest.sets) {
        std::vector<std::optional<DagRecord>> slots(s.dag_count);
        parallel_for(s.dag_count, threads, [&](std::size_t i) { slots[i] = generate_record(manifest, s, i); });
        DatasetSetData data{s, {}};
        data.dags.reserve(s.dag_count);
        for (auto& r : slots) data.dags.push_back(std::move(*r));
        ds.sets.push_back(std::move(data));
    }
    return ds;
}

DagMeta DatasetSetData::mean_shape() const {
    DagMeta m{set.set_id, 0, set.config.fat, set.config.density, set.config.ccr, 0};
    if (dags.empty()) return m;
    m.fat = m.density = m.ccr = 0.0;
    for (const DagRecord& r : dags) {
        m.fat += r.meta.fat;
        m.density += r.meta.density;
        m.ccr += r.meta.ccr;
    }
    const auto k = static_cast<double>(dags.size());
    m.fat /= k;
    m.density /= k;
    m.ccr /= k;
    return m;
}

const DatasetSetData& Dataset::set(int set_id) const {
    for (const auto& s : sets)
        if (s.set.set_id == set_id) return s;
    fail(ErrorCode::MissingDataset, "no dataset with set_id " + std::to_string(set_id));
}

std::vector<const DatasetSetData*> Dataset::split(Split which) const {
    std::vector<const DatasetSetData*> out;
    for (const auto& s : sets)
        if (s.set.split == which) out.push_back(&s);
    return out;
}

std::string dag_file_name(int set_id, std::size_t index) {
    return "dag_" + std::to_string(set_id) + "_" + std::to_string(index) + ".json";
}

Json manifest_to_json(const DatasetManifest& manifest) {
    Json sets = Json::array();
    for (const DatasetSet& s : manifest.sets) {
        Json js = Json::object();
        js["set_id"] = s.set_id;
        js["dag_count"] = s.dag_count;
        js["split"] = to_string(s.split);
        js["protocol"] = s.paper_protocol ? "paper" : "fixed";
        js["config"] = config_to_json(s.config);
        Json files = Json::array();
        for (std::size_t i = 0; i < s.dag_count; ++i) files.push_back(dag_file_name(s.set_id, i));
        js["files"] = std::move(files);
        sets.push_back(std::move(js));
    }
    Json j = Json::object();
    j["version"] = kManifestVersion;
    j["prng"] = kPrngName;
    j["seed"] = manifest.seed;
    j["sets"] = std::move(sets);
    return j;
}

DatasetManifest manifest_from_json(const Json& j) {
    try {
        if (j.contains("paper_protocol")) {
            const Json& p = j["paper_protocol"];
            return paper_protocol_manifest(p.value("seed", std::uint64_t{0}), p.value("n", std::size_t{20}),
                                           p.value("sets", std::size_t{25}), p.value("dag_count", std::size_t{100}),
                                           p.value("train_sets", std::size_t{22}));
        }
        if (j.contains("prng") && j["prng"].get<std::string>() != kPrngName) {
            fail(ErrorCode::InvalidConfig, "manifest was produced with a different generator");
        }
        DatasetManifest m;
        m.seed = j.value("seed", std::uint64_t{0});
        for (const Json& js : j.at("sets")) {
            DatasetSet s;
            s.set_id = js.at("set_id").get<int>();
            s.dag_count = js.at("dag_count").get<std::size_t>();
            const std::string split = js.value("split", std::string("train"));
            if (split != "train" && split != "test") fail(ErrorCode::InvalidConfig, "split must be train or test");
            s.split = split == "train" ? Split::Train : Split::Test;
            s.paper_protocol = js.value("protocol", std::string("fixed")) == "paper";
            s.config = config_from_json(js.value("config", Json::object()));
            m.sets.push_back(s);
        }
        m.validate();
        return m;
    } catch (const Json::exception& ex) {
        fail(ErrorCode::ParseError, std::string("malformed manifest: ") + ex.what());
    }
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create " + dir.string());
    write_text_file(dir / "manifest.json", dump(manifest_to_json(dataset.manifest)));
    for (const DatasetSetData& s : dataset.sets) {
        for (const DagRecord& r : s.dags) {
            Json j = graph_to_json(r.graph);
            j["meta"] = meta_to_json(r.meta);
            write_text_file(dir / dag_file_name(r.meta.set_id, r.meta.index), dump(j));
        }
    }
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        fail(ErrorCode::MissingDataset, "no manifest.json in " + dir.string());
    }
    Dataset ds;
    ds.manifest = manifest_from_json(read_json_file(manifest_path));
    for (const DatasetSet& s : ds.manifest.sets) {
        DatasetSetData data{s, {}};
        for (std::size_t i = 0; i < s.dag_count; ++i) {
            const auto path = dir / dag_file_name(s.set_id, i);
            if (!std::filesystem::exists(path)) fail(ErrorCode::MissingDataset, "missing " + path.string());
            const Json j = read_json_file(path);
            DagMeta meta = j.contains("meta") ? meta_from_json(j["meta"]) : DagMeta{s.set_id, i, 0, 0, 0, 0};
            data.dags.push_back(DagRecord{graph_from_json(j), meta});
        }
        ds.sets.push_back(std::move(data));
    }
    return ds;
}

} // namespace dagoffload
