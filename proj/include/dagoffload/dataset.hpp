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
#include <vector>

#include "dagoffload/generator.hpp"
#include "dagoffload/serialization.hpp"

namespace dagoffload {

enum class Split { Train, Test };

struct DatasetSet {
    int set_id = 0;
    GeneratorConfig config; // config.seed is ignored; per-DAG seeds derive from the manifest seed
    std::size_t dag_count = 0;
    Split split = Split::Train;
    // Draw fat and density per DAG from {0.4,...,0.8} and ccr from U[0.3,0.5].
    bool paper_protocol = false;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    std::vector<DatasetSet> sets;

    // Unique set ids, valid configs.
    void validate() const;
};

// `set_count` sets of `dag_count` DAGs with n tasks each; `train_count` of them,
// picked at random from the seed, form the training split.
DatasetManifest paper_protocol_manifest(std::uint64_t seed, std::size_t n = 20, std::size_t set_count = 25,
                                        std::size_t dag_count = 100, std::size_t train_count = 22);

struct DagMeta {
    int set_id = 0;
    std::size_t index = 0;
    double fat = 0.0;
    double density = 0.0;
    double ccr = 0.0;
    std::uint64_t seed = 0;
};

struct DagRecord {
    TaskGraph graph;
    DagMeta meta;
};

struct DatasetSetData {
    DatasetSet set;
    std::vector<DagRecord> dags;

    // Mean of the per-DAG shape parameters (equal to the config for fixed sets).
    DagMeta mean_shape() const;
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<DatasetSetData> sets;

    const DatasetSetData& set(int set_id) const;
    std::vector<const DatasetSetData*> split(Split which) const;
};

// Deterministic in (manifest.seed, set_id, index); independent of the order
// or parallelism in which DAGs are produced.
DagRecord generate_record(const DatasetManifest& manifest, const DatasetSet& set, std::size_t index);
Dataset generate_dataset(const DatasetManifest& manifest, std::size_t threads = 1);

std::string dag_file_name(int set_id, std::size_t index);

// Writes manifest.json and dag_<set>_<i>.json files into `dir`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
// Throws MissingDataset when the directory or a listed file is absent.
Dataset load_dataset(const std::filesystem::path& dir);

Json manifest_to_json(const DatasetManifest& manifest);
// Also accepts the shorthand {"paper_protocol": {"seed", "n", "sets", "dag_count", "train_sets"}}.
DatasetManifest manifest_from_json(const Json& j);

std::string_view to_string(Split split) noexcept;

} // namespace dagoffload
