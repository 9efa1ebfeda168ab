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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dagoffload/baselines.hpp"
#include "dagoffload/dataset.hpp"
#include "dagoffload/trainer.hpp"

namespace dagoffload {

enum class Profile { Toy, Paper };

std::string_view to_string(Profile profile) noexcept;

// Contents of an experiment config file:
//
//   [experiment]  profile, seed, manifest, dataset, checkpoint, out_dir,
//                 rates, algorithms, trajectories_per_dag, threads, split,
//                 checkpoint_every
//   [policy]      layers, heads, d_model, d_k, d_v, d_ff, dropout, causal,
//                 index_length, layer_norm_eps
//   [train]       lr_policy, lr_value, clip_eps, gamma, lambda, c1, c2,
//                 epochs, batch_size, iterations, tasks_per_iter,
//                 trajectories_per_task, optimizer, rates, dropout_in_update, seed
//
// Lists are comma separated. `profile` picks the defaults every other key
// overrides. Unknown sections or keys are rejected.
struct ExperimentConfig {
    Profile profile = Profile::Toy;
    std::uint64_t seed = 0;
    std::filesystem::path manifest;   // empty when not given
    std::filesystem::path dataset;    // generated dataset directory
    std::filesystem::path checkpoint; // policy checkpoint for eval/benchmark
    std::filesystem::path out_dir = "out";
    std::vector<double> rates_mbps{8.5, 11.5};
    std::vector<std::string> algorithms{"heft", "greedy", "all_local", "all_remote", "policy"};
    std::size_t trajectories_per_dag = kDefaultEvalTrajectories;
    std::size_t threads = 1;
    std::optional<Split> split = Split::Test; // nullopt evaluates every set
    std::size_t checkpoint_every = 0;         // 0 keeps only the final checkpoint
    PolicyConfig policy = PolicyConfig::toy();
    TrainConfig train = TrainConfig::toy();

    // Throws InvalidConfig: rates must be positive, algorithms nonempty and known.
    void validate() const;
    static ExperimentConfig for_profile(Profile profile);
};

// Relative paths in the file resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = std::filesystem::path{});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

inline constexpr const char* kOutDirEnv = "DAGOFFLOAD_OUT_DIR";
inline constexpr const char* kThreadsEnv = "DAGOFFLOAD_THREADS";

// DAGOFFLOAD_OUT_DIR replaces out_dir; DAGOFFLOAD_THREADS replaces the
// thread counts of the experiment and the trainer.
void apply_env_overrides(ExperimentConfig& config);

std::vector<double> parse_rate_list(const std::string& text);

// Feature bounds covering every set of the manifest, at the default profile.
FeatureBounds bounds_for(const DatasetManifest& manifest, const SystemProfile& profile = SystemProfile{});

// Algorithm names accepted by the benchmark: the scheduler kinds plus "policy",
// which reports a policy_best and a policy_mean row.
bool is_benchmark_algorithm(std::string_view name) noexcept;

struct BenchmarkRow {
    int dataset_id = 0;
    double fat = 0.0;
    double density = 0.0;
    double ccr = 0.0;
    double rate_mbps = 0.0;
    std::string algorithm;
    double mean_ms = 0.0;
    double std_ms = 0.0; // population standard deviation over the set's DAGs
};

struct BenchmarkOptions {
    std::vector<int> set_ids; // empty runs every set
    std::vector<double> rates_mbps{8.5, 11.5};
    std::vector<std::string> algorithms{"heft", "greedy", "all_local", "all_remote"};
    std::size_t trajectories_per_dag = kDefaultEvalTrajectories;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t oracle_cap = kDefaultOracleCap;
};

struct TrainedPolicy {
    PolicyConfig config;
    PolicyParams params;
};

// Mean AL per (set, rate, algorithm). Needs `policy` when "policy" is listed.
// Throws MissingDataset for unknown set ids.
std::vector<BenchmarkRow> run_benchmark(const Dataset& dataset, const BenchmarkOptions& options,
                                        const TrainedPolicy* policy = nullptr);

// dataset_id,fat,density,ccr,rate_mbps,algorithm,mean_AL_ms,std_AL_ms
void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);
// {"rates_mbps": [...], "datasets": [{dataset_id, fat, density, ccr,
//   "mean_AL_ms": {algorithm: {rate: ms}}, "std_AL_ms": {...}}]}
Json benchmark_to_json(const std::vector<BenchmarkRow>& rows);
// report.csv, report.json and one plot_rate_<r>.csv per rate (rows: sets,
// columns: algorithms) under `dir`.
void write_benchmark_report(const std::filesystem::path& dir, const std::vector<BenchmarkRow>& rows);

std::string format_rate(double rate_mbps);

// Trains on the dataset's train split and writes policy.ckpt (plus periodic
// checkpoints), metrics.csv and train_config.json into `out_dir`.
TrainResult run_training(const Dataset& dataset, const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const IterationCallback& on_iteration = {});

TrainedPolicy load_trained_policy(const std::filesystem::path& checkpoint);

struct PaperProtocolOptions {
    std::uint64_t seed = 0;
    std::size_t tasks = 20;
    std::size_t sets = 25;
    std::size_t dags_per_set = 100;
    std::size_t train_sets = 22;
    std::vector<double> eval_rates_mbps{8.5, 11.5};
};

// Generates the 25x100 protocol dataset, trains on the 22 training sets,
// evaluates on the 3 held-out ones and writes the bundle under
// config.out_dir: dataset/, policy.ckpt, metrics.csv, report.csv,
// report.json, plot_rate_*.csv and summary.json. Returns the summary.
Json run_paper_protocol(const PaperProtocolOptions& options, const ExperimentConfig& config);

} // namespace dagoffload
