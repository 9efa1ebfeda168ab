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

#include "dagoffload/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "dagoffload/autodiff/checkpoint.hpp"
#include "dagoffload/parallel.hpp"
#include "dagoffload/serialization.hpp"

namespace dagoffload {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::InvalidConfig, fmt::format("{}: '{}' is not a number", key, value));
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used == value.size() && v >= 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    fail(ErrorCode::InvalidConfig, fmt::format("{}: '{}' is not a non-negative integer", key, value));
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    fail(ErrorCode::InvalidConfig, fmt::format("{}: '{}' is not a boolean", key, value));
}

Profile parse_profile(const std::string& value) {
    if (value == "toy") return Profile::Toy;
    if (value == "paper") return Profile::Paper;
    fail(ErrorCode::InvalidConfig, "profile must be toy or paper, got '" + value + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

std::map<std::string, Setter> experiment_keys(const std::filesystem::path& base) {
    auto resolve = [base](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_relative() && !base.empty() ? base / p : p;
    };
    return {
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_count(k, v); }},
        {"manifest", [resolve](auto& c, auto&, auto& v) { c.manifest = resolve(v); }},
        {"dataset", [resolve](auto& c, auto&, auto& v) { c.dataset = resolve(v); }},
        {"checkpoint", [resolve](auto& c, auto&, auto& v) { c.checkpoint = resolve(v); }},
        {"out_dir", [resolve](auto& c, auto&, auto& v) { c.out_dir = resolve(v); }},
        {"rates", [](auto& c, auto&, auto& v) { c.rates_mbps = parse_rate_list(v); }},
        {"algorithms", [](auto& c, auto&, auto& v) { c.algorithms = split_list(v); }},
        {"trajectories_per_dag", [](auto& c, auto& k, auto& v) { c.trajectories_per_dag = parse_count(k, v); }},
        {"threads", [](auto& c, auto& k, auto& v) { c.threads = std::max<std::size_t>(1, parse_count(k, v)); }},
        {"checkpoint_every", [](auto& c, auto& k, auto& v) { c.checkpoint_every = parse_count(k, v); }},
        {"split",
         [](auto& c, auto&, auto& v) {
             if (v == "train") c.split = Split::Train;
             else if (v == "test") c.split = Split::Test;
             else if (v == "all") c.split = std::nullopt;
             else fail(ErrorCode::InvalidConfig, "split must be train, test or all");
         }},
    };
}

std::map<std::string, Setter> policy_keys() {
    return {
        {"layers", [](auto& c, auto& k, auto& v) { c.policy.layers = parse_count(k, v); }},
        {"heads", [](auto& c, auto& k, auto& v) { c.policy.heads = parse_count(k, v); }},
        {"d_model", [](auto& c, auto& k, auto& v) { c.policy.d_model = parse_count(k, v); }},
        {"d_k", [](auto& c, auto& k, auto& v) { c.policy.d_k = parse_count(k, v); }},
        {"d_v", [](auto& c, auto& k, auto& v) { c.policy.d_v = parse_count(k, v); }},
        {"d_ff", [](auto& c, auto& k, auto& v) { c.policy.d_ff = parse_count(k, v); }},
        {"dropout", [](auto& c, auto& k, auto& v) { c.policy.dropout = parse_double(k, v); }},
        {"causal", [](auto& c, auto& k, auto& v) { c.policy.causal = parse_bool(k, v); }},
        {"index_length", [](auto& c, auto& k, auto& v) { c.policy.index_length = parse_count(k, v); }},
        {"layer_norm_eps", [](auto& c, auto& k, auto& v) { c.policy.layer_norm_eps = parse_double(k, v); }},
    };
}

std::map<std::string, Setter> train_keys() {
    return {
        {"lr_policy", [](auto& c, auto& k, auto& v) { c.train.lr_policy = parse_double(k, v); }},
        {"lr_value", [](auto& c, auto& k, auto& v) { c.train.lr_value = parse_double(k, v); }},
        {"clip_eps", [](auto& c, auto& k, auto& v) { c.train.clip_eps = parse_double(k, v); }},
        {"gamma", [](auto& c, auto& k, auto& v) { c.train.gamma = parse_double(k, v); }},
        {"lambda", [](auto& c, auto& k, auto& v) { c.train.lambda = parse_double(k, v); }},
        {"c1", [](auto& c, auto& k, auto& v) { c.train.c1 = parse_double(k, v); }},
        {"c2", [](auto& c, auto& k, auto& v) { c.train.c2 = parse_double(k, v); }},
        {"epochs", [](auto& c, auto& k, auto& v) { c.train.epochs_per_iter = parse_count(k, v); }},
        {"batch_size", [](auto& c, auto& k, auto& v) { c.train.batch_size = parse_count(k, v); }},
        {"iterations", [](auto& c, auto& k, auto& v) { c.train.iterations = parse_count(k, v); }},
        {"tasks_per_iter", [](auto& c, auto& k, auto& v) { c.train.tasks_per_iter = parse_count(k, v); }},
        {"trajectories_per_task",
         [](auto& c, auto& k, auto& v) { c.train.trajectories_per_task = parse_count(k, v); }},
        {"rates", [](auto& c, auto&, auto& v) { c.train.rates_mbps = parse_rate_list(v); }},
        {"dropout_in_update", [](auto& c, auto& k, auto& v) { c.train.dropout_in_update = parse_bool(k, v); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.train.seed = parse_count(k, v); }},
        {"optimizer",
         [](auto& c, auto&, auto& v) {
             if (v == "adagrad") c.train.optimizer = OptimizerKind::Adagrad;
             else if (v == "adam") c.train.optimizer = OptimizerKind::Adam;
             else fail(ErrorCode::InvalidConfig, "optimizer must be adagrad or adam");
         }},
    };
}

double population_std(const std::vector<double>& xs, double mean) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

} // namespace

std::string_view to_string(Profile profile) noexcept { return profile == Profile::Paper ? "paper" : "toy"; }

ExperimentConfig ExperimentConfig::for_profile(Profile profile) {
    ExperimentConfig c;
    c.profile = profile;
    c.policy = profile == Profile::Paper ? PolicyConfig::paper() : PolicyConfig::toy();
    c.train = profile == Profile::Paper ? TrainConfig::paper() : TrainConfig::toy();
    return c;
}

void ExperimentConfig::validate() const {
    if (rates_mbps.empty()) fail(ErrorCode::InvalidConfig, "rate grid is empty");
    for (double r : rates_mbps) {
        if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::InvalidConfig, "rates must be positive");
    }
    if (algorithms.empty()) fail(ErrorCode::InvalidConfig, "algorithm list is empty");
    for (const std::string& a : algorithms) {
        if (!is_benchmark_algorithm(a)) fail(ErrorCode::InvalidConfig, "unknown algorithm '" + a + "'");
    }
    policy.validate();
    train.validate();
}

std::vector<double> parse_rate_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) {
        const double r = parse_double("rates", item);
        if (!(r > 0.0)) fail(ErrorCode::InvalidConfig, "rates must be positive, got " + item);
        out.push_back(r);
    }
    if (out.empty()) fail(ErrorCode::InvalidConfig, "rate list is empty");
    return out;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& ex) {
        fail(ErrorCode::ParseError, std::string("config: ") + ex.what());
    }
    for (const auto& [section, body] : tree) {
        if (section != "experiment" && section != "policy" && section != "train") {
            fail(ErrorCode::InvalidConfig, "unknown config section [" + section + "]");
        }
        if (body.empty() && !body.data().empty()) {
            fail(ErrorCode::InvalidConfig, "key '" + section + "' must live inside a section");
        }
    }
    Profile profile = Profile::Toy;
    if (auto p = tree.get_optional<std::string>("experiment.profile")) profile = parse_profile(trim(*p));
    ExperimentConfig config = ExperimentConfig::for_profile(profile);

    const std::map<std::string, std::map<std::string, Setter>> sections{
        {"experiment", experiment_keys(base_dir)}, {"policy", policy_keys()}, {"train", train_keys()}};
    for (const auto& [section, body] : tree) {
        const auto& setters = sections.at(section);
        for (const auto& [key, node] : body) {
            if (section == "experiment" && key == "profile") continue;
            auto it = setters.find(key);
            if (it == setters.end()) fail(ErrorCode::InvalidConfig, "unknown key " + section + "." + key);
            it->second(config, section + "." + key, trim(node.data()));
        }
    }
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(read_text_file(path), path.parent_path());
}

void apply_env_overrides(ExperimentConfig& config) {
    if (const char* out = std::getenv(kOutDirEnv); out != nullptr && *out != '\0') config.out_dir = out;
    if (const char* t = std::getenv(kThreadsEnv); t != nullptr && *t != '\0') {
        config.threads = default_thread_count();
        config.train.threads = config.threads;
    }
}

FeatureBounds bounds_for(const DatasetManifest& manifest, const SystemProfile& profile) {
    if (manifest.sets.empty()) return FeatureBounds::from_ranges({1e7, 1e8}, {5e3, 5e4}, profile);
    Range cycles = manifest.sets.front().config.cycles_range;
    Range data = manifest.sets.front().config.data_range;
    for (const DatasetSet& s : manifest.sets) {
        cycles.lo = std::min(cycles.lo, s.config.cycles_range.lo);
        cycles.hi = std::max(cycles.hi, s.config.cycles_range.hi);
        data.lo = std::min(data.lo, s.config.data_range.lo);
        data.hi = std::max(data.hi, s.config.data_range.hi);
    }
    return FeatureBounds::from_ranges(cycles, data, profile);
}

bool is_benchmark_algorithm(std::string_view name) noexcept {
    return name == "policy" || parse_scheduler(name).has_value();
}

std::string format_rate(double rate_mbps) { return fmt::format("{:g}", rate_mbps); }

std::vector<BenchmarkRow> run_benchmark(const Dataset& dataset, const BenchmarkOptions& options,
                                        const TrainedPolicy* policy) {
    std::vector<const DatasetSetData*> sets;
    if (options.set_ids.empty()) {
        for (const DatasetSetData& s : dataset.sets) sets.push_back(&s);
    } else {
        for (int id : options.set_ids) sets.push_back(&dataset.set(id));
    }
    if (sets.empty()) fail(ErrorCode::MissingDataset, "benchmark has no datasets to run");
    for (const std::string& a : options.algorithms) {
        if (!is_benchmark_algorithm(a)) fail(ErrorCode::InvalidConfig, "unknown algorithm '" + a + "'");
        if (a == "policy" && policy == nullptr) fail(ErrorCode::InvalidArgument, "policy rows need a checkpoint");
    }
    const FeatureBounds bounds = bounds_for(dataset.manifest);

    std::vector<BenchmarkRow> rows;
    for (const DatasetSetData* s : sets) {
        const DagMeta shape = s->mean_shape();
        for (double rate : options.rates_mbps) {
            const SystemProfile profile = SystemProfile::with_rate(mbps(rate));
            auto row = [&](std::string name, const std::vector<double>& latencies_s) {
                std::vector<double> ms;
                for (double l : latencies_s) ms.push_back(l * 1e3);
                const double mean = mean_of(ms);
                rows.push_back({s->set.set_id, shape.fat, shape.density, shape.ccr, rate, std::move(name), mean,
                                population_std(ms, mean)});
            };
            for (const std::string& a : options.algorithms) {
                if (a == "policy") {
                    std::vector<const TaskGraph*> graphs;
                    for (const DagRecord& r : s->dags) graphs.push_back(&r.graph);
                    const PolicyEvaluation ev = evaluate_policy(
                        policy->params, policy->config, graphs,
                        default_env_factory(policy->config.index_length, SystemProfile{}, bounds), mbps(rate),
                        options.trajectories_per_dag,
                        derive_seed(options.seed, {static_cast<std::uint64_t>(s->set.set_id),
                                                   static_cast<std::uint64_t>(std::llround(rate * 1000))}),
                        options.threads);
                    std::vector<double> best, mean;
                    for (const DagEvaluation& d : ev.dags) {
                        best.push_back(d.best_latency);
                        mean.push_back(d.mean_latency);
                    }
                    row("policy_best", best);
                    row("policy_mean", mean);
                    continue;
                }
                const SchedulerKind kind = *parse_scheduler(a);
                std::vector<double> latencies(s->dags.size());
                parallel_for(s->dags.size(), options.threads, [&](std::size_t i) {
                    const TaskGraph& g = s->dags[i].graph;
                    const RankedSequence seq = compute_ranks(g, profile);
                    SchedulerOptions so;
                    so.seed = derive_seed(options.seed, {static_cast<std::uint64_t>(s->set.set_id), i});
                    so.oracle_cap = options.oracle_cap;
                    latencies[i] = evaluate_plan(g, seq, run_scheduler(kind, g, seq, profile, so), profile).latency;
                });
                row(std::string(to_string(kind)), latencies);
            }
        }
    }
    return rows;
}

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
    os << "dataset_id,fat,density,ccr,rate_mbps,algorithm,mean_AL_ms,std_AL_ms\n";
    for (const BenchmarkRow& r : rows) {
        os << fmt::format("{},{:.4f},{:.4f},{:.4f},{},{},{:.6f},{:.6f}\n", r.dataset_id, r.fat, r.density, r.ccr,
                          format_rate(r.rate_mbps), r.algorithm, r.mean_ms, r.std_ms);
    }
}

Json benchmark_to_json(const std::vector<BenchmarkRow>& rows) {
    Json out = Json::object();
    std::vector<double> rates;
    for (const BenchmarkRow& r : rows) {
        if (std::find(rates.begin(), rates.end(), r.rate_mbps) == rates.end()) rates.push_back(r.rate_mbps);
    }
    out["rates_mbps"] = rates;
    Json sets = Json::array();
    for (const BenchmarkRow& r : rows) {
        auto it = std::find_if(sets.begin(), sets.end(),
                               [&](const Json& j) { return j["dataset_id"].get<int>() == r.dataset_id; });
        if (it == sets.end()) {
            Json j = Json::object();
            j["dataset_id"] = r.dataset_id;
            j["fat"] = r.fat;
            j["density"] = r.density;
            j["ccr"] = r.ccr;
            j["mean_AL_ms"] = Json::object();
            j["std_AL_ms"] = Json::object();
            sets.push_back(j);
            it = sets.end() - 1;
        }
        (*it)["mean_AL_ms"][r.algorithm][format_rate(r.rate_mbps)] = r.mean_ms;
        (*it)["std_AL_ms"][r.algorithm][format_rate(r.rate_mbps)] = r.std_ms;
    }
    out["datasets"] = sets;
    return out;
}

void write_benchmark_report(const std::filesystem::path& dir, const std::vector<BenchmarkRow>& rows) {
    std::ostringstream csv;
    write_benchmark_csv(csv, rows);
    write_text_file(dir / "report.csv", csv.str());
    write_text_file(dir / "report.json", dump(benchmark_to_json(rows)));

    std::vector<double> rates;
    std::vector<std::string> algorithms;
    for (const BenchmarkRow& r : rows) {
        if (std::find(rates.begin(), rates.end(), r.rate_mbps) == rates.end()) rates.push_back(r.rate_mbps);
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) {
            algorithms.push_back(r.algorithm);
        }
    }
    for (double rate : rates) {
        std::ostringstream os;
        os << "dataset_id";
        for (const std::string& a : algorithms) os << ',' << a;
        os << '\n';
        std::vector<int> ids;
        for (const BenchmarkRow& r : rows) {
            if (r.rate_mbps == rate && std::find(ids.begin(), ids.end(), r.dataset_id) == ids.end()) {
                ids.push_back(r.dataset_id);
            }
        }
        for (int id : ids) {
            os << id;
            for (const std::string& a : algorithms) {
                os << ',';
                for (const BenchmarkRow& r : rows) {
                    if (r.rate_mbps == rate && r.dataset_id == id && r.algorithm == a) {
                        os << fmt::format("{:.6f}", r.mean_ms);
                    }
                }
            }
            os << '\n';
        }
        write_text_file(dir / ("plot_rate_" + format_rate(rate) + ".csv"), os.str());
    }
}

TrainResult run_training(const Dataset& dataset, const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const IterationCallback& on_iteration) {
    const std::vector<TrainingDag> dags = training_dags(dataset, Split::Train);
    if (dags.empty()) fail(ErrorCode::MissingDataset, "dataset has no training sets");
    const FeatureBounds bounds = bounds_for(dataset.manifest);
    PolicyParams initial = PolicyParams::initialize(config.policy, derive_seed(config.train.seed, {0x1a17ULL}));

    auto callback = [&](const IterationMetrics& m, const PolicyParams& params, const GroupedOptimizer& opt) {
        if (on_iteration) on_iteration(m, params, opt);
        const std::size_t done = m.iteration + 1;
        if (config.checkpoint_every > 0 && done % config.checkpoint_every == 0 && done < config.train.iterations) {
            ad::save_checkpoint(out_dir / fmt::format("checkpoint_{:05d}.ckpt", done),
                                make_checkpoint(params, config.policy, opt.state(params)));
        }
    };
    TrainResult result = train(dags, default_env_factory(config.policy.index_length, SystemProfile{}, bounds),
                               config.policy, std::move(initial), config.train, callback);
    ad::save_checkpoint(out_dir / "policy.ckpt",
                        make_checkpoint(result.params, config.policy, result.optimizer_state));
    std::ostringstream metrics;
    write_metrics_csv(metrics, result.metrics);
    write_text_file(out_dir / "metrics.csv", metrics.str());
    Json cfg = Json::object();
    cfg["profile"] = std::string(to_string(config.profile));
    cfg["policy"] = policy_config_to_json(config.policy);
    cfg["train"] = train_config_to_json(config.train);
    write_text_file(out_dir / "train_config.json", dump(cfg));
    return result;
}

TrainedPolicy load_trained_policy(const std::filesystem::path& checkpoint) {
    if (!std::filesystem::exists(checkpoint)) fail(ErrorCode::IoFailure, "no checkpoint at " + checkpoint.string());
    LoadedPolicy p = policy_from_checkpoint(ad::load_checkpoint(checkpoint));
    return {p.config, std::move(p.params)};
}

Json run_paper_protocol(const PaperProtocolOptions& options, const ExperimentConfig& config) {
    const std::filesystem::path out = config.out_dir;
    const DatasetManifest manifest =
        paper_protocol_manifest(options.seed, options.tasks, options.sets, options.dags_per_set, options.train_sets);
    const Dataset dataset = generate_dataset(manifest, config.threads);
    write_dataset(dataset, out / "dataset");

    ExperimentConfig cfg = config;
    cfg.train.threads = config.threads;
    const TrainResult trained = run_training(dataset, cfg, out);

    std::set<int> test_ids;
    std::vector<int> test_list;
    for (const DatasetSetData* s : dataset.split(Split::Test)) {
        test_ids.insert(s->set.set_id);
        test_list.push_back(s->set.set_id);
    }
    bool leak = false;
    for (const IterationMetrics& m : trained.metrics) {
        for (int id : m.set_ids) leak = leak || test_ids.count(id) > 0;
    }
    if (leak) fail(ErrorCode::InvalidPlan, "a held-out set was sampled during training");

    BenchmarkOptions bo;
    bo.set_ids = test_list;
    bo.rates_mbps = options.eval_rates_mbps;
    bo.algorithms = {"heft", "greedy", "all_local", "all_remote", "policy"};
    bo.trajectories_per_dag = config.trajectories_per_dag;
    bo.seed = derive_seed(options.seed, {0xe7a1ULL});
    bo.threads = config.threads;
    const TrainedPolicy policy{cfg.policy, trained.params};
    const std::vector<BenchmarkRow> rows = run_benchmark(dataset, bo, &policy);
    write_benchmark_report(out, rows);

    Json summary = Json::object();
    summary["profile"] = std::string(to_string(config.profile));
    summary["seed"] = options.seed;
    summary["tasks"] = options.tasks;
    summary["sets"] = options.sets;
    summary["dags_per_set"] = options.dags_per_set;
    std::vector<int> train_list;
    for (const DatasetSetData* s : dataset.split(Split::Train)) train_list.push_back(s->set.set_id);
    summary["train_sets"] = train_list;
    summary["test_sets"] = test_list;
    summary["held_out_sampled_in_training"] = leak;
    summary["iterations"] = trained.metrics.size();
    summary["files"] = {"dataset/manifest.json", "policy.ckpt", "metrics.csv", "train_config.json",
                        "report.csv", "report.json"};
    summary["report"] = benchmark_to_json(rows);
    write_text_file(out / "summary.json", dump(summary));
    return summary;
}

} // namespace dagoffload
