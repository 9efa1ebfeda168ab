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

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dagoffload/harness.hpp"
#include "dagoffload/serialization.hpp"

using namespace dagoffload;

namespace {

void print_error(std::string_view code, const std::string& message) {
    Json j = Json::object();
    j["error"] = std::string(code);
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_experiment_config(path);
    apply_env_overrides(c);
    return c;
}

std::filesystem::path out_dir(const std::string& flag, const ExperimentConfig& config) {
    return flag.empty() ? config.out_dir : std::filesystem::path(flag);
}

Dataset dataset_from(const std::string& dataset_dir, const std::string& manifest, const ExperimentConfig& config) {
    if (!dataset_dir.empty()) return load_dataset(dataset_dir);
    if (!config.dataset.empty() && manifest.empty()) return load_dataset(config.dataset);
    const std::filesystem::path m = manifest.empty() ? config.manifest : std::filesystem::path(manifest);
    if (m.empty()) fail(ErrorCode::MissingDataset, "give --dataset or --manifest");
    if (!std::filesystem::exists(m)) fail(ErrorCode::MissingDataset, "no manifest at " + m.string());
    return generate_dataset(manifest_from_json(read_json_file(m)), config.threads);
}

bool is_bitstring(const std::string& s) {
    return !s.empty() && s.find_first_not_of("01") == std::string::npos;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG task offloading simulator, baselines and PPO-trained Transformer policy"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // generate
    std::string gen_manifest, gen_out;
    auto* generate = app.add_subcommand("generate", "Generate a DAG dataset from a manifest");
    generate->add_option("--manifest", gen_manifest, "Manifest JSON")->required();
    generate->add_option("--out", gen_out, "Output directory");

    // schedule
    std::string sch_dag, sch_plan, sch_algorithm;
    double sch_up = 8.5, sch_do = 8.5;
    std::uint64_t sch_seed = 0;
    std::size_t sch_cap = kDefaultOracleCap;
    auto* schedule = app.add_subcommand("schedule", "Evaluate a plan or a scheduler on one DAG");
    schedule->add_option("--dag", sch_dag, "DAG JSON")->required();
    auto* plan_opt = schedule->add_option("--plan", sch_plan, "Bitstring in rank order, or an algorithm name");
    auto* alg_opt = schedule->add_option("--algorithm", sch_algorithm,
                                         "heft|greedy|oracle|all-local|all-remote|random");
    plan_opt->excludes(alg_opt);
    schedule->add_option("--rate-up", sch_up, "Uplink rate, Mbps");
    schedule->add_option("--rate-do", sch_do, "Downlink rate, Mbps");
    schedule->add_option("--seed", sch_seed, "Seed for the random scheduler");
    schedule->add_option("--oracle-cap", sch_cap, "Largest DAG the oracle accepts");

    // oracle
    std::string orc_dag;
    double orc_up = 8.5, orc_do = 8.5;
    std::size_t orc_cap = kDefaultOracleCap;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimal plan for one DAG");
    oracle->add_option("--dag", orc_dag, "DAG JSON")->required();
    oracle->add_option("--rate-up", orc_up, "Uplink rate, Mbps");
    oracle->add_option("--rate-do", orc_do, "Downlink rate, Mbps");
    oracle->add_option("--cap", orc_cap, "Largest DAG accepted");

    // train
    std::string tr_manifest, tr_dataset, tr_config, tr_out;
    bool tr_verbose = false;
    auto* trainc = app.add_subcommand("train", "Train the policy on a dataset's training split");
    trainc->add_option("--manifest", tr_manifest, "Manifest JSON (dataset is generated in memory)");
    trainc->add_option("--dataset", tr_dataset, "Generated dataset directory");
    trainc->add_option("--config", tr_config, "Experiment config file");
    trainc->add_option("--out", tr_out, "Output directory");
    trainc->add_flag("--verbose", tr_verbose, "Print per-iteration metrics to stderr");

    // eval
    std::string ev_checkpoint, ev_dataset, ev_config, ev_out, ev_rates, ev_algorithms, ev_split;
    std::optional<std::size_t> ev_traj;
    std::optional<std::uint64_t> ev_seed;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint and the baselines on a dataset");
    eval->add_option("--checkpoint", ev_checkpoint, "Policy checkpoint")->required();
    eval->add_option("--dataset", ev_dataset, "Generated dataset directory")->required();
    eval->add_option("--rates", ev_rates, "Comma separated rates, Mbps");
    eval->add_option("--config", ev_config, "Experiment config file");
    eval->add_option("--out", ev_out, "Output directory");
    eval->add_option("--algorithms", ev_algorithms, "Comma separated algorithms");
    eval->add_option("--split", ev_split, "train|test|all")->check(CLI::IsMember({"train", "test", "all"}));
    eval->add_option("--trajectories", ev_traj, "Sampled trajectories per DAG");
    eval->add_option("--seed", ev_seed, "Evaluation seed");

    // benchmark
    std::string bm_config, bm_dataset, bm_manifest, bm_checkpoint, bm_out;
    auto* bench = app.add_subcommand("benchmark", "Sweep algorithms over datasets and rates");
    bench->add_option("--config", bm_config, "Experiment config file")->required();
    bench->add_option("--dataset", bm_dataset, "Generated dataset directory");
    bench->add_option("--manifest", bm_manifest, "Manifest JSON");
    bench->add_option("--checkpoint", bm_checkpoint, "Policy checkpoint for policy rows");
    bench->add_option("--out", bm_out, "Output directory");

    // paper-protocol
    std::string pp_config, pp_out;
    PaperProtocolOptions pp;
    std::optional<std::size_t> pp_iterations;
    auto* paper = app.add_subcommand("paper-protocol", "Generate, train, evaluate: the full reproduction bundle");
    paper->add_option("--config", pp_config, "Experiment config file");
    paper->add_option("--out", pp_out, "Output directory");
    paper->add_option("--seed", pp.seed, "Dataset seed");
    paper->add_option("--tasks", pp.tasks, "Tasks per DAG");
    paper->add_option("--sets", pp.sets, "Number of DAG sets");
    paper->add_option("--dags", pp.dags_per_set, "DAGs per set");
    paper->add_option("--train-sets", pp.train_sets, "Sets in the training split");
    paper->add_option("--iterations", pp_iterations, "Override training iterations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("InvalidArgument", e.what());
        return 2;
    }

    try {
        if (generate->parsed()) {
            const ExperimentConfig cfg = load_config("");
            const DatasetManifest manifest = manifest_from_json(read_json_file(gen_manifest));
            const std::filesystem::path dir = out_dir(gen_out, cfg);
            const Dataset ds = generate_dataset(manifest, cfg.threads);
            write_dataset(ds, dir);
            std::size_t count = 0;
            for (const auto& s : ds.sets) count += s.dags.size();
            Json j = Json::object();
            j["out_dir"] = dir.string();
            j["sets"] = ds.sets.size();
            j["dags"] = count;
            std::cout << j.dump() << '\n';
        } else if (schedule->parsed() || oracle->parsed()) {
            const bool is_oracle = oracle->parsed();
            const TaskGraph graph = graph_from_json(read_json_file(is_oracle ? orc_dag : sch_dag));
            SystemProfile profile;
            profile.rate_up = mbps(is_oracle ? orc_up : sch_up);
            profile.rate_do = mbps(is_oracle ? orc_do : sch_do);
            profile.validate();
            const RankedSequence seq = compute_ranks(graph, profile);
            std::string label = is_oracle ? "oracle" : (sch_algorithm.empty() ? sch_plan : sch_algorithm);
            if (label.empty()) label = "heft";
            OffloadingPlan plan;
            if (!is_oracle && is_bitstring(label)) {
                plan = OffloadingPlan::from_bitstring(label);
                if (plan.size() != graph.size()) {
                    fail(ErrorCode::InvalidPlan,
                         fmt::format("plan has {} decisions, DAG has {} tasks", plan.size(), graph.size()));
                }
                label = "plan";
            } else {
                const auto kind = parse_scheduler(label);
                if (!kind) fail(ErrorCode::InvalidArgument, "unknown algorithm '" + label + "'");
                SchedulerOptions so{sch_seed, is_oracle ? orc_cap : sch_cap};
                plan = run_scheduler(*kind, graph, seq, profile, so);
                label = std::string(to_string(*kind));
            }
            const PlanEvaluation ev = evaluate_plan(graph, seq, plan, profile);
            Json j = Json::object();
            j["algorithm"] = label;
            j["AL_ms"] = ev.latency * 1e3;
            j["plan"] = plan.to_bitstring();
            j["rank_order"] = seq.order;
            j["schedule"] = schedule_to_json(seq, plan, ev.schedule);
            std::cout << dump(j);
        } else if (trainc->parsed()) {
            ExperimentConfig cfg = load_config(tr_config);
            cfg.train.threads = cfg.threads;
            const Dataset ds = dataset_from(tr_dataset, tr_manifest, cfg);
            const std::filesystem::path dir = out_dir(tr_out, cfg);
            const TrainResult r = run_training(
                ds, cfg, dir, [&](const IterationMetrics& m, const PolicyParams&, const GroupedOptimizer&) {
                    if (tr_verbose) {
                        std::cerr << fmt::format("iter {} mean_AL_ms {:.3f} entropy {:.4f}\n", m.iteration,
                                                 m.mean_latency_ms, m.entropy);
                    }
                });
            Json j = Json::object();
            j["out_dir"] = dir.string();
            j["checkpoint"] = (dir / "policy.ckpt").string();
            j["iterations"] = r.metrics.size();
            j["final_mean_AL_ms"] = r.metrics.empty() ? 0.0 : r.metrics.back().mean_latency_ms;
            std::cout << j.dump() << '\n';
        } else if (eval->parsed()) {
            const ExperimentConfig cfg = load_config(ev_config);
            const Dataset ds = load_dataset(ev_dataset);
            const TrainedPolicy policy = load_trained_policy(ev_checkpoint);
            BenchmarkOptions bo;
            bo.rates_mbps = ev_rates.empty() ? cfg.rates_mbps : parse_rate_list(ev_rates);
            if (ev_algorithms.empty()) {
                bo.algorithms = cfg.algorithms;
            } else {
                std::stringstream ss(ev_algorithms);
                bo.algorithms.clear();
                for (std::string a; std::getline(ss, a, ',');) bo.algorithms.push_back(a);
            }
            if (std::find(bo.algorithms.begin(), bo.algorithms.end(), "policy") == bo.algorithms.end()) {
                bo.algorithms.push_back("policy");
            }
            std::optional<Split> split = cfg.split;
            if (!ev_split.empty()) {
                split = ev_split == "all" ? std::nullopt
                                          : std::optional<Split>(ev_split == "train" ? Split::Train : Split::Test);
            }
            if (split) {
                for (const DatasetSetData* s : ds.split(*split)) bo.set_ids.push_back(s->set.set_id);
                if (bo.set_ids.empty()) fail(ErrorCode::MissingDataset, "dataset has no sets in that split");
            }
            bo.trajectories_per_dag = ev_traj.value_or(cfg.trajectories_per_dag);
            bo.seed = ev_seed.value_or(cfg.seed);
            bo.threads = cfg.threads;
            const auto rows = run_benchmark(ds, bo, &policy);
            const std::filesystem::path dir = out_dir(ev_out, cfg);
            write_benchmark_report(dir, rows);
            write_benchmark_csv(std::cout, rows);
        } else if (bench->parsed()) {
            const ExperimentConfig cfg = load_config(bm_config);
            const Dataset ds = dataset_from(bm_dataset, bm_manifest, cfg);
            BenchmarkOptions bo;
            bo.rates_mbps = cfg.rates_mbps;
            bo.algorithms = cfg.algorithms;
            if (cfg.split) {
                for (const DatasetSetData* s : ds.split(*cfg.split)) bo.set_ids.push_back(s->set.set_id);
                if (bo.set_ids.empty()) fail(ErrorCode::MissingDataset, "dataset has no sets in that split");
            }
            bo.trajectories_per_dag = cfg.trajectories_per_dag;
            bo.seed = cfg.seed;
            bo.threads = cfg.threads;
            std::optional<TrainedPolicy> policy;
            const std::filesystem::path ckpt = bm_checkpoint.empty() ? cfg.checkpoint : std::filesystem::path(bm_checkpoint);
            if (!ckpt.empty()) policy = load_trained_policy(ckpt);
            const auto rows = run_benchmark(ds, bo, policy ? &*policy : nullptr);
            const std::filesystem::path dir = out_dir(bm_out, cfg);
            write_benchmark_report(dir, rows);
            write_benchmark_csv(std::cout, rows);
        } else if (paper->parsed()) {
            ExperimentConfig cfg = load_config(pp_config);
            if (!pp_out.empty()) cfg.out_dir = pp_out;
            if (pp_iterations) cfg.train.iterations = *pp_iterations;
            cfg.train.threads = cfg.threads;
            const Json summary = run_paper_protocol(pp, cfg);
            Json j = Json::object();
            j["out_dir"] = cfg.out_dir.string();
            j["test_sets"] = summary["test_sets"];
            j["held_out_sampled_in_training"] = summary["held_out_sampled_in_training"];
            std::cout << j.dump() << '\n';
        }
    } catch (const Error& e) {
        print_error(to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
