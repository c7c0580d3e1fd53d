// Copyright 2026 The qtis Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// qtis command line: batch experiments, table checks, single solves and
// circuit/QUBO dumps.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtis/circuits.hpp"
#include "qtis/harness.hpp"
#include "qtis/model.hpp"
#include "qtis/optimize.hpp"
#include "qtis/qubo.hpp"

namespace {

using namespace qtis;

// "1..6", "1,3,5" or a mix such as "1..3,6".
std::vector<int> parse_sets(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stoi(part));
            } else {
                const int lo = std::stoi(part.substr(0, dots));
                const int hi = std::stoi(part.substr(dots + 2));
                if (hi < lo) throw std::invalid_argument("empty range");
                for (int i = lo; i <= hi; ++i) out.push_back(i);
            }
        } catch (const std::logic_error&) {
            throw std::invalid_argument("--sets: cannot parse '" + part + "'");
        }
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::vector<ZetaMode> parse_modes(const std::string& s) {
    if (s == "both") return {ZetaMode::Independent, ZetaMode::Shared};
    return {parse_zeta_mode(s)};
}

struct InstanceSource {
    int set_id = 0;
    std::string path;

    SchedulingInstance load() const {
        if (!path.empty()) return load_instance_file(path);
        return builtin_test_set(set_id);
    }
};

void add_instance_options(CLI::App* cmd, InstanceSource& src) {
    auto* set = cmd->add_option("--set", src.set_id, "Built-in set id (1..6)");
    auto* file = cmd->add_option("--instance", src.path, "Instance JSON file");
    set->excludes(file);
}

struct AnsatzFlags {
    int depth = 10;
    std::string zeta_mode = "independent";
    std::string variant = "classical";
    bool prune = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--depth,-L", depth, "Number of layers")->check(CLI::PositiveNumber);
        cmd->add_option("--zeta-mode", zeta_mode, "independent|shared");
        cmd->add_option("--variant", variant, "Conflict circuit: classical|quantum");
        cmd->add_flag("--prune", prune, "Drop controlled gates of pairs known not to overlap");
    }
    AnsatzConfig config() const { return {depth, parse_zeta_mode(zeta_mode), parse_variant(variant), prune}; }
};

int cmd_run(const std::string& sets, const std::string& strategies, const std::string& modes,
            const std::string& variant, const std::string& estimator, const std::string& out_dir,
            const std::string& format, bool trace, ExperimentConfig cfg) {
    cfg.sets = parse_sets(sets);
    cfg.strategies.clear();
    for (const auto& s : split_csv(strategies)) cfg.strategies.push_back(parse_strategy(s));
    cfg.zeta_modes = parse_modes(modes);
    cfg.variant = parse_variant(variant);
    cfg.estimator = parse_estimator(estimator);
    if (trace) cfg.trace_dir = (std::filesystem::path(out_dir) / "traces").string();
    cfg.validate();

    std::fprintf(stderr, "running %zu cells x %d runs (L=%d, %s estimator)\n",
                 cfg.sets.size() * cfg.strategies.size() * cfg.zeta_modes.size(), cfg.runs, cfg.depth,
                 to_string(cfg.estimator));
    const auto batches = run_batch(cfg, [](const BatchResult& b, int run) {
        std::fprintf(stderr, "  set %d %s %s run %d: e_norm=%.6f\n", b.set_id, to_string(b.strategy),
                     to_string(b.zeta_mode), run, b.runs[static_cast<std::size_t>(run)].e_norm);
    });

    const std::string stem = (std::filesystem::path(out_dir) / "results").string();
    std::vector<std::string> written;
    if (format == "csv" || format == "both") {
        for (auto& p : export_results(batches, ExportFormat::Csv, stem)) written.push_back(p);
    }
    if (format == "json" || format == "both") {
        for (auto& p : export_results(batches, ExportFormat::Json, stem)) written.push_back(p);
    }
    std::cout << aggregate_csv(batches);
    for (const auto& p : written) std::fprintf(stderr, "wrote %s\n", p.c_str());

    int failed = 0;
    for (const auto& b : batches) {
        if (b.ok()) continue;
        ++failed;
        std::fprintf(stderr, "cell set %d %s %s failed: %s\n", b.set_id, to_string(b.strategy),
                     to_string(b.zeta_mode), b.error->c_str());
    }
    return failed == 0 ? 0 : 1;
}

int cmd_verify() {
    int failed = 0;
    for (const auto& c : verify_tables()) {
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        failed += !c.passed;
    }
    std::printf("%s\n", failed == 0 ? "all checks passed" : "some checks failed");
    return failed == 0 ? 0 : 1;
}

int cmd_solve(const InstanceSource& src, const AnsatzFlags& ansatz, const std::string& strategy,
              const std::string& estimator, std::uint64_t shots, std::uint64_t seed, bool score_from_ancilla,
              const OptimizerOptions& optimizer) {
    const SchedulingInstance inst = src.load();
    RunOptions opts;
    opts.objective.ansatz = ansatz.config();
    opts.objective.estimator = parse_estimator(estimator);
    opts.objective.shots = shots;
    opts.objective.score_from_ancilla = score_from_ancilla;
    opts.optimizer = optimizer;
    opts.seed = seed;
    const RunResult r = run_strategy(parse_strategy(strategy), inst, opts);
    const Schedule s = decode_solution(r.modal, inst);
    std::printf("strategy %s, L=%d, seed %llu\n", to_string(r.strategy), ansatz.depth,
                static_cast<unsigned long long>(r.seed));
    std::printf("e_norm %.6f  energy %.6f  evaluations %d  converged %s  wall %.3f s\n", r.e_norm, r.raw_energy,
                r.evaluations, r.converged ? "yes" : "no", r.wall_time_s);
    std::printf("most likely assignment %s (energy %g)\n", r.modal.to_string().c_str(), r.modal_energy);
    std::printf("%s", s.to_string().c_str());
    return 0;
}

int cmd_dump_circuit(const InstanceSource& src, const AnsatzFlags& ansatz, std::uint64_t seed, bool zeros) {
    const SchedulingInstance inst = src.load();
    const AnsatzConfig cfg = ansatz.config();
    ParameterVector params;
    if (zeros) {
        params = ParameterVector::unflatten(std::vector<double>(ParameterVector::size_for(cfg.depth, cfg.zeta_mode), 0.0),
                                            cfg.depth, cfg.zeta_mode);
    } else {
        std::mt19937_64 rng(seed);
        params = init_random_params(cfg.depth, cfg.zeta_mode, rng);
    }
    std::cout << build_ansatz(inst, cfg, params).circuit.dump();
    return 0;
}

int cmd_dump_qubo(const InstanceSource& src, bool ising) {
    const SchedulingInstance inst = src.load();
    const QuboModel q = build_qubo(inst, overlap_matrix(inst));
    std::cout << (ising ? dump_ising(qubo_to_ising(q)) : dump_qubo(q));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval scheduling with ancilla-gated QAOA on a statevector simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Batch experiment over built-in sets");
    std::string sets = "1..6", strategies = "standard,tqaoa,htqaoa", modes = "both", variant = "classical";
    std::string estimator = "exact", out_dir = "results", format = "both";
    bool trace = false;
    ExperimentConfig cfg;
    run->add_option("--sets", sets, "Set ids, e.g. 1..6 or 1,4");
    run->add_option("--strategies", strategies, "Comma list of standard,tqaoa,htqaoa");
    run->add_option("--zeta-mode", modes, "independent|shared|both");
    run->add_option("--variant", variant, "classical|quantum");
    run->add_option("--depth,-L", cfg.depth, "Number of layers")->check(CLI::PositiveNumber);
    run->add_option("--runs", cfg.runs, "Runs per cell")->check(CLI::PositiveNumber);
    run->add_option("--estimator", estimator, "exact|sampled");
    run->add_option("--shots", cfg.shots, "Shots per evaluation in sampled mode");
    run->add_option("--seed", cfg.base_seed, "Base seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--format", format, "csv|json|both")->check(CLI::IsMember({"csv", "json", "both"}));
    run->add_option("--workers", cfg.workers, "Worker threads (0 = OpenMP default)");
    run->add_option("--max-evals", cfg.optimizer.max_evaluations, "Evaluation budget per minimization");
    run->add_flag("--score-from-ancilla", cfg.score_from_ancilla, "Gate conflict penalties on measured ancillas");
    run->add_flag("--prune", cfg.prune, "Drop controlled gates of pairs known not to overlap");
    run->add_flag("--trace", trace, "Write one evaluation log per run under <out>/traces");

    // verify
    auto* verify = app.add_subcommand("verify", "Check energy bounds, overlaps and minima of the built-in sets");

    // solve
    auto* solve = app.add_subcommand("solve", "Optimize one instance and print the decoded schedule");
    InstanceSource solve_src;
    AnsatzFlags solve_ansatz;
    std::string solve_strategy = "standard", solve_estimator = "exact";
    std::uint64_t solve_shots = 100000, solve_seed = 1;
    bool solve_ancilla = false;
    OptimizerOptions solve_opt;
    add_instance_options(solve, solve_src);
    solve_ansatz.add(solve);
    solve->add_option("--strategy", solve_strategy, "standard|tqaoa|htqaoa");
    solve->add_option("--estimator", solve_estimator, "exact|sampled");
    solve->add_option("--shots", solve_shots, "Shots per evaluation in sampled mode");
    solve->add_option("--seed", solve_seed, "Run seed");
    solve->add_option("--max-evals", solve_opt.max_evaluations, "Evaluation budget per minimization");
    solve->add_flag("--score-from-ancilla", solve_ancilla, "Gate conflict penalties on measured ancillas");

    // dump-circuit
    auto* dump = app.add_subcommand("dump-circuit", "Print the ansatz gate list");
    InstanceSource dump_src;
    AnsatzFlags dump_ansatz;
    dump_ansatz.depth = 1;
    std::uint64_t dump_seed = 1;
    bool dump_zeros = false;
    add_instance_options(dump, dump_src);
    dump_ansatz.add(dump);
    dump->add_option("--seed", dump_seed, "Seed for random angles");
    dump->add_flag("--zeros", dump_zeros, "Use all-zero angles");

    // dump-qubo
    auto* dq = app.add_subcommand("dump-qubo", "Print QUBO or Ising coefficients");
    InstanceSource dq_src;
    bool dq_ising = false;
    add_instance_options(dq, dq_src);
    dq->add_flag("--ising", dq_ising, "Print the spin form");

    CLI11_PARSE(app, argc, argv);

    try {
        for (InstanceSource* s : {&solve_src, &dump_src, &dq_src}) {
            if (s->path.empty() && s->set_id == 0) s->set_id = 1;
        }
        if (*run) return cmd_run(sets, strategies, modes, variant, estimator, out_dir, format, trace, cfg);
        if (*verify) return cmd_verify();
        if (*solve) {
            return cmd_solve(solve_src, solve_ansatz, solve_strategy, solve_estimator, solve_shots, solve_seed,
                             solve_ancilla, solve_opt);
        }
        if (*dump) return cmd_dump_circuit(dump_src, dump_ansatz, dump_seed, dump_zeros);
        if (*dq) return cmd_dump_qubo(dq_src, dq_ising);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
