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

#include "qtis/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qtis {

using json = nlohmann::json;

std::string Schedule::to_string() const {
    std::ostringstream out;
    for (std::size_t t = 0; t < resources.size(); ++t) {
        out << "task " << t + 1 << ": ";
        if (resources[t].empty()) {
            out << "unassigned";
        } else {
            for (std::size_t r = 0; r < resources[t].size(); ++r) {
                out << (r ? ", " : "") << "resource " << resources[t][r] + 1;
            }
        }
        out << '\n';
    }
    for (const auto& c : conflicts) {
        out << "conflict: tasks " << c.task_i + 1 << " and " << c.task_k + 1 << " on resource "
            << c.resource + 1 << '\n';
    }
    out << (valid() ? "valid schedule" : "invalid schedule") << '\n';
    return out.str();
}

Schedule decode_solution(const Assignment& bits, const SchedulingInstance& instance) {
    const int n = instance.num_tasks();
    const int m = instance.resources();
    if (bits.size() != instance.num_vars()) {
        throw std::invalid_argument("decode_solution: expected " + std::to_string(instance.num_vars()) +
                                    " bits, got " + std::to_string(bits.size()));
    }
    Schedule s;
    s.resources.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (bits[var_index(i, j, m)]) s.resources[static_cast<std::size_t>(i)].push_back(j);
        }
        const auto count = s.resources[static_cast<std::size_t>(i)].size();
        if (count == 0) s.unassigned.push_back(i);
        if (count > 1) s.multiply_assigned.push_back(i);
    }
    const OverlapMatrix overlaps = overlap_matrix(instance);
    for (auto [i, k] : task_pairs(n)) {
        if (!overlaps.overlaps(i, k)) continue;
        for (int j = 0; j < m; ++j) {
            if (bits[var_index(i, j, m)] && bits[var_index(k, j, m)]) s.conflicts.push_back({i, k, j});
        }
    }
    return s;
}

void ExperimentConfig::validate() const {
    if (sets.empty()) throw std::invalid_argument("experiment: no sets requested");
    if (strategies.empty()) throw std::invalid_argument("experiment: no strategies requested");
    if (zeta_modes.empty()) throw std::invalid_argument("experiment: no zeta modes requested");
    if (runs < 1) throw std::invalid_argument("experiment: runs must be at least 1");
    if (depth < 1) throw std::invalid_argument("experiment: depth must be at least 1");
    if (estimator == Estimator::Sampled && shots < 1) {
        throw std::invalid_argument("experiment: sampled estimator needs shots >= 1");
    }
    if (workers < 0) throw std::invalid_argument("experiment: workers must be >= 0");
    for (int id : sets) (void)builtin_test_set(id);
    optimizer.validate();
}

namespace {

std::vector<double> e_norms(const BatchResult& b) {
    std::vector<double> v;
    v.reserve(b.runs.size());
    for (const auto& r : b.runs) v.push_back(r.e_norm);
    return v;
}

void require_runs(const BatchResult& b) {
    if (b.runs.empty()) throw std::logic_error("BatchResult: no completed runs");
}

}  // namespace

double BatchResult::mean_e_norm() const {
    require_runs(*this);
    const auto v = e_norms(*this);
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double BatchResult::median_e_norm() const {
    require_runs(*this);
    auto v = e_norms(*this);
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double BatchResult::min_e_norm() const {
    require_runs(*this);
    const auto v = e_norms(*this);
    return *std::min_element(v.begin(), v.end());
}

double BatchResult::mean_wall_s() const {
    require_runs(*this);
    double s = 0.0;
    for (const auto& r : runs) s += r.wall_time_s;
    return s / static_cast<double>(runs.size());
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, int cell_index, int run_index) noexcept {
    return base_seed ^ (static_cast<std::uint64_t>(cell_index) * 0x9E3779B97F4A7C15ULL) ^
           static_cast<std::uint64_t>(run_index);
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string trace_path(const std::string& dir, const BatchResult& cell, int run) {
    return (std::filesystem::path(dir) / ("trace_set" + std::to_string(cell.set_id) + "_" +
                                          to_string(cell.strategy) + "_" + to_string(cell.zeta_mode) +
                                          "_run" + std::to_string(run) + ".csv"))
        .string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

std::vector<BatchResult> run_batch(const ExperimentConfig& config,
                                   const std::function<void(const BatchResult&, int run)>& on_run_done) {
    config.validate();
    if (config.trace_dir) std::filesystem::create_directories(*config.trace_dir);

    std::vector<BatchResult> cells;
    for (int set : config.sets) {
        for (Strategy st : config.strategies) {
            for (ZetaMode mode : config.zeta_modes) {
                BatchResult b;
                b.cell_index = static_cast<int>(cells.size());
                b.set_id = set;
                b.strategy = st;
                b.zeta_mode = mode;
                b.variant = config.variant;
                b.depth = config.depth;
                b.runs.resize(static_cast<std::size_t>(config.runs));
                cells.push_back(std::move(b));
            }
        }
    }

    const int runs = config.runs;
    const auto jobs = static_cast<std::int64_t>(cells.size()) * runs;
    std::vector<std::string> errors(static_cast<std::size_t>(jobs));
    const int workers = config.workers > 0 ? config.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t job = 0; job < jobs; ++job) {
        BatchResult& cell = cells[static_cast<std::size_t>(job / runs)];
        const int run = static_cast<int>(job % runs);
        try {
            RunOptions opts;
            opts.objective.ansatz = {config.depth, cell.zeta_mode, config.variant, config.prune};
            opts.objective.estimator = config.estimator;
            opts.objective.shots = config.shots;
            opts.objective.score_from_ancilla = config.score_from_ancilla;
            opts.optimizer = config.optimizer;
            opts.seed = derive_run_seed(config.base_seed, cell.cell_index, run);
            std::string trace;
            if (config.trace_dir) {
                trace = "eval_idx,e_norm,params\n";
                opts.on_evaluation = [&trace](const EvaluationRecord& rec) {
                    trace += std::to_string(rec.index) + "," + fixed6(rec.e_norm);
                    char buf[32];
                    for (double p : rec.params) {
                        std::snprintf(buf, sizeof buf, ",%.9g", p);
                        trace += buf;
                    }
                    trace += '\n';
                };
            }
            cell.runs[static_cast<std::size_t>(run)] =
                run_strategy(cell.strategy, builtin_test_set(cell.set_id), opts);
            if (config.trace_dir) write_file(trace_path(*config.trace_dir, cell, run), trace);
            if (on_run_done) {
#pragma omp critical(qtis_progress)
                on_run_done(cell, run);
            }
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(job)] = "run " + std::to_string(run) + ": " + e.what();
        }
    }

    for (auto& cell : cells) {
        for (int run = 0; run < runs; ++run) {
            const std::string& err = errors[static_cast<std::size_t>(cell.cell_index * runs + run)];
            if (!err.empty() && !cell.error) cell.error = err;
        }
        if (cell.error) cell.runs.clear();
    }
    return cells;
}

std::string aggregate_csv(const std::vector<BatchResult>& batches) {
    std::string out = "set_id,strategy,zeta_mode,variant,L,runs,mean_e_norm,median_e_norm,min_e_norm,mean_wall_s\n";
    for (const auto& b : batches) {
        if (!b.ok()) continue;
        out += std::to_string(b.set_id) + "," + to_string(b.strategy) + "," + to_string(b.zeta_mode) + "," +
               to_string(b.variant) + "," + std::to_string(b.depth) + "," + std::to_string(b.runs.size()) + "," +
               fixed6(b.mean_e_norm()) + "," + fixed6(b.median_e_norm()) + "," + fixed6(b.min_e_norm()) + "," +
               fixed6(b.mean_wall_s()) + "\n";
    }
    return out;
}

std::string detail_csv(const std::vector<BatchResult>& batches) {
    std::string out =
        "set_id,strategy,zeta_mode,variant,L,run_idx,seed,e_norm,raw_energy,evaluations,modal_bitstring,wall_s\n";
    for (const auto& b : batches) {
        for (std::size_t r = 0; r < b.runs.size(); ++r) {
            const RunResult& run = b.runs[r];
            out += std::to_string(b.set_id) + "," + to_string(b.strategy) + "," + to_string(b.zeta_mode) + "," +
                   to_string(b.variant) + "," + std::to_string(b.depth) + "," + std::to_string(r) + "," +
                   std::to_string(run.seed) + "," + fixed6(run.e_norm) + "," + fixed6(run.raw_energy) + "," +
                   std::to_string(run.evaluations) + "," + run.modal.to_string() + "," + fixed6(run.wall_time_s) +
                   "\n";
        }
    }
    return out;
}

namespace {

json params_to_json(const ParameterVector& p) {
    return {{"mode", to_string(p.mode)}, {"gamma", p.gamma}, {"zeta", p.zeta}, {"beta", p.beta}};
}

ParameterVector params_from_json(const json& j) {
    ParameterVector p;
    p.mode = parse_zeta_mode(j.at("mode").get<std::string>());
    p.gamma = j.at("gamma").get<std::vector<double>>();
    p.zeta = j.at("zeta").get<std::vector<double>>();
    p.beta = j.at("beta").get<std::vector<double>>();
    return p;
}

Assignment assignment_from_string(const std::string& s) {
    std::vector<std::uint8_t> bits(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[s.size() - 1 - i];
        if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring '" + s + "'");
        bits[i] = c == '1';
    }
    return Assignment(std::move(bits));
}

json run_to_json(const RunResult& r) {
    json stages = json::array();
    for (const auto& s : r.stages) {
        stages.push_back({{"depth", s.depth},
                          {"start", params_to_json(s.start)},
                          {"best", params_to_json(s.best)},
                          {"e_norm", s.e_norm},
                          {"evaluations", s.evaluations},
                          {"converged", s.converged}});
    }
    json j = {{"strategy", to_string(r.strategy)},
              {"seed", r.seed},
              {"best_params", params_to_json(r.best_params)},
              {"e_norm", r.e_norm},
              {"raw_energy", r.raw_energy},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"wall_time_s", r.wall_time_s},
              {"stages", stages},
              {"problem_distribution", r.problem_distribution},
              {"modal", r.modal.to_string()},
              {"modal_energy", r.modal_energy}};
    if (r.counts) {
        json counts = json::object();
        for (const auto& [key, c] : r.counts->counts) counts[std::to_string(key)] = c;
        j["counts"] = {{"n_qubits", r.counts->n_qubits},
                       {"shots", r.counts->shots},
                       {"seed", r.counts->seed},
                       {"counts", counts}};
    }
    return j;
}

RunResult run_from_json(const json& j) {
    RunResult r;
    r.strategy = parse_strategy(j.at("strategy").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.best_params = params_from_json(j.at("best_params"));
    r.e_norm = j.at("e_norm").get<double>();
    r.raw_energy = j.at("raw_energy").get<double>();
    r.evaluations = j.at("evaluations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& s : j.at("stages")) {
        r.stages.push_back({s.at("depth").get<int>(), params_from_json(s.at("start")),
                            params_from_json(s.at("best")), s.at("e_norm").get<double>(),
                            s.at("evaluations").get<int>(), s.at("converged").get<bool>()});
    }
    r.problem_distribution = j.at("problem_distribution").get<std::vector<double>>();
    r.modal = assignment_from_string(j.at("modal").get<std::string>());
    r.modal_energy = j.at("modal_energy").get<double>();
    if (j.contains("counts")) {
        const json& c = j.at("counts");
        sim::SampleCounts counts;
        counts.n_qubits = c.at("n_qubits").get<int>();
        counts.shots = c.at("shots").get<std::uint64_t>();
        counts.seed = c.at("seed").get<std::uint64_t>();
        for (const auto& [key, v] : c.at("counts").items()) counts.counts[std::stoull(key)] = v.get<std::uint64_t>();
        r.counts = std::move(counts);
    }
    return r;
}

}  // namespace

std::string results_json(const std::vector<BatchResult>& batches) {
    json cells = json::array();
    for (const auto& b : batches) {
        json runs = json::array();
        for (const auto& r : b.runs) runs.push_back(run_to_json(r));
        json cell = {{"cell_index", b.cell_index},
                     {"set_id", b.set_id},
                     {"strategy", to_string(b.strategy)},
                     {"zeta_mode", to_string(b.zeta_mode)},
                     {"variant", to_string(b.variant)},
                     {"L", b.depth},
                     {"runs", runs}};
        if (b.error) cell["error"] = *b.error;
        cells.push_back(std::move(cell));
    }
    return json{{"cells", cells}}.dump(1) + "\n";
}

std::vector<BatchResult> load_results_json(const std::string& text) {
    const json doc = json::parse(text);
    std::vector<BatchResult> out;
    for (const auto& c : doc.at("cells")) {
        BatchResult b;
        b.cell_index = c.at("cell_index").get<int>();
        b.set_id = c.at("set_id").get<int>();
        b.strategy = parse_strategy(c.at("strategy").get<std::string>());
        b.zeta_mode = parse_zeta_mode(c.at("zeta_mode").get<std::string>());
        b.variant = parse_variant(c.at("variant").get<std::string>());
        b.depth = c.at("L").get<int>();
        for (const auto& r : c.at("runs")) b.runs.push_back(run_from_json(r));
        if (c.contains("error")) b.error = c.at("error").get<std::string>();
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<std::string> export_results(const std::vector<BatchResult>& batches, ExportFormat format,
                                        const std::string& stem) {
    if (batches.empty()) throw std::invalid_argument("export_results: nothing to export");
    const auto parent = std::filesystem::path(stem).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::vector<std::string> written;
    if (format == ExportFormat::Csv) {
        written = {stem + ".csv", stem + "_runs.csv"};
        write_file(written[0], aggregate_csv(batches));
        write_file(written[1], detail_csv(batches));
    } else {
        written = {stem + ".json"};
        write_file(written[0], results_json(batches));
    }
    return written;
}

namespace {

// Reference values for the built-in sets, indexed by set id - 1.
constexpr std::array<double, kNumBuiltinSets> kReferenceEmax{29, 57, 43, 15, 29, 43};
constexpr double kReferenceEminIdeal = -3;
constexpr std::array<double, kNumBuiltinSets> kReferenceMinimum{-3, 4, -3, -3, -3, -3};
// c_01, c_02, c_12
constexpr std::array<std::array<bool, 3>, kNumBuiltinSets> kReferenceOverlaps{{
    {true, false, false},
    {true, true, true},
    {true, false, true},
    {false, false, false},
    {false, false, true},
    {true, true, false},
}};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string pattern(const std::vector<bool>& v) {
    std::string s;
    for (bool b : v) s += b ? '1' : '0';
    return s;
}

}  // namespace

std::vector<TableCheck> verify_tables() {
    std::vector<TableCheck> checks;
    for (int id = 1; id <= kNumBuiltinSets; ++id) {
        const auto idx = static_cast<std::size_t>(id - 1);
        const std::string tag = "set " + std::to_string(id) + " ";
        const SchedulingInstance inst = builtin_test_set(id);
        const OverlapMatrix c = overlap_matrix(inst);
        const EnergyBounds b = energy_bounds(inst, c);

        checks.push_back({tag + "e_max", b.e_max == kReferenceEmax[idx],
                          "got " + fmt(b.e_max) + ", expected " + fmt(kReferenceEmax[idx])});
        checks.push_back({tag + "e_min_ideal", b.e_min_ideal == kReferenceEminIdeal,
                          "got " + fmt(b.e_min_ideal) + ", expected " + fmt(kReferenceEminIdeal)});

        const std::vector<bool> expected(kReferenceOverlaps[idx].begin(), kReferenceOverlaps[idx].end());
        checks.push_back({tag + "overlaps", c.by_pair() == expected,
                          "got " + pattern(c.by_pair()) + ", expected " + pattern(expected)});

        const ConflictCircuit cc = classical_conflict_circuit(inst);
        const sim::StateVector psi = sim::run_circuit(cc.circuit, sim::StateVector(cc.circuit.num_qubits()));
        std::uint64_t want = 0;
        for (std::size_t r = 0; r < expected.size(); ++r) {
            if (expected[r]) want |= std::uint64_t{1} << cc.layout.ancilla_qubits()[r];
        }
        const double p = std::norm(psi[want]);
        checks.push_back({tag + "conflict ancillas", std::abs(p - 1.0) < 1e-10,
                          "P(" + pattern(expected) + ") = " + fmt(p)});

        const BruteForceResult bf = brute_force_minimum(build_qubo(inst, c));
        const bool feasible = bf.energy == b.e_min_ideal;
        checks.push_back({tag + "brute-force minimum", bf.energy == kReferenceMinimum[idx],
                          "got " + fmt(bf.energy) + " at " + bf.assignment.to_string() + ", expected " +
                              fmt(kReferenceMinimum[idx]) + (feasible ? " (feasible)" : " (infeasible set)")});
    }
    return checks;
}

}  // namespace qtis
