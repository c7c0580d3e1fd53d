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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qtis/circuits.hpp"
#include "qtis/model.hpp"
#include "qtis/optimize.hpp"
#include "qtis/qubo.hpp"

namespace qtis {

struct ResourceConflict {
    int task_i = 0;
    int task_k = 0;
    int resource = 0;
    friend bool operator==(const ResourceConflict&, const ResourceConflict&) = default;
};

/// Decoded assignment. Task and resource indices are 0-based; to_string
/// prints 1-based labels.
struct Schedule {
    std::vector<std::vector<int>> resources;  // per task, resources it was placed on
    std::vector<ResourceConflict> conflicts;  // overlapping tasks sharing a resource
    std::vector<int> unassigned;
    std::vector<int> multiply_assigned;

    /// Every task on exactly one resource and no conflicts.
    bool valid() const noexcept {
        return conflicts.empty() && unassigned.empty() && multiply_assigned.empty();
    }
    std::string to_string() const;
};

Schedule decode_solution(const Assignment& bits, const SchedulingInstance& instance);

struct ExperimentConfig {
    std::vector<int> sets{1, 2, 3, 4, 5, 6};
    std::vector<Strategy> strategies{Strategy::Standard, Strategy::TQaoa, Strategy::HtQaoa};
    std::vector<ZetaMode> zeta_modes{ZetaMode::Independent, ZetaMode::Shared};
    ConflictVariant variant = ConflictVariant::Classical;
    int depth = 10;
    int runs = 10;
    Estimator estimator = Estimator::Exact;
    std::uint64_t shots = 100000;
    std::uint64_t base_seed = 2024;
    bool score_from_ancilla = false;
    bool prune = false;
    OptimizerOptions optimizer;
    /// Worker threads for the job pool; 0 uses the OpenMP default.
    int workers = 0;
    /// When set, one evaluation log per run is written into this directory.
    std::optional<std::string> trace_dir;

    void validate() const;
};

/// One (set, strategy, zeta mode) cell of the grid.
struct BatchResult {
    int cell_index = 0;
    int set_id = 0;
    Strategy strategy = Strategy::Standard;
    ZetaMode zeta_mode = ZetaMode::Independent;
    ConflictVariant variant = ConflictVariant::Classical;
    int depth = 0;
    std::vector<RunResult> runs;  // ordered by run index
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
    double mean_e_norm() const;
    double median_e_norm() const;
    double min_e_norm() const;
    double mean_wall_s() const;
};

/// base_seed ^ (cell_index * 0x9E3779B97F4A7C15) ^ run_index
std::uint64_t derive_run_seed(std::uint64_t base_seed, int cell_index, int run_index) noexcept;

/// Cells in (set, strategy, zeta mode) order; runs execute on a bounded
/// worker pool. A failing run marks its cell failed, other cells proceed.
std::vector<BatchResult> run_batch(const ExperimentConfig& config,
                                   const std::function<void(const BatchResult&, int run)>& on_run_done = {});

enum class ExportFormat { Csv, Json };

/// CSV writes `<stem>.csv` (one row per completed cell) and
/// `<stem>_runs.csv` (one row per run); JSON writes `<stem>.json`.
/// Returns the paths written.
std::vector<std::string> export_results(const std::vector<BatchResult>& batches, ExportFormat format,
                                        const std::string& stem);

std::string aggregate_csv(const std::vector<BatchResult>& batches);
std::string detail_csv(const std::vector<BatchResult>& batches);
std::string results_json(const std::vector<BatchResult>& batches);
std::vector<BatchResult> load_results_json(const std::string& text);

struct TableCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Energy bounds, overlap patterns, classical conflict ancillas and
/// brute-force minima of the built-in sets against their reference values.
std::vector<TableCheck> verify_tables();

}  // namespace qtis
