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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qtis/circuits.hpp"
#include "qtis/model.hpp"
#include "qtis/qubo.hpp"
#include "qtis/sim.hpp"

namespace qtis {

struct OptimizerOptions {
    int max_evaluations = 2000;
    double initial_step = 0.3;   // rhobeg
    double final_step = 1e-3;    // rhoend
    void validate() const;
};

struct CobylaResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
    /// False when the budget ran out or the simplex degenerated before the
    /// trust radius reached final_step.
    bool converged = false;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Powell's COBYLA specialised to no constraints: linear interpolation on a
/// simplex of n+1 points, steepest-descent step to the trust-region boundary,
/// geometry repair, radius halving down to final_step. Returns the best point
/// ever evaluated, so f <= f(x0).
CobylaResult cobyla_minimize(const ScalarFunction& f, std::vector<double> x0,
                             const OptimizerOptions& options);

/// Every angle i.i.d. uniform on [0, pi], drawn gamma block, zeta block,
/// beta block.
ParameterVector init_random_params(int depth, ZetaMode mode, std::mt19937_64& rng);

enum class Estimator { Exact, Sampled };
const char* to_string(Estimator e) noexcept;
Estimator parse_estimator(const std::string& s);

struct ObjectiveConfig {
    AnsatzConfig ansatz;
    Estimator estimator = Estimator::Exact;
    std::uint64_t shots = 100000;
    /// Gate the conflict penalties on the measured ancilla bits instead of
    /// the classical overlap matrix.
    bool score_from_ancilla = false;
};

/// Normalized-energy objective over a fixed instance and ansatz shape. The
/// parameter-independent prefix state and per-basis-state energies are
/// computed once. Not thread safe in sampled mode (evaluation counter).
class Objective {
  public:
    Objective(const SchedulingInstance& instance, const ObjectiveConfig& config,
              std::uint64_t sample_seed = 0);

    const ObjectiveConfig& config() const noexcept { return config_; }
    const AnsatzBuilder& builder() const noexcept { return builder_; }
    const EnergyBounds& bounds() const noexcept { return bounds_; }
    const QuboModel& qubo() const noexcept { return qubo_; }
    std::size_t size() const noexcept { return ParameterVector::size_for(config_.ansatz.depth, config_.ansatz.zeta_mode); }

    /// Energy of each full-register basis state.
    const std::vector<double>& register_energies() const noexcept { return energies_; }

    sim::StateVector final_state(const ParameterVector& params) const;

    /// Exact expectation of the energy in `state`.
    double exact_energy(const sim::StateVector& state) const;
    sim::ShotEstimate shot_energy(const sim::SampleCounts& counts) const;

    /// Raw energy with the configured estimator; sampled mode draws with the
    /// next per-evaluation seed.
    double raw_energy(const ParameterVector& params);
    double operator()(const ParameterVector& params) { return normalize_energy(raw_energy(params), bounds_); }
    double operator()(std::span<const double> flat);

    std::uint64_t evaluations() const noexcept { return counter_; }

  private:
    ObjectiveConfig config_;
    AnsatzBuilder builder_;
    QuboModel qubo_;
    EnergyBounds bounds_;
    sim::StateVector prefix_state_;
    std::vector<double> energies_;
    std::uint64_t sample_seed_;
    std::uint64_t counter_ = 0;
};

enum class Strategy { Standard, TQaoa, HtQaoa };
const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(const std::string& s);

/// One minimization inside a strategy.
struct StageRecord {
    int depth = 0;
    ParameterVector start;
    ParameterVector best;
    double e_norm = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct EvaluationRecord {
    int stage = 0;
    int index = 0;  // 1-based within the run
    double e_norm = 0.0;
    std::span<const double> params;
};

struct RunOptions {
    ObjectiveConfig objective;
    OptimizerOptions optimizer;
    std::uint64_t seed = 0;
    std::function<void(const EvaluationRecord&)> on_evaluation;
};

struct RunResult {
    Strategy strategy = Strategy::Standard;
    std::uint64_t seed = 0;
    ParameterVector best_params;
    double e_norm = 0.0;
    double raw_energy = 0.0;
    int evaluations = 0;
    bool converged = false;
    double wall_time_s = 0.0;
    std::vector<StageRecord> stages;

    /// Final distribution over the problem register (exact), and the shots
    /// drawn from the full measured register in sampled mode.
    std::vector<double> problem_distribution;
    std::optional<sim::SampleCounts> counts;
    Assignment modal;
    double modal_energy = 0.0;
};

RunResult strategy_standard(const SchedulingInstance& instance, const RunOptions& options);
/// Depths 1..L; each new layer starts from the previous layer's gamma/zeta
/// and beta = 0, earlier layers copied from the previous optimum.
RunResult strategy_tqaoa(const SchedulingInstance& instance, const RunOptions& options);
/// Depth-1 optimum a_1, then the full depth from
/// a_l = a_1 + (l-1)/(L-1) (end - a_1), end = pi for gamma/zeta, 0 for beta.
RunResult strategy_htqaoa(const SchedulingInstance& instance, const RunOptions& options);
RunResult run_strategy(Strategy strategy, const SchedulingInstance& instance, const RunOptions& options);

/// Warm start for depth l+1 from a depth-l optimum.
ParameterVector tqaoa_extend(const ParameterVector& previous);
/// Depth-L start from a depth-1 optimum.
ParameterVector htqaoa_interpolate(const ParameterVector& first_layer, int depth);

}  // namespace qtis
