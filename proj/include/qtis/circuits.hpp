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

#include <span>
#include <string>
#include <vector>

#include "qtis/model.hpp"
#include "qtis/qubo.hpp"
#include "qtis/sim.hpp"

namespace qtis {

/// How the overlap ancillas are prepared: from classically precomputed
/// interval comparisons, or by the rotation/Toffoli swap network.
enum class ConflictVariant { Classical, Quantum };

/// Whether the conflict layer reuses the objective angle (gamma = zeta) or
/// has its own.
enum class ZetaMode { Shared, Independent };

const char* to_string(ConflictVariant v) noexcept;
const char* to_string(ZetaMode m) noexcept;
ConflictVariant parse_variant(const std::string& s);
ZetaMode parse_zeta_mode(const std::string& s);

/// Per-layer angles. In shared mode `zeta` is empty and gamma is reused.
struct ParameterVector {
    ZetaMode mode = ZetaMode::Independent;
    std::vector<double> gamma;
    std::vector<double> zeta;
    std::vector<double> beta;

    int depth() const noexcept { return static_cast<int>(gamma.size()); }
    double zeta_at(int layer) const;

    /// Throws if the arrays disagree with `depth` / `mode` or hold non-finite
    /// angles.
    void validate(int depth) const;

    /// [gamma..., zeta... (independent only), beta...]
    std::vector<double> flatten() const;
    static ParameterVector unflatten(std::span<const double> flat, int depth, ZetaMode mode);
    static std::size_t size_for(int depth, ZetaMode mode) noexcept;

    friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

/// Qubit assignment of the overlap ancillas (one per task pair, lexicographic)
/// and, for the quantum variant, the task qubits.
struct AncillaLayout {
    int n_tasks = 0;
    int first_ancilla = 0;
    int first_task_qubit = -1;  // -1 when there are no task qubits

    int num_ancillas() const noexcept { return num_pairs(n_tasks); }
    int num_task_qubits() const noexcept { return first_task_qubit < 0 ? 0 : n_tasks; }
    int ancilla(int i, int k) const;
    int task_qubit(int t) const;
    std::vector<int> ancilla_qubits() const;
    std::vector<int> task_qubits() const;
};

struct ConflictCircuit {
    sim::Circuit circuit;
    AncillaLayout layout;
};

/// Affine map of every start/end onto [0, pi/2] (global min -> 0, max -> pi/2).
std::vector<TaskInterval> scale_times(const SchedulingInstance& instance);

/// Ancillas 0..A-1. Each pair (i, k), with k the later-starting task after a
/// stable sort by start, gets H then RY(-(pi/2) sign(t_s^k - t_e^i)), leaving
/// the ancilla in |1> exactly when the tasks overlap.
ConflictCircuit classical_conflict_circuit(const SchedulingInstance& instance);

/// Ancillas 0..A-1, task qubits A..A+N-1.
ConflictCircuit quantum_conflict_circuit(const SchedulingInstance& instance);

/// RY(2 t_e^i) on qubit_i, RY(2 t_e^k) on qubit_k, CCNOT onto the ancilla,
/// then the inverse rotations.
std::vector<sim::Gate> damselfly_gate(int qubit_i, int qubit_k, double scaled_end_i,
                                      double scaled_end_k, int ancilla);

/// exp(-i gamma H_p) without the constant: RZZ(2 gamma J_nm), RZ(2 gamma J_nn).
std::vector<sim::Gate> hp_layer(const IsingModel& hp, double gamma, std::span<const int> problem_qubits);

/// exp(-i zeta H_c) with every term controlled by its pair's ancilla:
/// CRZZ(2 zeta P/4) on (x_ij, x_kj), CRZ(-2 zeta P/4) on each. Constants are
/// a global phase per ancilla branch and are not emitted. Pairs whose
/// `skip_pairs` entry is set get no gates.
std::vector<sim::Gate> hc_layer(const HcTermSet& hc, double zeta, const AncillaLayout& layout,
                                std::span<const int> problem_qubits,
                                const std::vector<bool>& skip_pairs = {});

/// RX(2 beta) on every problem qubit.
std::vector<sim::Gate> hb_layer(double beta, std::span<const int> problem_qubits);

struct AnsatzConfig {
    int depth = 1;
    ZetaMode zeta_mode = ZetaMode::Independent;
    ConflictVariant variant = ConflictVariant::Classical;
    /// Classical variant only: omit controlled gates for pairs known not to
    /// overlap. Ancillas are kept.
    bool prune = false;
};

/// Register layout: problem qubits 0..I*J-1 (task-major), ancillas next,
/// quantum-variant task qubits last.
struct QtisCircuit {
    sim::Circuit circuit;
    AncillaLayout layout;
    std::vector<int> problem_qubits;
    std::vector<int> ancilla_qubits;
    std::vector<int> task_qubits;
    std::size_t prefix_gates = 0;  // conflict circuit + Hadamards
};

/// Precomputes everything parameter-independent so repeated ansatz builds
/// only emit the variational layers.
class AnsatzBuilder {
  public:
    AnsatzBuilder(const SchedulingInstance& instance, const AnsatzConfig& config);

    const AnsatzConfig& config() const noexcept { return config_; }
    int num_qubits() const noexcept { return n_qubits_; }
    const AncillaLayout& layout() const noexcept { return layout_; }
    const std::vector<int>& problem_qubits() const noexcept { return problem_qubits_; }
    const SplitHamiltonian& hamiltonian() const noexcept { return split_; }

    /// Conflict circuit on the ancilla register and H on every problem qubit.
    const sim::Circuit& prefix() const noexcept { return prefix_; }

    /// L x [hp(gamma_l); hc(zeta_l); hb(beta_l)]
    std::vector<sim::Gate> layers(const ParameterVector& params) const;

    QtisCircuit build(const ParameterVector& params) const;

  private:
    AnsatzConfig config_;
    int n_qubits_ = 0;
    AncillaLayout layout_;
    std::vector<int> problem_qubits_;
    SplitHamiltonian split_;
    std::vector<bool> skip_pairs_;
    sim::Circuit prefix_;
};

QtisCircuit build_ansatz(const SchedulingInstance& instance, const AnsatzConfig& config,
                         const ParameterVector& params);

/// Closed-form gate count of build_ansatz for I tasks, J resources, depth L
/// (unpruned).
std::size_t ansatz_gate_count(int n_tasks, int n_resources, int depth, ConflictVariant variant);

}  // namespace qtis
