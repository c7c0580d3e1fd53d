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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtis/model.hpp"

namespace qtis {

/// Variable (and problem-qubit) index of x_ij. Task-major, so each task's
/// resource block is contiguous.
constexpr int var_index(int task, int resource, int n_resources) noexcept {
    return task * n_resources + resource;
}

/// Binary assignment x over the I*J variables. Bit q of `to_bits()` is x_q.
class Assignment {
  public:
    Assignment() = default;
    explicit Assignment(std::vector<std::uint8_t> bits);
    static Assignment from_bits(std::uint64_t bits, int n_vars);

    int size() const noexcept { return static_cast<int>(bits_.size()); }
    bool operator[](int q) const { return bits_.at(static_cast<std::size_t>(q)) != 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::uint64_t to_bits() const;

    /// Bitstring with variable 0 as the rightmost character.
    std::string to_string() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

using Coupling = std::pair<int, int>;

/// Quadratic polynomial over binary variables. Quadratic keys satisfy
/// first < second.
struct QuboModel {
    int n_vars = 0;
    std::map<int, double> linear;
    std::map<Coupling, double> quadratic;
    double constant = 0.0;

    void add_linear(int v, double c);
    void add_quadratic(int u, int v, double c);

    double evaluate(const Assignment& x) const;
    /// Same polynomial with x_q read from bit q.
    double evaluate_bits(std::uint64_t x) const;

    /// Values for every bitstring 0..2^n_vars-1.
    std::vector<double> energy_table() const;
};

/// Spin polynomial; spins are +1/-1 with s = 1 - 2x.
struct IsingModel {
    int n_spins = 0;
    std::map<int, double> linear;
    std::map<Coupling, double> quadratic;
    double constant = 0.0;

    double evaluate(std::span<const int> spins) const;
    double evaluate_bits(std::uint64_t x) const;
};

/// One (P/4)(1 - s_ij - s_kj + s_ij s_kj) conflict penalty, applied only when
/// tasks i and k overlap.
struct HcTerm {
    int task_i = 0;
    int task_k = 0;
    int resource = 0;
    int var_i = 0;  // x_ij
    int var_k = 0;  // x_kj
    double zz = 0.0;
    double z_i = 0.0;
    double z_k = 0.0;
    double constant = 0.0;

    double evaluate_spins(int s_i, int s_k) const noexcept {
        return constant + z_i * s_i + z_k * s_k + zz * s_i * s_k;
    }
};

/// Conflict family of the problem Hamiltonian, one term per (pair, resource)
/// ordered by pair rank then resource. Every pair is present; whether a term
/// is active is decided by the gate vector (the overlap coefficients or the
/// ancilla register).
struct HcTermSet {
    int n_tasks = 0;
    int n_resources = 0;
    double penalty = 0.0;
    std::vector<HcTerm> terms;

    /// Sum of the terms whose pair is gated on, at assignment bits x.
    double evaluate_bits(std::uint64_t x, const std::vector<bool>& pair_gates) const;
};

double penalty_factor(const SchedulingInstance& instance) noexcept;

/// -sum x_ij + sum_i P (sum_j x_ij - 1)^2 + sum_{i<k, j} P c_ik x_ij x_kj.
/// The conflict square is dropped since the product is already binary.
QuboModel build_qubo(const SchedulingInstance& instance, const OverlapMatrix& overlaps);

/// Objective plus the once-per-task assignment penalty (no conflict family).
QuboModel build_assignment_qubo(const SchedulingInstance& instance);

double evaluate_qubo(const QuboModel& qubo, const Assignment& x);

/// Exact substitution x = (1 - s)/2, offset kept in `constant`.
IsingModel qubo_to_ising(const QuboModel& qubo);

struct SplitHamiltonian {
    IsingModel hp;
    HcTermSet hc;
};

/// H_P = H_p + H_c. `overlaps` is only used for consistency checks; the term
/// set always covers every pair.
SplitHamiltonian split_hamiltonian(const SchedulingInstance& instance, const OverlapMatrix& overlaps);

struct EnergyBounds {
    double e_min_ideal = 0.0;  // -I, every task scheduled with no penalty
    double e_max = 0.0;        // QUBO at the all-ones assignment
};

EnergyBounds energy_bounds(const SchedulingInstance& instance, const OverlapMatrix& overlaps);

/// (E - e_min_ideal) / (e_max - e_min_ideal).
double normalize_energy(double energy, const EnergyBounds& bounds) noexcept;

struct BruteForceResult {
    Assignment assignment;
    double energy = 0.0;
};

inline constexpr int kMaxBruteForceVars = 24;

/// Global minimum over all 2^n assignments, ties to the lowest bitstring.
/// Parallel over the bitstring space; the serial variant is the reference.
BruteForceResult brute_force_minimum(const QuboModel& qubo);
BruteForceResult brute_force_minimum_serial(const QuboModel& qubo);

/// One term per line with 17 significant digits:
///   const <c> / lin <v> <c> / quad <u> <v> <c>
std::string dump_qubo(const QuboModel& qubo);
std::string dump_ising(const IsingModel& ising);

}  // namespace qtis
