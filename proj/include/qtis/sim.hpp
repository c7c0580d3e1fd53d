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

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtis/qubo.hpp"

namespace qtis::sim {

using amplitude = std::complex<double>;

/// Largest register the dense simulator accepts.
inline constexpr int kMaxQubits = 28;

enum class GateKind { H, RX, RY, RZ, RZZ, SWAP, CCNOT, CRZ, CRZZ };

const char* gate_name(GateKind kind) noexcept;

/// Conventions (qubit 0 is the least significant bit of a basis index):
///   RX(t) = exp(-i t X / 2), RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]],
///   RZ(t) = diag(e^{-it/2}, e^{+it/2}), RZZ(t) = e^{-it/2} on even parity,
///   e^{+it/2} on odd parity. CRZ/CRZZ apply RZ/RZZ when the control is |1>.
struct Gate {
    GateKind kind = GateKind::H;
    std::array<int, 2> targets{-1, -1};
    std::array<int, 2> controls{-1, -1};
    double theta = 0.0;

    static Gate h(int q);
    static Gate rx(int q, double theta);
    static Gate ry(int q, double theta);
    static Gate rz(int q, double theta);
    static Gate rzz(int a, int b, double theta);
    static Gate swap(int a, int b);
    static Gate ccnot(int c0, int c1, int target);
    static Gate crz(int control, int q, double theta);
    static Gate crzz(int control, int a, int b, double theta);

    int num_targets() const noexcept;
    int num_controls() const noexcept;
    bool is_parametric() const noexcept;
    bool is_diagonal() const noexcept;

    /// Negated angle, or the gate itself for H/SWAP/CCNOT.
    Gate inverse() const;

    /// Indices distinct, non-negative, below n_qubits; angle finite.
    void validate(int n_qubits) const;

    /// `NAME t0[,t1] [c0[,c1]] theta=<%.17g>`; the control list is printed in
    /// literal brackets and theta only for rotations.
    std::string to_string() const;

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Ordered gate list over a fixed register.
class Circuit {
  public:
    explicit Circuit(int n_qubits = 0);

    int num_qubits() const noexcept { return n_qubits_; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }
    const std::vector<int>& measured() const noexcept { return measured_; }
    std::size_t size() const noexcept { return gates_.size(); }

    Circuit& add(const Gate& g);
    Circuit& add(std::span<const Gate> gates);
    /// Appends `other` with every qubit index shifted by `offset`.
    Circuit& append(const Circuit& other, int offset = 0);
    void measure(int q);

    std::string dump() const;

  private:
    int n_qubits_;
    std::vector<Gate> gates_;
    std::vector<int> measured_;
};

class StateVector {
  public:
    StateVector() = default;
    /// |0...0>
    explicit StateVector(int n_qubits);
    static StateVector basis(int n_qubits, std::uint64_t index);
    static StateVector from_amplitudes(std::vector<amplitude> amps);

    int num_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<amplitude> amplitudes() noexcept { return amps_; }
    std::span<const amplitude> amplitudes() const noexcept { return amps_; }
    amplitude operator[](std::uint64_t i) const { return amps_[i]; }

    double norm_squared() const noexcept;
    std::vector<double> probabilities() const;

  private:
    int n_qubits_ = 0;
    std::vector<amplitude> amps_;
};

/// Optimized kernels (OpenMP above a size threshold) or the naive
/// per-basis-state reference kept for cross-checking.
enum class Backend { Optimized, Reference };

void apply_gate(StateVector& state, const Gate& gate, Backend backend = Backend::Optimized);
void apply_gates(StateVector& state, std::span<const Gate> gates,
                 Backend backend = Backend::Optimized);
StateVector run_circuit(const Circuit& circuit, StateVector initial,
                        Backend backend = Backend::Optimized);

/// |<a|b>|^2
double fidelity(const StateVector& a, const StateVector& b);

/// Outcome histogram over all qubits of the register.
struct SampleCounts {
    int n_qubits = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::map<std::uint64_t, std::uint64_t> counts;

    /// Key rendered with qubit 0 as the rightmost character.
    std::string key_string(std::uint64_t key) const;
    std::uint64_t modal() const;
};

/// Multinomial draw from |a|^2, reproducible per seed.
SampleCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

/// Packs bits `qubits[0], qubits[1], ...` of a register index into a
/// compact index (qubits[v] becomes bit v).
std::uint64_t extract_bits(std::uint64_t index, std::span<const int> qubits) noexcept;

/// Probability of each compact outcome over `qubits`.
std::vector<double> marginal_probabilities(const StateVector& state, std::span<const int> qubits);

/// sum_z |<z|psi>|^2 QUBO(z restricted to problem_qubits).
double expectation_energy(const StateVector& state, const QuboModel& qubo,
                          std::span<const int> problem_qubits);

struct ShotEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Mean QUBO energy over sampled shots, with its standard error.
ShotEstimate sampled_energy(const SampleCounts& counts, const QuboModel& qubo,
                            std::span<const int> problem_qubits);

}  // namespace qtis::sim
