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

#include "qtis/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qtis/kernels.hpp"

namespace qtis::sim {

const char* gate_name(GateKind kind) noexcept {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::RZZ: return "RZZ";
        case GateKind::SWAP: return "SWAP";
        case GateKind::CCNOT: return "CCNOT";
        case GateKind::CRZ: return "CRZ";
        case GateKind::CRZZ: return "CRZZ";
    }
    return "?";
}

Gate Gate::h(int q) { return {GateKind::H, {q, -1}, {-1, -1}, 0.0}; }
Gate Gate::rx(int q, double theta) { return {GateKind::RX, {q, -1}, {-1, -1}, theta}; }
Gate Gate::ry(int q, double theta) { return {GateKind::RY, {q, -1}, {-1, -1}, theta}; }
Gate Gate::rz(int q, double theta) { return {GateKind::RZ, {q, -1}, {-1, -1}, theta}; }
Gate Gate::rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, {-1, -1}, theta}; }
Gate Gate::swap(int a, int b) { return {GateKind::SWAP, {a, b}, {-1, -1}, 0.0}; }
Gate Gate::ccnot(int c0, int c1, int target) {
    return {GateKind::CCNOT, {target, -1}, {c0, c1}, 0.0};
}
Gate Gate::crz(int control, int q, double theta) {
    return {GateKind::CRZ, {q, -1}, {control, -1}, theta};
}
Gate Gate::crzz(int control, int a, int b, double theta) {
    return {GateKind::CRZZ, {a, b}, {control, -1}, theta};
}

int Gate::num_targets() const noexcept {
    switch (kind) {
        case GateKind::RZZ:
        case GateKind::SWAP:
        case GateKind::CRZZ: return 2;
        default: return 1;
    }
}

int Gate::num_controls() const noexcept {
    switch (kind) {
        case GateKind::CCNOT: return 2;
        case GateKind::CRZ:
        case GateKind::CRZZ: return 1;
        default: return 0;
    }
}

bool Gate::is_parametric() const noexcept {
    return kind != GateKind::H && kind != GateKind::SWAP && kind != GateKind::CCNOT;
}

bool Gate::is_diagonal() const noexcept {
    return kind == GateKind::RZ || kind == GateKind::RZZ || kind == GateKind::CRZ ||
           kind == GateKind::CRZZ;
}

Gate Gate::inverse() const {
    Gate g = *this;
    if (is_parametric()) g.theta = -theta;
    return g;
}

void Gate::validate(int n_qubits) const {
    std::vector<int> qs;
    for (int i = 0; i < num_targets(); ++i) qs.push_back(targets[static_cast<std::size_t>(i)]);
    for (int i = 0; i < num_controls(); ++i) qs.push_back(controls[static_cast<std::size_t>(i)]);
    for (int q : qs) {
        if (q < 0 || q >= n_qubits) {
            throw std::out_of_range(std::string(gate_name(kind)) + ": qubit index " +
                                    std::to_string(q) + " out of range for " +
                                    std::to_string(n_qubits) + " qubits");
        }
    }
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
        throw std::invalid_argument(std::string(gate_name(kind)) + ": qubit indices must be distinct");
    }
    if (!std::isfinite(theta)) {
        throw std::invalid_argument(std::string(gate_name(kind)) + ": angle must be finite");
    }
}

std::string Gate::to_string() const {
    std::ostringstream os;
    os << gate_name(kind) << ' ' << targets[0];
    if (num_targets() == 2) os << ',' << targets[1];
    if (num_controls() > 0) {
        os << " [" << controls[0];
        if (num_controls() == 2) os << ',' << controls[1];
        os << ']';
    }
    if (is_parametric()) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), " theta=%.17g", theta);
        os << buf;
    }
    return os.str();
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("Circuit: register size out of range");
    }
}

Circuit& Circuit::add(const Gate& g) {
    g.validate(n_qubits_);
    gates_.push_back(g);
    return *this;
}

Circuit& Circuit::add(std::span<const Gate> gates) {
    for (const auto& g : gates) add(g);
    return *this;
}

Circuit& Circuit::append(const Circuit& other, int offset) {
    for (Gate g : other.gates()) {
        for (int i = 0; i < g.num_targets(); ++i) g.targets[static_cast<std::size_t>(i)] += offset;
        for (int i = 0; i < g.num_controls(); ++i) g.controls[static_cast<std::size_t>(i)] += offset;
        add(g);
    }
    for (int q : other.measured()) measure(q + offset);
    return *this;
}

void Circuit::measure(int q) {
    if (q < 0 || q >= n_qubits_) throw std::out_of_range("Circuit: measured qubit out of range");
    if (std::find(measured_.begin(), measured_.end(), q) == measured_.end()) measured_.push_back(q);
}

std::string Circuit::dump() const {
    std::ostringstream os;
    os << "# qubits=" << n_qubits_ << " gates=" << gates_.size() << " measured=";
    for (std::size_t i = 0; i < measured_.size(); ++i) os << (i ? "," : "") << measured_[i];
    os << '\n';
    for (const auto& g : gates_) os << g.to_string() << '\n';
    return os.str();
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("StateVector: register size out of range");
    }
    amps_.assign(std::size_t{1} << n_qubits, amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) throw std::out_of_range("StateVector::basis: index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<amplitude> amps) {
    const std::size_t dim = amps.size();
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("StateVector: amplitude count must be a power of two");
    }
    StateVector s;
    s.n_qubits_ = std::countr_zero(dim);
    s.amps_ = std::move(amps);
    return s;
}

double StateVector::norm_squared() const noexcept {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](const amplitude& a) { return std::norm(a); });
    return p;
}

namespace {

struct KernelTable {
    decltype(&kernels::optimized::apply_1q) one_q;
    decltype(&kernels::optimized::apply_diag_1q) diag_1q;
    decltype(&kernels::optimized::apply_diag_zz) diag_zz;
    decltype(&kernels::optimized::apply_swap) swap;
    decltype(&kernels::optimized::apply_ccnot) ccnot;
};

constexpr KernelTable kOptimized{kernels::optimized::apply_1q, kernels::optimized::apply_diag_1q,
                                 kernels::optimized::apply_diag_zz, kernels::optimized::apply_swap,
                                 kernels::optimized::apply_ccnot};
constexpr KernelTable kReference{kernels::reference::apply_1q, kernels::reference::apply_diag_1q,
                                 kernels::reference::apply_diag_zz, kernels::reference::apply_swap,
                                 kernels::reference::apply_ccnot};

}  // namespace

void apply_gate(StateVector& state, const Gate& gate, Backend backend) {
    gate.validate(state.num_qubits());
    const KernelTable& k = backend == Backend::Optimized ? kOptimized : kReference;
    auto psi = state.amplitudes();
    const double c = std::cos(gate.theta / 2.0);
    const double s = std::sin(gate.theta / 2.0);
    const amplitude minus_phase{c, -s};  // e^{-i theta/2}
    const amplitude plus_phase{c, s};    // e^{+i theta/2}
    const auto& t = gate.targets;

    switch (gate.kind) {
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            k.one_q(psi, t[0], {r, r, r, -r});
            break;
        }
        case GateKind::RX:
            k.one_q(psi, t[0], {c, amplitude{0.0, -s}, amplitude{0.0, -s}, c});
            break;
        case GateKind::RY:
            k.one_q(psi, t[0], {c, -s, s, c});
            break;
        case GateKind::RZ:
            k.diag_1q(psi, t[0], 0, minus_phase, plus_phase);
            break;
        case GateKind::RZZ:
            k.diag_zz(psi, t[0], t[1], 0, minus_phase, plus_phase);
            break;
        case GateKind::SWAP:
            k.swap(psi, t[0], t[1]);
            break;
        case GateKind::CCNOT:
            k.ccnot(psi, gate.controls[0], gate.controls[1], t[0]);
            break;
        case GateKind::CRZ:
            k.diag_1q(psi, t[0], std::uint64_t{1} << gate.controls[0], minus_phase, plus_phase);
            break;
        case GateKind::CRZZ:
            k.diag_zz(psi, t[0], t[1], std::uint64_t{1} << gate.controls[0], minus_phase, plus_phase);
            break;
    }
}

void apply_gates(StateVector& state, std::span<const Gate> gates, Backend backend) {
    for (const auto& g : gates) apply_gate(state, g, backend);
}

StateVector run_circuit(const Circuit& circuit, StateVector initial, Backend backend) {
    if (initial.num_qubits() != circuit.num_qubits()) {
        throw std::invalid_argument("run_circuit: state has " + std::to_string(initial.num_qubits()) +
                                    " qubits, circuit has " + std::to_string(circuit.num_qubits()));
    }
    apply_gates(initial, circuit.gates(), backend);
    return initial;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    amplitude overlap{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) overlap += std::conj(a[i]) * b[i];
    return std::norm(overlap);
}

std::string SampleCounts::key_string(std::uint64_t key) const {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if ((key >> q) & 1U) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
    }
    return s;
}

std::uint64_t SampleCounts::modal() const {
    if (counts.empty()) throw std::logic_error("SampleCounts::modal: no samples");
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

SampleCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("sample: shots must be at least 1");
    std::vector<double> cdf = state.probabilities();
    std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
    const double total = cdf.back();

    std::mt19937_64 rng(seed);
    SampleCounts out;
    out.n_qubits = state.num_qubits();
    out.shots = shots;
    out.seed = seed;
    for (std::uint64_t s = 0; s < shots; ++s) {
        // 53-bit uniform in [0, total)
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        ++out.counts[static_cast<std::uint64_t>(it - cdf.begin())];
    }
    return out;
}

std::uint64_t extract_bits(std::uint64_t index, std::span<const int> qubits) noexcept {
    std::uint64_t out = 0;
    for (std::size_t v = 0; v < qubits.size(); ++v) {
        out |= ((index >> qubits[v]) & 1U) << v;
    }
    return out;
}

std::vector<double> marginal_probabilities(const StateVector& state, std::span<const int> qubits) {
    std::vector<double> out(std::size_t{1} << qubits.size(), 0.0);
    const auto amps = state.amplitudes();
    for (std::uint64_t z = 0; z < amps.size(); ++z) out[extract_bits(z, qubits)] += std::norm(amps[z]);
    return out;
}

double expectation_energy(const StateVector& state, const QuboModel& qubo,
                          std::span<const int> problem_qubits) {
    if (static_cast<int>(problem_qubits.size()) != qubo.n_vars) {
        throw std::invalid_argument("expectation_energy: " + std::to_string(problem_qubits.size()) +
                                    " problem qubits for a model with " +
                                    std::to_string(qubo.n_vars) + " variables");
    }
    const std::vector<double> marginal = marginal_probabilities(state, problem_qubits);
    double e = 0.0;
    for (std::uint64_t x = 0; x < marginal.size(); ++x) {
        if (marginal[x] != 0.0) e += marginal[x] * qubo.evaluate_bits(x);
    }
    return e;
}

ShotEstimate sampled_energy(const SampleCounts& counts, const QuboModel& qubo,
                            std::span<const int> problem_qubits) {
    if (static_cast<int>(problem_qubits.size()) != qubo.n_vars) {
        throw std::invalid_argument("sampled_energy: problem qubit count mismatch");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [key, n] : counts.counts) {
        const double e = qubo.evaluate_bits(extract_bits(key, problem_qubits));
        sum += e * static_cast<double>(n);
        sum_sq += e * e * static_cast<double>(n);
    }
    const auto shots = static_cast<double>(counts.shots);
    ShotEstimate est;
    est.mean = sum / shots;
    const double var = shots > 1 ? std::max(0.0, (sum_sq - shots * est.mean * est.mean) / (shots - 1)) : 0.0;
    est.standard_error = std::sqrt(var / shots);
    return est;
}

}  // namespace qtis::sim
