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

#include "qtis/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qtis {

using sim::Gate;

const char* to_string(ConflictVariant v) noexcept {
    return v == ConflictVariant::Classical ? "classical" : "quantum";
}

const char* to_string(ZetaMode m) noexcept {
    return m == ZetaMode::Shared ? "shared" : "independent";
}

ConflictVariant parse_variant(const std::string& s) {
    if (s == "classical") return ConflictVariant::Classical;
    if (s == "quantum") return ConflictVariant::Quantum;
    throw std::invalid_argument("unknown conflict variant '" + s + "' (classical|quantum)");
}

ZetaMode parse_zeta_mode(const std::string& s) {
    if (s == "shared") return ZetaMode::Shared;
    if (s == "independent") return ZetaMode::Independent;
    throw std::invalid_argument("unknown zeta mode '" + s + "' (shared|independent)");
}

double ParameterVector::zeta_at(int layer) const {
    const auto l = static_cast<std::size_t>(layer);
    return mode == ZetaMode::Shared ? gamma.at(l) : zeta.at(l);
}

void ParameterVector::validate(int depth) const {
    const auto d = static_cast<std::size_t>(depth);
    const std::size_t zeta_len = mode == ZetaMode::Shared ? 0 : d;
    if (gamma.size() != d || beta.size() != d || zeta.size() != zeta_len) {
        throw std::invalid_argument("ParameterVector: expected " + std::to_string(depth) +
                                    " layers in " + to_string(mode) + " mode, got gamma=" +
                                    std::to_string(gamma.size()) + " zeta=" +
                                    std::to_string(zeta.size()) + " beta=" +
                                    std::to_string(beta.size()));
    }
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
    };
    if (!finite(gamma) || !finite(zeta) || !finite(beta)) {
        throw std::invalid_argument("ParameterVector: angles must be finite");
    }
}

std::vector<double> ParameterVector::flatten() const {
    std::vector<double> out;
    out.reserve(gamma.size() + zeta.size() + beta.size());
    out.insert(out.end(), gamma.begin(), gamma.end());
    if (mode == ZetaMode::Independent) out.insert(out.end(), zeta.begin(), zeta.end());
    out.insert(out.end(), beta.begin(), beta.end());
    return out;
}

std::size_t ParameterVector::size_for(int depth, ZetaMode mode) noexcept {
    return static_cast<std::size_t>(depth) * (mode == ZetaMode::Shared ? 2 : 3);
}

ParameterVector ParameterVector::unflatten(std::span<const double> flat, int depth, ZetaMode mode) {
    if (depth < 1 || flat.size() != size_for(depth, mode)) {
        throw std::invalid_argument("ParameterVector::unflatten: expected " +
                                    std::to_string(size_for(depth, mode)) + " angles, got " +
                                    std::to_string(flat.size()));
    }
    const auto d = static_cast<std::size_t>(depth);
    ParameterVector p;
    p.mode = mode;
    auto it = flat.begin();
    p.gamma.assign(it, it + static_cast<std::ptrdiff_t>(d));
    it += static_cast<std::ptrdiff_t>(d);
    if (mode == ZetaMode::Independent) {
        p.zeta.assign(it, it + static_cast<std::ptrdiff_t>(d));
        it += static_cast<std::ptrdiff_t>(d);
    }
    p.beta.assign(it, it + static_cast<std::ptrdiff_t>(d));
    return p;
}

int AncillaLayout::ancilla(int i, int k) const {
    if (i > k) std::swap(i, k);
    if (i < 0 || k >= n_tasks || i == k) throw std::out_of_range("AncillaLayout: invalid pair");
    return first_ancilla + pair_rank(i, k, n_tasks);
}

int AncillaLayout::task_qubit(int t) const {
    if (first_task_qubit < 0) throw std::logic_error("AncillaLayout: layout has no task qubits");
    if (t < 0 || t >= n_tasks) throw std::out_of_range("AncillaLayout: invalid task");
    return first_task_qubit + t;
}

std::vector<int> AncillaLayout::ancilla_qubits() const {
    std::vector<int> out(static_cast<std::size_t>(num_ancillas()));
    std::iota(out.begin(), out.end(), first_ancilla);
    return out;
}

std::vector<int> AncillaLayout::task_qubits() const {
    std::vector<int> out(static_cast<std::size_t>(num_task_qubits()));
    std::iota(out.begin(), out.end(), first_task_qubit);
    return out;
}

std::vector<TaskInterval> scale_times(const SchedulingInstance& instance) {
    double lo = instance.task(0).start;
    double hi = lo;
    for (const auto& t : instance.tasks()) {
        lo = std::min({lo, t.start, t.end});
        hi = std::max({hi, t.start, t.end});
    }
    if (!(hi > lo)) throw std::invalid_argument("scale_times: all time points coincide");
    const double factor = (std::numbers::pi / 2.0) / (hi - lo);
    std::vector<TaskInterval> out;
    out.reserve(instance.tasks().size());
    for (const auto& t : instance.tasks()) out.push_back({(t.start - lo) * factor, (t.end - lo) * factor});
    return out;
}

ConflictCircuit classical_conflict_circuit(const SchedulingInstance& instance) {
    const int n = instance.num_tasks();
    // Position of each task in start-time order, ties by original index.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return instance.task(a).start < instance.task(b).start; });
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;

    ConflictCircuit out{sim::Circuit(num_pairs(n)), AncillaLayout{n, 0, -1}};
    for (auto [i, k] : task_pairs(n)) {
        const bool i_first = rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(k)];
        const TaskInterval& earlier = instance.task(i_first ? i : k);
        const TaskInterval& later = instance.task(i_first ? k : i);
        const double sign = std::copysign(1.0, later.start - earlier.end);
        const int q = out.layout.ancilla(i, k);
        out.circuit.add(Gate::h(q));
        out.circuit.add(Gate::ry(q, -(std::numbers::pi / 2.0) * sign));
        out.circuit.measure(q);
    }
    return out;
}

std::vector<Gate> damselfly_gate(int qubit_i, int qubit_k, double scaled_end_i, double scaled_end_k,
                                 int ancilla) {
    return {Gate::ry(qubit_i, 2.0 * scaled_end_i), Gate::ry(qubit_k, 2.0 * scaled_end_k),
            Gate::ccnot(qubit_i, qubit_k, ancilla), Gate::ry(qubit_i, -2.0 * scaled_end_i),
            Gate::ry(qubit_k, -2.0 * scaled_end_k)};
}

ConflictCircuit quantum_conflict_circuit(const SchedulingInstance& instance) {
    const int n = instance.num_tasks();
    const std::vector<TaskInterval> scaled = scale_times(instance);
    const int n_anc = num_pairs(n);
    ConflictCircuit out{sim::Circuit(n_anc + n), AncillaLayout{n, 0, n_anc}};
    const AncillaLayout& layout = out.layout;

    for (int t = 0; t < n; ++t) {
        const int q = layout.task_qubit(t);
        out.circuit.add(Gate::h(q));
        out.circuit.add(Gate::ry(q, -2.0 * scaled[static_cast<std::size_t>(t)].start));
    }

    // holder[t] is the physical qubit currently carrying RY(-2 t_s^t).
    std::vector<int> holder(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) holder[static_cast<std::size_t>(t)] = layout.task_qubit(t);

    for (auto [i, k] : task_pairs(n)) {
        const int qi = holder[static_cast<std::size_t>(i)];
        const int qk = holder[static_cast<std::size_t>(k)];
        // After the swap qi carries -t_s^k and receives RY(2 t_e^i), and vice versa.
        out.circuit.add(Gate::swap(qi, qk));
        std::swap(holder[static_cast<std::size_t>(i)], holder[static_cast<std::size_t>(k)]);
        out.circuit.add(damselfly_gate(qi, qk, scaled[static_cast<std::size_t>(i)].end,
                                       scaled[static_cast<std::size_t>(k)].end, layout.ancilla(i, k)));
    }
    for (int q : layout.ancilla_qubits()) out.circuit.measure(q);
    return out;
}

std::vector<Gate> hp_layer(const IsingModel& hp, double gamma, std::span<const int> problem_qubits) {
    if (static_cast<int>(problem_qubits.size()) != hp.n_spins) {
        throw std::invalid_argument("hp_layer: problem qubit map does not match the model");
    }
    std::vector<Gate> gates;
    gates.reserve(hp.quadratic.size() + hp.linear.size());
    for (const auto& [uv, j] : hp.quadratic) {
        gates.push_back(Gate::rzz(problem_qubits[static_cast<std::size_t>(uv.first)],
                                  problem_qubits[static_cast<std::size_t>(uv.second)], 2.0 * gamma * j));
    }
    for (const auto& [v, h] : hp.linear) {
        gates.push_back(Gate::rz(problem_qubits[static_cast<std::size_t>(v)], 2.0 * gamma * h));
    }
    return gates;
}

std::vector<Gate> hc_layer(const HcTermSet& hc, double zeta, const AncillaLayout& layout,
                           std::span<const int> problem_qubits, const std::vector<bool>& skip_pairs) {
    if (layout.n_tasks != hc.n_tasks) throw std::invalid_argument("hc_layer: layout does not match terms");
    std::vector<Gate> gates;
    gates.reserve(hc.terms.size() * 3);
    for (const auto& t : hc.terms) {
        const auto rank = static_cast<std::size_t>(pair_rank(t.task_i, t.task_k, hc.n_tasks));
        if (!skip_pairs.empty() && skip_pairs[rank]) continue;
        const int anc = layout.ancilla(t.task_i, t.task_k);
        const int qi = problem_qubits[static_cast<std::size_t>(t.var_i)];
        const int qk = problem_qubits[static_cast<std::size_t>(t.var_k)];
        gates.push_back(Gate::crzz(anc, qi, qk, 2.0 * zeta * t.zz));
        gates.push_back(Gate::crz(anc, qi, 2.0 * zeta * t.z_i));
        gates.push_back(Gate::crz(anc, qk, 2.0 * zeta * t.z_k));
    }
    return gates;
}

std::vector<Gate> hb_layer(double beta, std::span<const int> problem_qubits) {
    std::vector<Gate> gates;
    gates.reserve(problem_qubits.size());
    for (int q : problem_qubits) gates.push_back(Gate::rx(q, 2.0 * beta));
    return gates;
}

AnsatzBuilder::AnsatzBuilder(const SchedulingInstance& instance, const AnsatzConfig& config)
    : config_(config) {
    if (config.depth < 1) throw std::invalid_argument("AnsatzConfig: depth must be at least 1");
    const int n_vars = instance.num_vars();
    const OverlapMatrix overlaps = overlap_matrix(instance);
    split_ = split_hamiltonian(instance, overlaps);

    const ConflictCircuit conflict = config.variant == ConflictVariant::Classical
                                         ? classical_conflict_circuit(instance)
                                         : quantum_conflict_circuit(instance);
    n_qubits_ = n_vars + conflict.circuit.num_qubits();
    layout_ = conflict.layout;
    layout_.first_ancilla += n_vars;
    if (layout_.first_task_qubit >= 0) layout_.first_task_qubit += n_vars;

    problem_qubits_.resize(static_cast<std::size_t>(n_vars));
    std::iota(problem_qubits_.begin(), problem_qubits_.end(), 0);

    if (config.prune && config.variant == ConflictVariant::Classical) {
        skip_pairs_.resize(overlaps.by_pair().size());
        for (std::size_t r = 0; r < skip_pairs_.size(); ++r) skip_pairs_[r] = !overlaps.by_pair()[r];
    }

    prefix_ = sim::Circuit(n_qubits_);
    prefix_.append(conflict.circuit, n_vars);
    for (int q : problem_qubits_) {
        prefix_.add(Gate::h(q));
        prefix_.measure(q);
    }
}

std::vector<Gate> AnsatzBuilder::layers(const ParameterVector& params) const {
    if (params.mode != config_.zeta_mode) {
        throw std::invalid_argument("build_ansatz: parameter vector is in " + std::string(to_string(params.mode)) +
                                    " mode, ansatz expects " + to_string(config_.zeta_mode));
    }
    params.validate(config_.depth);
    std::vector<Gate> gates;
    for (int l = 0; l < config_.depth; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        auto hp = hp_layer(split_.hp, params.gamma[ul], problem_qubits_);
        auto hc = hc_layer(split_.hc, params.zeta_at(l), layout_, problem_qubits_, skip_pairs_);
        auto hb = hb_layer(params.beta[ul], problem_qubits_);
        gates.insert(gates.end(), hp.begin(), hp.end());
        gates.insert(gates.end(), hc.begin(), hc.end());
        gates.insert(gates.end(), hb.begin(), hb.end());
    }
    return gates;
}

QtisCircuit AnsatzBuilder::build(const ParameterVector& params) const {
    QtisCircuit out{prefix_, layout_, problem_qubits_, layout_.ancilla_qubits(), layout_.task_qubits(),
                    prefix_.size()};
    out.circuit.add(layers(params));
    return out;
}

QtisCircuit build_ansatz(const SchedulingInstance& instance, const AnsatzConfig& config,
                         const ParameterVector& params) {
    return AnsatzBuilder(instance, config).build(params);
}

std::size_t ansatz_gate_count(int n_tasks, int n_resources, int depth, ConflictVariant variant) {
    const auto i = static_cast<std::size_t>(n_tasks);
    const auto j = static_cast<std::size_t>(n_resources);
    const auto pairs = static_cast<std::size_t>(num_pairs(n_tasks));
    const std::size_t vars = i * j;
    const std::size_t conflict = variant == ConflictVariant::Classical ? 2 * pairs : 2 * i + 6 * pairs;
    const std::size_t hp = vars + i * j * (j - 1) / 2;
    const std::size_t hc = 3 * pairs * j;
    const std::size_t hb = vars;
    return conflict + vars + static_cast<std::size_t>(depth) * (hp + hc + hb);
}

}  // namespace qtis
