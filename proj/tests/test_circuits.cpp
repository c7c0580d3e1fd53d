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


#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "qtis/circuits.hpp"

using namespace qtis;
using sim::Circuit;
using sim::Gate;
using sim::GateKind;
using sim::StateVector;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> iota_vec(int n, int from = 0) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = from + i;
    return v;
}

std::uint64_t overlap_key(const OverlapMatrix& c, const AncillaLayout& layout) {
    std::uint64_t key = 0;
    for (auto [i, k] : task_pairs(c.num_tasks())) {
        if (c.overlaps(i, k)) key |= std::uint64_t{1} << layout.ancilla(i, k);
    }
    return key;
}

// Ancilla-marginal probability of reading 1 on `qubit`.
double prob_one(const StateVector& s, int qubit) {
    double p = 0;
    for (std::size_t z = 0; z < s.dim(); ++z)
        if ((z >> qubit) & 1U) p += std::norm(s[z]);
    return p;
}

}  // namespace

TEST_CASE("parameter vectors flatten in gamma, zeta, beta order") {
    ParameterVector p{ZetaMode::Independent, {1, 2}, {3, 4}, {5, 6}};
    CHECK(p.flatten() == std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(ParameterVector::unflatten(p.flatten(), 2, ZetaMode::Independent) == p);
    ParameterVector s{ZetaMode::Shared, {1, 2}, {}, {5, 6}};
    CHECK(s.flatten() == std::vector<double>{1, 2, 5, 6});
    CHECK(s.zeta_at(1) == 2);
    CHECK(ParameterVector::size_for(10, ZetaMode::Independent) == 30);
    CHECK(ParameterVector::size_for(10, ZetaMode::Shared) == 20);
    CHECK_THROWS(ParameterVector::unflatten(std::vector<double>(5), 2, ZetaMode::Independent));
    CHECK_THROWS(p.validate(3));
    CHECK_THROWS((ParameterVector{ZetaMode::Shared, {1}, {2}, {3}}).validate(1));
    CHECK_THROWS((ParameterVector{ZetaMode::Shared, {NAN}, {}, {3}}).validate(1));
}

TEST_CASE("scale_times maps the time span onto [0, pi/2]") {
    const auto s = scale_times(builtin_test_set(1));
    CHECK(s[0].start == doctest::Approx(0.0));
    CHECK(s[0].end == doctest::Approx(0.2 * kPi));
    CHECK(s[2].end == doctest::Approx(kPi / 2));
    CHECK(s[1].start == doctest::Approx(0.05 * kPi));

    const SchedulingInstance unit({{0, 0.3}, {0.2, kPi / 2}}, 1);
    const auto u = scale_times(unit);
    for (int i = 0; i < 2; ++i) {
        CHECK(u[static_cast<std::size_t>(i)].start == doctest::Approx(unit.task(i).start));
        CHECK(u[static_cast<std::size_t>(i)].end == doctest::Approx(unit.task(i).end));
    }
}

TEST_CASE("scale_times preserves overlap structure") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const auto inst = oracle::random_instance(rng, 2 + t % 5, 1);
        const auto scaled = scale_times(inst);
        const SchedulingInstance moved(scaled, 1);
        CHECK(overlap_matrix(moved) == overlap_matrix(inst));
    }
}

TEST_CASE("classical conflict circuit writes the overlap matrix into the ancillas") {
    std::mt19937_64 rng(32);
    std::vector<SchedulingInstance> instances;
    for (int id = 1; id <= kNumBuiltinSets; ++id) instances.push_back(builtin_test_set(id));
    for (int t = 0; t < 40; ++t) instances.push_back(oracle::random_instance(rng, 2 + t % 5, 1));
    // Equal starts exercise the stable tie-break.
    instances.push_back(SchedulingInstance({{2, 5}, {2, 3}, {0, 1}, {3, 4}}, 1));
    for (const auto& inst : instances) {
        const ConflictCircuit cc = classical_conflict_circuit(inst);
        CHECK(cc.circuit.num_qubits() == num_pairs(inst.num_tasks()));
        CHECK(cc.circuit.size() == 2 * static_cast<std::size_t>(num_pairs(inst.num_tasks())));
        const StateVector s = sim::run_circuit(cc.circuit, StateVector(cc.circuit.num_qubits()));
        const std::uint64_t key = overlap_key(overlap_matrix(inst), cc.layout);
        CHECK(std::abs(std::norm(s[key]) - 1.0) < 1e-10);
    }
}

TEST_CASE("damselfly gate structure") {
    const auto d = damselfly_gate(0, 1, 0.0, 0.0, 2);
    REQUIRE(d.size() == 5);
    CHECK(d[2] == Gate::ccnot(0, 1, 2));
    for (int i : {0, 1, 3, 4}) CHECK(d[static_cast<std::size_t>(i)].theta == 0.0);

    const auto e = damselfly_gate(3, 1, 0.4, 0.7, 0);
    CHECK(e[0] == Gate::ry(3, 0.8));
    CHECK(e[1] == Gate::ry(1, 1.4));
    CHECK(e[3] == Gate::ry(3, -0.8));
    CHECK(e[4] == Gate::ry(1, -1.4));
}

TEST_CASE("damselfly preserves task statistics in the rotated control frame") {
    // D = R^-1 CCNOT R with R = RY(2 t_i) x RY(2 t_k); measuring the task
    // qubits after R gives the same distribution before and after D.
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> t(0, kPi / 2);
    for (int trial = 0; trial < 50; ++trial) {
        const double ti = t(rng), tk = t(rng);
        const auto psi = oracle::random_state(3, rng);
        const std::vector<Gate> frame{Gate::ry(0, 2 * ti), Gate::ry(1, 2 * tk)};
        StateVector before = StateVector::from_amplitudes(psi);
        sim::apply_gates(before, frame);
        StateVector after = StateVector::from_amplitudes(psi);
        sim::apply_gates(after, damselfly_gate(0, 1, ti, tk, 2));
        sim::apply_gates(after, frame);
        const int tasks[] = {0, 1};
        const auto a = sim::marginal_probabilities(before, tasks);
        const auto b = sim::marginal_probabilities(after, tasks);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("quantum conflict circuit structure") {
    const auto inst = builtin_test_set(1);
    const ConflictCircuit qc = quantum_conflict_circuit(inst);
    CHECK(qc.circuit.num_qubits() == 6);
    CHECK(qc.layout.num_ancillas() == 3);
    CHECK(qc.layout.task_qubits() == std::vector<int>{3, 4, 5});
    int swaps = 0, toffolis = 0;
    for (const Gate& g : qc.circuit.gates()) {
        swaps += g.kind == GateKind::SWAP;
        toffolis += g.kind == GateKind::CCNOT;
    }
    CHECK(swaps == 3);
    CHECK(toffolis == 3);
    CHECK(qc.circuit.size() == 2 * 3 + 6 * 3);
    CHECK(qc.circuit.measured() == std::vector<int>{0, 1, 2});

    // Each pair's Toffoli reads the two qubits that got the end rotations.
    std::size_t pos = 6;
    for (auto [i, k] : task_pairs(3)) {
        const Gate& sw = qc.circuit.gates()[pos];
        const Gate& tof = qc.circuit.gates()[pos + 3];
        CHECK(sw.kind == GateKind::SWAP);
        CHECK(tof.targets[0] == qc.layout.ancilla(i, k));
        CHECK(((tof.controls[0] == sw.targets[0] && tof.controls[1] == sw.targets[1]) ||
               (tof.controls[0] == sw.targets[1] && tof.controls[1] == sw.targets[0])));
        pos += 6;
    }
}

TEST_CASE("quantum conflict circuit: first pair follows the closed form and set 1 thresholds correctly") {
    for (int id = 1; id <= kNumBuiltinSets; ++id) {
        const auto inst = builtin_test_set(id);
        const ConflictCircuit qc = quantum_conflict_circuit(inst);
        const StateVector s = sim::run_circuit(qc.circuit, StateVector(qc.circuit.num_qubits()));
        CHECK(std::abs(prob_one(s, qc.layout.ancilla(0, 1)) - oracle::conflict_probability(inst, 0, 1)) < 1e-9);
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
    }
    const auto s1 = builtin_test_set(1);
    const ConflictCircuit qc = quantum_conflict_circuit(s1);
    const StateVector s = sim::run_circuit(qc.circuit, StateVector(6));
    CHECK(prob_one(s, qc.layout.ancilla(0, 1)) == doctest::Approx(0.882).epsilon(1e-3));
    const auto c = overlap_matrix(s1);
    for (auto [i, k] : task_pairs(3)) CHECK((prob_one(s, qc.layout.ancilla(i, k)) > 0.5) == c.overlaps(i, k));
}

TEST_CASE("hp layer angles and phases") {
    IsingModel one;
    one.n_spins = 2;
    one.quadratic[{0, 1}] = 1.0;
    const auto g = hp_layer(one, 0.5, std::vector<int>{0, 1});
    REQUIRE(g.size() == 1);
    CHECK(g[0] == Gate::rzz(0, 1, 1.0));

    const auto inst = builtin_test_set(4);
    const SplitHamiltonian h = split_hamiltonian(inst, overlap_matrix(inst));
    const auto problem = iota_vec(6);
    for (const Gate& z : hp_layer(h.hp, 0.0, problem)) CHECK(z.theta == 0.0);

    // gamma = pi: the layer is diagonal with phase exp(-i pi (H_p(z) - const)).
    Circuit c(6);
    for (int q = 0; q < 6; ++q) c.add(Gate::h(q));
    c.add(hp_layer(h.hp, kPi, problem));
    const StateVector s = sim::run_circuit(c, StateVector(6));
    for (std::uint64_t z = 0; z < 64; ++z) {
        const auto want = std::polar(0.125, -kPi * (h.hp.evaluate_bits(z) - h.hp.constant));
        CHECK(std::abs(s[z] - want) < 1e-12);
    }
    for (const Gate& z : hp_layer(h.hp, 0.3, problem)) CHECK(z.is_diagonal());
}

TEST_CASE("hc layer equals the gated uncontrolled layer") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int id = 1; id <= kNumBuiltinSets; ++id) {
        const auto inst = builtin_test_set(id);
        const SplitHamiltonian h = split_hamiltonian(inst, overlap_matrix(inst));
        const AncillaLayout layout{3, 6, -1};
        const auto problem = iota_vec(6);
        for (int trial = 0; trial < 20; ++trial) {
            const std::uint64_t b = rng() % 8;
            const double zeta = angle(rng);
            const auto prob = oracle::random_state(6, rng);
            std::vector<oracle::cplx> full(512);
            for (std::uint64_t z = 0; z < 64; ++z) full[(b << 6) | z] = prob[z];
            StateVector s = StateVector::from_amplitudes(full);
            sim::apply_gates(s, hc_layer(h.hc, zeta, layout, problem));

            std::vector<oracle::cplx> want(512);
            for (std::uint64_t z = 0; z < 64; ++z) {
                double e = 0;
                for (const HcTerm& t : h.hc.terms) {
                    if (!((b >> pair_rank(t.task_i, t.task_k, 3)) & 1U)) continue;
                    const int si = ((z >> t.var_i) & 1U) ? -1 : 1, sk = ((z >> t.var_k) & 1U) ? -1 : 1;
                    e += t.zz * si * sk + t.z_i * si + t.z_k * sk;
                }
                want[(b << 6) | z] = prob[z] * std::polar(1.0, -zeta * e);
            }
            CHECK(oracle::fidelity(std::vector<oracle::cplx>(s.amplitudes().begin(), s.amplitudes().end()), want) >= 1 - 1e-10);
        }
    }
}

TEST_CASE("hc layer is the identity with ancillas off or zeta zero") {
    const auto inst = builtin_test_set(2);
    const SplitHamiltonian h = split_hamiltonian(inst, overlap_matrix(inst));
    const AncillaLayout layout{3, 6, -1};
    std::mt19937_64 rng(35);
    const auto prob = oracle::random_state(6, rng);
    std::vector<oracle::cplx> full(512);
    for (std::uint64_t z = 0; z < 64; ++z) full[z] = prob[z];
    StateVector s = StateVector::from_amplitudes(full);
    sim::apply_gates(s, hc_layer(h.hc, 1.3, layout, iota_vec(6)));
    CHECK(oracle::fidelity(std::vector<oracle::cplx>(s.amplitudes().begin(), s.amplitudes().end()), full) ==
          doctest::Approx(1.0).epsilon(1e-12));
    for (const Gate& g : hc_layer(h.hc, 0.0, layout, iota_vec(6))) CHECK(g.theta == 0.0);
    const auto gates = hc_layer(h.hc, 0.5, layout, iota_vec(6));
    CHECK(gates.size() == 3 * 3 * 2);
    CHECK(gates[0] == Gate::crzz(6, 0, 2, 2 * 0.5 * 7 / 4.0));
    CHECK(gates[1] == Gate::crz(6, 0, -2 * 0.5 * 7 / 4.0));
}

TEST_CASE("hb layer") {
    const auto g = hb_layer(0.25, iota_vec(6));
    CHECK(g.size() == 6);
    for (const Gate& x : g) CHECK(x == Gate::rx(x.targets[0], 0.5));
    StateVector s = StateVector::basis(3, 0b010);
    sim::apply_gates(s, hb_layer(kPi / 2, iota_vec(3)));
    CHECK(std::norm(s[0b101]) == doctest::Approx(1.0));
    StateVector t = StateVector::basis(3, 0b010);
    sim::apply_gates(t, hb_layer(0.0, iota_vec(3)));
    CHECK(std::norm(t[0b010]) == doctest::Approx(1.0));
}

TEST_CASE("ansatz registers, measurement and layer order") {
    const auto inst = builtin_test_set(4);
    ParameterVector p{ZetaMode::Independent, {0.1}, {0.2}, {0.3}};
    const QtisCircuit c = build_ansatz(inst, {1, ZetaMode::Independent, ConflictVariant::Classical, false}, p);
    CHECK(c.circuit.num_qubits() == 9);
    CHECK(c.problem_qubits == iota_vec(6));
    CHECK(c.ancilla_qubits == iota_vec(3, 6));
    CHECK(c.task_qubits.empty());
    auto measured = c.circuit.measured();
    std::sort(measured.begin(), measured.end());
    CHECK(measured == iota_vec(9));

    // After the prefix: RZZ/RZ, then controlled gates, then RX.
    int phase = 0;
    for (std::size_t i = c.prefix_gates; i < c.circuit.size(); ++i) {
        const GateKind k = c.circuit.gates()[i].kind;
        const int stage = (k == GateKind::RZZ || k == GateKind::RZ) ? 0 : (k == GateKind::CRZZ || k == GateKind::CRZ) ? 1 : 2;
        CHECK(stage >= phase);
        phase = stage;
    }
    CHECK(phase == 2);

    const QtisCircuit q = build_ansatz(inst, {1, ZetaMode::Independent, ConflictVariant::Quantum, false}, p);
    CHECK(q.circuit.num_qubits() == 12);
    CHECK(q.task_qubits == iota_vec(3, 9));
    measured = q.circuit.measured();
    std::sort(measured.begin(), measured.end());
    CHECK(measured == iota_vec(9));
}

TEST_CASE("shared mode substitutes gamma for zeta") {
    const auto inst = builtin_test_set(1);
    ParameterVector shared{ZetaMode::Shared, {0.4, 1.1}, {}, {0.2, 0.9}};
    ParameterVector indep{ZetaMode::Independent, {0.4, 1.1}, {0.4, 1.1}, {0.2, 0.9}};
    const auto a = build_ansatz(inst, {2, ZetaMode::Shared, ConflictVariant::Classical, false}, shared);
    const auto b = build_ansatz(inst, {2, ZetaMode::Independent, ConflictVariant::Classical, false}, indep);
    CHECK(a.circuit.gates() == b.circuit.gates());
    CHECK_THROWS(build_ansatz(inst, {2, ZetaMode::Independent, ConflictVariant::Classical, false}, shared));
    CHECK_THROWS(build_ansatz(inst, {3, ZetaMode::Shared, ConflictVariant::Classical, false}, shared));
}

TEST_CASE("ansatz gate count follows the closed form") {
    std::mt19937_64 rng(36);
    for (int t = 0; t < 30; ++t) {
        const int n = 2 + t % 3, m = 1 + (t / 3) % 3, depth = 1 + t % 4;
        const auto inst = oracle::random_instance(rng, n, m);
        for (ConflictVariant v : {ConflictVariant::Classical, ConflictVariant::Quantum}) {
            std::mt19937_64 prng(static_cast<std::uint64_t>(t));
            std::uniform_real_distribution<double> a(0, kPi);
            std::vector<double> flat(ParameterVector::size_for(depth, ZetaMode::Independent));
            for (auto& x : flat) x = a(prng);
            const auto p = ParameterVector::unflatten(flat, depth, ZetaMode::Independent);
            const auto c = build_ansatz(inst, {depth, ZetaMode::Independent, v, false}, p);
            CHECK(c.circuit.size() == ansatz_gate_count(n, m, depth, v));
            const std::size_t pairs = static_cast<std::size_t>(n * (n - 1) / 2);
            const std::size_t per_layer = static_cast<std::size_t>(n * m) + static_cast<std::size_t>(n * m * (m - 1) / 2) + 3 * pairs * static_cast<std::size_t>(m) + static_cast<std::size_t>(n * m);
            const std::size_t prefix = (v == ConflictVariant::Classical ? 2 * pairs : 2 * static_cast<std::size_t>(n) + 6 * pairs) + static_cast<std::size_t>(n * m);
            CHECK(c.circuit.size() == prefix + static_cast<std::size_t>(depth) * per_layer);
        }
    }
}

TEST_CASE("hp and hc layers commute") {
    const auto inst = builtin_test_set(3);
    AnsatzBuilder b(inst, {1, ZetaMode::Independent, ConflictVariant::Classical, false});
    StateVector s1 = sim::run_circuit(b.prefix(), StateVector(b.num_qubits()));
    StateVector s2 = s1;
    const auto problem = b.problem_qubits();
    const auto hp = hp_layer(b.hamiltonian().hp, 0.7, problem);
    const auto hc = hc_layer(b.hamiltonian().hc, -1.3, b.layout(), problem);
    sim::apply_gates(s1, hp);
    sim::apply_gates(s1, hc);
    sim::apply_gates(s2, hc);
    sim::apply_gates(s2, hp);
    CHECK(sim::fidelity(s1, s2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pruning drops gates of non-overlapping pairs without changing the state") {
    const auto inst = builtin_test_set(1);
    ParameterVector p{ZetaMode::Independent, {0.3, 0.8}, {1.2, -0.4}, {0.5, 0.1}};
    const auto full = build_ansatz(inst, {2, ZetaMode::Independent, ConflictVariant::Classical, false}, p);
    const auto pruned = build_ansatz(inst, {2, ZetaMode::Independent, ConflictVariant::Classical, true}, p);
    CHECK(pruned.circuit.num_qubits() == full.circuit.num_qubits());
    CHECK(full.circuit.size() - pruned.circuit.size() == 2 * 2 * 3 * 2);
    const auto a = sim::run_circuit(full.circuit, StateVector(9));
    const auto b = sim::run_circuit(pruned.circuit, StateVector(9));
    CHECK(sim::fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-12));
}
