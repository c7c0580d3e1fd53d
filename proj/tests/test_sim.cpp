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
#include "qtis/kernels.hpp"
#include "qtis/sim.hpp"

using namespace qtis;
using namespace qtis::sim;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Gate> every_kind(double theta) {
    return {Gate::h(1),           Gate::rx(0, theta),        Gate::ry(2, theta),     Gate::rz(3, theta),
            Gate::rzz(0, 2, theta), Gate::rzz(3, 1, theta), Gate::swap(1, 3),       Gate::ccnot(0, 2, 1),
            Gate::ccnot(3, 1, 2), Gate::crz(2, 0, theta),    Gate::crzz(1, 3, 0, theta)};
}

// Random gate over n qubits with distinct indices.
Gate random_gate(int n, std::mt19937_64& rng) {
    std::vector<int> q(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = i;
    std::shuffle(q.begin(), q.end(), rng);
    const double t = std::uniform_real_distribution<double>(-2 * kPi, 2 * kPi)(rng);
    switch (rng() % 9) {
        case 0: return Gate::h(q[0]);
        case 1: return Gate::rx(q[0], t);
        case 2: return Gate::ry(q[0], t);
        case 3: return Gate::rz(q[0], t);
        case 4: return Gate::rzz(q[0], q[1], t);
        case 5: return Gate::swap(q[0], q[1]);
        case 6: return Gate::ccnot(q[0], q[1], q[2]);
        case 7: return Gate::crz(q[0], q[1], t);
        default: return Gate::crzz(q[0], q[1], q[2], t);
    }
}

StateVector to_state(const std::vector<oracle::cplx>& v) { return StateVector::from_amplitudes(v); }

double max_diff(const StateVector& a, const std::vector<oracle::cplx>& b) {
    double d = 0;
    for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("every gate matches its dense matrix on both backends") {
    std::mt19937_64 rng(21);
    for (double theta : {0.0, 0.37, -1.9, kPi, 5.1}) {
        for (const Gate& g : every_kind(theta)) {
            const auto psi = oracle::random_state(4, rng);
            const auto want = oracle::gate_matrix(4, g).apply(psi);
            for (Backend b : {Backend::Optimized, Backend::Reference}) {
                StateVector s = to_state(psi);
                apply_gate(s, g, b);
                CHECK_MESSAGE(max_diff(s, want) < 1e-12, g.to_string());
            }
        }
    }
}

TEST_CASE("optimized and reference kernels agree on large registers") {
    std::mt19937_64 rng(22);
    const int n = 15;  // above the parallel threshold
    REQUIRE((std::uint64_t{1} << n) >= kernels::kParallelThreshold);
    std::vector<oracle::cplx> psi = oracle::random_state(n, rng);
    StateVector a = to_state(psi), b = to_state(psi);
    for (int i = 0; i < 60; ++i) {
        const Gate g = random_gate(n, rng);
        apply_gate(a, g, Backend::Optimized);
        apply_gate(b, g, Backend::Reference);
    }
    double d = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("basic gate identities") {
    StateVector s(1);
    apply_gate(s, Gate::ry(0, kPi));
    CHECK(std::norm(s[1]) == doctest::Approx(1.0));

    StateVector t = StateVector::basis(3, 0b110);
    apply_gate(t, Gate::ccnot(1, 2, 0));
    CHECK(std::norm(t[0b111]) == doctest::Approx(1.0));

    StateVector u(1);
    apply_gate(u, Gate::h(0));
    apply_gate(u, Gate::ry(0, kPi / 2));
    CHECK(std::abs(std::norm(u[1]) - 1.0) < 1e-15);
}

TEST_CASE("run_circuit basics") {
    std::mt19937_64 rng(23);
    const auto psi = oracle::random_state(3, rng);
    const StateVector same = run_circuit(Circuit(3), to_state(psi));
    CHECK(max_diff(same, psi) == 0.0);

    Circuit hs(5);
    for (int q = 0; q < 5; ++q) hs.add(Gate::h(q));
    const StateVector plus = run_circuit(hs, StateVector(5));
    for (std::size_t i = 0; i < plus.dim(); ++i) CHECK(std::abs(plus[i] - std::pow(2.0, -2.5)) < 1e-15);

    // Control (qubit 2) left in |0>.
    Circuit cz(3);
    cz.add(Gate::h(0)).add(Gate::h(1)).add(Gate::crzz(2, 0, 1, 1.234));
    Circuit ref(3);
    ref.add(Gate::h(0)).add(Gate::h(1));
    CHECK(fidelity(run_circuit(cz, StateVector(3)), run_circuit(ref, StateVector(3))) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("norm is preserved and inverses undo every gate") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + trial % 5;
        const auto psi = oracle::random_state(n, rng);
        StateVector s = to_state(psi);
        const Gate g = random_gate(n, rng);
        apply_gate(s, g);
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
        apply_gate(s, g.inverse());
        CHECK(max_diff(s, psi) < 1e-10);
    }
}

TEST_CASE("RZZ equals CNOT RZ CNOT") {
    std::mt19937_64 rng(25);
    for (double t : {0.3, -2.2, 4.0}) {
        const auto psi = oracle::random_state(3, rng);
        StateVector s = to_state(psi);
        apply_gate(s, Gate::rzz(2, 0, t));
        const auto want = oracle::rzz(3, 2, 0, t).apply(psi);
        CHECK(max_diff(s, want) < 1e-12);
    }
}

TEST_CASE("gate validation") {
    StateVector s(3);
    CHECK_THROWS_AS(apply_gate(s, Gate::h(3)), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(s, Gate::rzz(1, 1, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate::ccnot(0, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate::rx(0, std::nan(""))), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, Gate::crz(-1, 0, 0.1)), std::out_of_range);
    Circuit c(2);
    CHECK_THROWS(c.add(Gate::h(2)));
    CHECK_THROWS(run_circuit(Circuit(2), StateVector(3)));
}

TEST_CASE("circuit dump format") {
    Circuit c(3);
    c.add(Gate::rzz(0, 1, 0.5)).add(Gate::crz(2, 0, -0.25)).add(Gate::ccnot(0, 1, 2)).add(Gate::h(1));
    c.measure(0);
    const std::string d = c.dump();
    CHECK(d.find("# qubits=3 gates=4 measured=0") == 0);
    CHECK(d.find("RZZ 0,1 theta=0.5\n") != std::string::npos);
    CHECK(d.find("CRZ 0 [2] theta=-0.25\n") != std::string::npos);
    CHECK(d.find("CCNOT 2 [0,1]\n") != std::string::npos);
    CHECK(d.find("H 1\n") != std::string::npos);
    CHECK(Gate::rx(0, 0.1).to_string() == "RX 0 theta=0.10000000000000001");
}

TEST_CASE("sampling") {
    const SampleCounts a = sample(StateVector::basis(3, 0b101), 1000, 1);
    CHECK(a.counts.size() == 1);
    CHECK(a.counts.at(0b101) == 1000);
    CHECK(a.key_string(0b101) == "101");
    CHECK(a.modal() == 0b101);

    StateVector plus(1);
    apply_gate(plus, Gate::h(0));
    const SampleCounts b = sample(plus, 100000, 99);
    CHECK(b.counts.at(0) + b.counts.at(1) == 100000);
    CHECK(std::abs(static_cast<double>(b.counts.at(0)) - 50000.0) < 3 * 158.2);

    const SampleCounts c = sample(plus, 100000, 99);
    CHECK(c.counts == b.counts);
    CHECK(c.seed == 99);
    CHECK_THROWS(sample(plus, 0, 1));
}

TEST_CASE("bit extraction and marginals") {
    const int qs[] = {3, 0};
    CHECK(extract_bits(0b1000, qs) == 0b01);
    CHECK(extract_bits(0b0001, qs) == 0b10);
    for (std::uint64_t z = 0; z < 64; ++z) {
        const int id[] = {0, 1, 2, 3, 4, 5};
        CHECK(extract_bits(z, id) == z);
    }
    std::mt19937_64 rng(26);
    const StateVector s = to_state(oracle::random_state(4, rng));
    const int q2[] = {1, 3};
    const auto m = marginal_probabilities(s, q2);
    std::vector<double> want(4, 0.0);
    for (std::uint64_t z = 0; z < 16; ++z) want[((z >> 1) & 1) | (((z >> 3) & 1) << 1)] += std::norm(s[z]);
    for (int i = 0; i < 4; ++i) CHECK(m[static_cast<std::size_t>(i)] == doctest::Approx(want[static_cast<std::size_t>(i)]));
}

TEST_CASE("energy expectation") {
    const auto s4 = builtin_test_set(4);
    const QuboModel q4 = build_qubo(s4, overlap_matrix(s4));
    const int problem[] = {0, 1, 2, 3, 4, 5};

    Circuit hs(6);
    for (int q = 0; q < 6; ++q) hs.add(Gate::h(q));
    double mean = 0;
    for (std::uint64_t x = 0; x < 64; ++x) mean += oracle::qubo_energy(s4, x) / 64;
    CHECK(expectation_energy(run_circuit(hs, StateVector(6)), q4, problem) == doctest::Approx(mean).epsilon(1e-12));

    CHECK(expectation_energy(StateVector::basis(6, 0b011001), q4, problem) == doctest::Approx(-3));
    const auto s1 = builtin_test_set(1);
    CHECK(expectation_energy(StateVector::basis(6, 63), build_qubo(s1, overlap_matrix(s1)), problem) == doctest::Approx(29));

    // Extra register qubits are marginalized out.
    const int shifted[] = {1, 2, 3, 4, 5, 6};
    CHECK(expectation_energy(StateVector::basis(7, 0b0110011), q4, shifted) == doctest::Approx(-3));
    const int short_map[] = {0, 1};
    CHECK_THROWS(expectation_energy(StateVector(6), q4, short_map));
}

TEST_CASE("shot estimate agrees with the exact expectation") {
    const auto s1 = builtin_test_set(1);
    const QuboModel q = build_qubo(s1, overlap_matrix(s1));
    const int problem[] = {0, 1, 2, 3, 4, 5};
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 5; ++trial) {
        const StateVector s = to_state(oracle::random_state(6, rng));
        const double exact = expectation_energy(s, q, problem);
        const ShotEstimate est = sampled_energy(sample(s, 100000, 1000 + static_cast<std::uint64_t>(trial)), q, problem);
        CHECK(est.standard_error > 0);
        CHECK(std::abs(est.mean - exact) < 3 * est.standard_error);
    }
}
