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

#include "qtis/qubo.hpp"

#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qtis {

Assignment::Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
}

Assignment Assignment::from_bits(std::uint64_t bits, int n_vars) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n_vars));
    for (int q = 0; q < n_vars; ++q) v[static_cast<std::size_t>(q)] = (bits >> q) & 1U;
    return Assignment(std::move(v));
}

std::uint64_t Assignment::to_bits() const {
    if (bits_.size() > 64) throw std::length_error("Assignment wider than 64 bits");
    std::uint64_t out = 0;
    for (std::size_t q = 0; q < bits_.size(); ++q) {
        if (bits_[q]) out |= std::uint64_t{1} << q;
    }
    return out;
}

std::string Assignment::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t q = 0; q < bits_.size(); ++q) {
        if (bits_[q]) s[bits_.size() - 1 - q] = '1';
    }
    return s;
}

void QuboModel::add_linear(int v, double c) {
    if (v < 0 || v >= n_vars) throw std::out_of_range("QuboModel: variable out of range");
    linear[v] += c;
}

void QuboModel::add_quadratic(int u, int v, double c) {
    if (u == v) {
        // x^2 == x for binaries
        add_linear(u, c);
        return;
    }
    if (u < 0 || v < 0 || u >= n_vars || v >= n_vars) {
        throw std::out_of_range("QuboModel: variable out of range");
    }
    if (u > v) std::swap(u, v);
    quadratic[{u, v}] += c;
}

double QuboModel::evaluate(const Assignment& x) const {
    if (x.size() != n_vars) {
        throw std::invalid_argument("evaluate_qubo: assignment has " + std::to_string(x.size()) +
                                    " bits, model has " + std::to_string(n_vars));
    }
    double e = constant;
    for (const auto& [v, c] : linear) {
        if (x[v]) e += c;
    }
    for (const auto& [uv, c] : quadratic) {
        if (x[uv.first] && x[uv.second]) e += c;
    }
    return e;
}

double QuboModel::evaluate_bits(std::uint64_t x) const {
    double e = constant;
    for (const auto& [v, c] : linear) {
        if ((x >> v) & 1U) e += c;
    }
    for (const auto& [uv, c] : quadratic) {
        if (((x >> uv.first) & (x >> uv.second)) & 1U) e += c;
    }
    return e;
}

std::vector<double> QuboModel::energy_table() const {
    if (n_vars > kMaxBruteForceVars) throw std::length_error("energy_table: too many variables");
    const std::uint64_t dim = std::uint64_t{1} << n_vars;
    std::vector<double> table(dim);
    for (std::uint64_t x = 0; x < dim; ++x) table[x] = evaluate_bits(x);
    return table;
}

double IsingModel::evaluate(std::span<const int> spins) const {
    if (static_cast<int>(spins.size()) != n_spins) {
        throw std::invalid_argument("IsingModel: spin vector length mismatch");
    }
    double e = constant;
    for (const auto& [v, c] : linear) e += c * spins[static_cast<std::size_t>(v)];
    for (const auto& [uv, c] : quadratic) {
        e += c * spins[static_cast<std::size_t>(uv.first)] * spins[static_cast<std::size_t>(uv.second)];
    }
    return e;
}

double IsingModel::evaluate_bits(std::uint64_t x) const {
    auto spin = [x](int v) { return ((x >> v) & 1U) ? -1.0 : 1.0; };
    double e = constant;
    for (const auto& [v, c] : linear) e += c * spin(v);
    for (const auto& [uv, c] : quadratic) e += c * spin(uv.first) * spin(uv.second);
    return e;
}

double HcTermSet::evaluate_bits(std::uint64_t x, const std::vector<bool>& pair_gates) const {
    if (static_cast<int>(pair_gates.size()) != num_pairs(n_tasks)) {
        throw std::invalid_argument("HcTermSet: gate vector length mismatch");
    }
    double e = 0.0;
    for (const auto& t : terms) {
        if (!pair_gates[static_cast<std::size_t>(pair_rank(t.task_i, t.task_k, n_tasks))]) continue;
        const int si = ((x >> t.var_i) & 1U) ? -1 : 1;
        const int sk = ((x >> t.var_k) & 1U) ? -1 : 1;
        e += t.evaluate_spins(si, sk);
    }
    return e;
}

double penalty_factor(const SchedulingInstance& instance) noexcept {
    return static_cast<double>(instance.num_tasks()) * instance.resources() + 1.0;
}

QuboModel build_assignment_qubo(const SchedulingInstance& instance) {
    const int n_tasks = instance.num_tasks();
    const int n_res = instance.resources();
    const double p = instance.penalty();

    QuboModel q;
    q.n_vars = instance.num_vars();
    for (int i = 0; i < n_tasks; ++i) {
        // -sum_j x_ij
        for (int j = 0; j < n_res; ++j) q.add_linear(var_index(i, j, n_res), -1.0);
        // P (sum_j x_ij - 1)^2 = P (sum_j x_ij + 2 sum_{j<j'} x_ij x_ij' - 2 sum_j x_ij + 1)
        for (int j = 0; j < n_res; ++j) {
            q.add_linear(var_index(i, j, n_res), -p);
            for (int jj = j + 1; jj < n_res; ++jj) {
                q.add_quadratic(var_index(i, j, n_res), var_index(i, jj, n_res), 2.0 * p);
            }
        }
        q.constant += p;
    }
    return q;
}

QuboModel build_qubo(const SchedulingInstance& instance, const OverlapMatrix& overlaps) {
    if (overlaps.num_tasks() != instance.num_tasks()) {
        throw std::invalid_argument("build_qubo: overlap matrix does not match instance");
    }
    QuboModel q = build_assignment_qubo(instance);
    const int n_res = instance.resources();
    for (auto [i, k] : task_pairs(instance.num_tasks())) {
        if (!overlaps.overlaps(i, k)) continue;
        for (int j = 0; j < n_res; ++j) {
            q.add_quadratic(var_index(i, j, n_res), var_index(k, j, n_res), instance.penalty());
        }
    }
    return q;
}

double evaluate_qubo(const QuboModel& qubo, const Assignment& x) { return qubo.evaluate(x); }

IsingModel qubo_to_ising(const QuboModel& qubo) {
    IsingModel ising;
    ising.n_spins = qubo.n_vars;
    ising.constant = qubo.constant;
    for (int v = 0; v < qubo.n_vars; ++v) ising.linear[v] = 0.0;
    // a x = a/2 - (a/2) s
    for (const auto& [v, a] : qubo.linear) {
        ising.constant += a / 2.0;
        ising.linear[v] -= a / 2.0;
    }
    // b x_u x_v = (b/4)(1 - s_u - s_v + s_u s_v)
    for (const auto& [uv, b] : qubo.quadratic) {
        ising.constant += b / 4.0;
        ising.linear[uv.first] -= b / 4.0;
        ising.linear[uv.second] -= b / 4.0;
        ising.quadratic[uv] += b / 4.0;
    }
    return ising;
}

SplitHamiltonian split_hamiltonian(const SchedulingInstance& instance, const OverlapMatrix& overlaps) {
    if (overlaps.num_tasks() != instance.num_tasks()) {
        throw std::invalid_argument("split_hamiltonian: overlap matrix does not match instance");
    }
    SplitHamiltonian out;
    out.hp = qubo_to_ising(build_assignment_qubo(instance));

    const int n_res = instance.resources();
    const double quarter = instance.penalty() / 4.0;
    auto& hc = out.hc;
    hc.n_tasks = instance.num_tasks();
    hc.n_resources = n_res;
    hc.penalty = instance.penalty();
    for (auto [i, k] : task_pairs(instance.num_tasks())) {
        for (int j = 0; j < n_res; ++j) {
            HcTerm t;
            t.task_i = i;
            t.task_k = k;
            t.resource = j;
            t.var_i = var_index(i, j, n_res);
            t.var_k = var_index(k, j, n_res);
            t.zz = quarter;
            t.z_i = -quarter;
            t.z_k = -quarter;
            t.constant = quarter;
            hc.terms.push_back(t);
        }
    }
    return out;
}

EnergyBounds energy_bounds(const SchedulingInstance& instance, const OverlapMatrix& overlaps) {
    const QuboModel q = build_qubo(instance, overlaps);
    const std::uint64_t all_ones =
        q.n_vars >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << q.n_vars) - 1;
    return {-static_cast<double>(instance.num_tasks()), q.evaluate_bits(all_ones)};
}

double normalize_energy(double energy, const EnergyBounds& bounds) noexcept {
    return (energy - bounds.e_min_ideal) / (bounds.e_max - bounds.e_min_ideal);
}

namespace {

void check_enumerable(const QuboModel& qubo) {
    if (qubo.n_vars > kMaxBruteForceVars) {
        throw std::length_error("brute_force_minimum: " + std::to_string(qubo.n_vars) +
                                " variables exceeds the enumeration limit of " +
                                std::to_string(kMaxBruteForceVars));
    }
}

}  // namespace

BruteForceResult brute_force_minimum_serial(const QuboModel& qubo) {
    check_enumerable(qubo);
    const std::uint64_t dim = std::uint64_t{1} << qubo.n_vars;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t arg = 0;
    for (std::uint64_t x = 0; x < dim; ++x) {
        const double e = qubo.evaluate_bits(x);
        if (e < best) {
            best = e;
            arg = x;
        }
    }
    return {Assignment::from_bits(arg, qubo.n_vars), best};
}

BruteForceResult brute_force_minimum(const QuboModel& qubo) {
    check_enumerable(qubo);
    const auto dim = static_cast<std::int64_t>(std::uint64_t{1} << qubo.n_vars);
    double best = std::numeric_limits<double>::infinity();
    std::int64_t arg = 0;

#pragma omp parallel
    {
        double local_best = std::numeric_limits<double>::infinity();
        std::int64_t local_arg = 0;
#pragma omp for schedule(static) nowait
        for (std::int64_t x = 0; x < dim; ++x) {
            const double e = qubo.evaluate_bits(static_cast<std::uint64_t>(x));
            if (e < local_best) {
                local_best = e;
                local_arg = x;
            }
        }
#pragma omp critical(qtis_brute_force)
        {
            if (local_best < best || (local_best == best && local_arg < arg)) {
                best = local_best;
                arg = local_arg;
            }
        }
    }
    return {Assignment::from_bits(static_cast<std::uint64_t>(arg), qubo.n_vars), best};
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string dump_qubo(const QuboModel& qubo) {
    std::ostringstream os;
    os << "# qubo n_vars=" << qubo.n_vars << '\n';
    os << "const " << fmt17(qubo.constant) << '\n';
    for (const auto& [v, c] : qubo.linear) os << "lin " << v << ' ' << fmt17(c) << '\n';
    for (const auto& [uv, c] : qubo.quadratic) {
        os << "quad " << uv.first << ' ' << uv.second << ' ' << fmt17(c) << '\n';
    }
    return os.str();
}

std::string dump_ising(const IsingModel& ising) {
    std::ostringstream os;
    os << "# ising n_spins=" << ising.n_spins << '\n';
    os << "const " << fmt17(ising.constant) << '\n';
    for (const auto& [v, c] : ising.linear) os << "lin " << v << ' ' << fmt17(c) << '\n';
    for (const auto& [uv, c] : ising.quadratic) {
        os << "quad " << uv.first << ' ' << uv.second << ' ' << fmt17(c) << '\n';
    }
    return os.str();
}

}  // namespace qtis
