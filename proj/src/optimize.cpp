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

#include "qtis/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtis {

void OptimizerOptions::validate() const {
    if (max_evaluations < 1) throw std::invalid_argument("OptimizerOptions: max_evaluations must be >= 1");
    if (!(final_step > 0.0) || !(final_step < initial_step)) {
        throw std::invalid_argument("OptimizerOptions: need 0 < final_step < initial_step");
    }
}

namespace {

// Column-major n x n block, sim(i, j) = data[j * n + i].
class Square {
  public:
    explicit Square(std::size_t n) : n_(n), data_(n * n, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }

  private:
    std::size_t n_;
    std::vector<double> data_;
};

}  // namespace

// Follows the control flow of Powell's cobylb with m = 0. Labels in the
// comments refer to that routine.
CobylaResult cobyla_minimize(const ScalarFunction& f, std::vector<double> x0,
                             const OptimizerOptions& options) {
    options.validate();
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("cobyla_minimize: empty parameter vector");

    constexpr double kAlpha = 0.25;
    constexpr double kBeta = 2.1;
    constexpr double kGamma = 0.5;
    constexpr double kDelta = 1.1;

    const double rhoend = options.final_step;
    double rho = options.initial_step;

    CobylaResult best{x0, 0.0, 0, false};
    bool have_best = false;

    // sim columns 0..n-1 are edge vectors from the best vertex, stored in
    // base; fval[n] is f at base.
    Square sim(n), simi(n);
    std::vector<double> base = x0;
    std::vector<double> fval(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sim(i, i) = rho;
        simi(i, i) = 1.0 / rho;
    }

    std::vector<double> x = x0, dx(n), g(n), vsig(n), veta(n), sigbar(n), w(n);
    std::size_t jdrop = n;
    int nfvals = 0;
    bool ibrnch = false;
    bool iflag = false;
    double prerem = 0.0;
    double parsig = 0.0;

    auto evaluate = [&](const std::vector<double>& at) {
        const double v = f(at);
        ++nfvals;
        if (!have_best || v < best.f) {
            best.x = at;
            best.f = v;
            have_best = true;
        }
        return v;
    };

    // Replace vertex jdrop by base + step and update the inverse in place.
    auto replace_vertex = [&](std::size_t jd, const std::vector<double>& step) {
        double temp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sim(i, jd) = step[i];
            temp += simi(jd, i) * step[i];
        }
        for (std::size_t i = 0; i < n; ++i) simi(jd, i) /= temp;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == jd) continue;
            double t = 0.0;
            for (std::size_t i = 0; i < n; ++i) t += simi(j, i) * step[i];
            for (std::size_t i = 0; i < n; ++i) simi(j, i) -= t * simi(jd, i);
        }
    };

    // Initial simplex (label 40 with ibrnch == 0).
    fval[n] = evaluate(x);
    for (std::size_t j = 0; j < n; ++j) {
        if (nfvals >= options.max_evaluations) {
            best.evaluations = nfvals;
            return best;
        }
        x = base;
        x[j] += rho;
        const double fx = evaluate(x);
        if (fval[n] <= fx) {
            fval[j] = fx;
        } else {
            // The new point becomes the best vertex; flip edge j.
            base[j] = x[j];
            fval[j] = fval[n];
            fval[n] = fx;
            for (std::size_t k = 0; k <= j; ++k) {
                sim(j, k) = -rho;
                double temp = 0.0;
                for (std::size_t i = k; i <= j; ++i) temp -= simi(i, k);
                simi(j, k) = temp;
            }
        }
    }
    ibrnch = true;

    enum class Next { Select, Evaluate, Reduce };
    bool trust_step = false;
    Next next = Next::Select;

    while (true) {
        if (next == Next::Evaluate) {
            // label 40
            if (nfvals >= options.max_evaluations) break;
            for (std::size_t i = 0; i < n; ++i) x[i] = base[i] + dx[i];
            const double fx = evaluate(x);
            if (!trust_step) {
                fval[jdrop] = fx;
                ibrnch = true;
                next = Next::Select;
                continue;
            }
            // label 440
            double trured = fval[n] - fx;
            if (fx == fval[n]) {
                prerem = 0.0;
                trured = 0.0;
            }
            double ratio = trured <= 0.0 ? 1.0 : 0.0;
            std::size_t jd = n;
            for (std::size_t j = 0; j < n; ++j) {
                double t = 0.0;
                for (std::size_t i = 0; i < n; ++i) t += simi(j, i) * dx[i];
                t = std::abs(t);
                if (t > ratio) {
                    jd = j;
                    ratio = t;
                }
                sigbar[j] = t * vsig[j];
            }
            double edgmax = kDelta * rho;
            std::size_t l = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (sigbar[j] >= parsig || sigbar[j] >= vsig[j]) {
                    double t = veta[j];
                    if (trured > 0.0) {
                        t = 0.0;
                        for (std::size_t i = 0; i < n; ++i) t += (dx[i] - sim(i, j)) * (dx[i] - sim(i, j));
                        t = std::sqrt(t);
                    }
                    if (t > edgmax) {
                        l = j;
                        edgmax = t;
                    }
                }
            }
            if (l < n) jd = l;
            if (jd == n) {
                next = Next::Reduce;
                continue;
            }
            replace_vertex(jd, dx);
            fval[jd] = fx;
            next = (trured > 0.0 && trured >= 0.1 * prerem) ? Next::Select : Next::Reduce;
            continue;
        }

        if (next == Next::Reduce) {
            // label 550
            if (!iflag) {
                ibrnch = false;
                next = Next::Select;
                continue;
            }
            if (rho > rhoend) {
                rho *= 0.5;
                if (rho <= 1.5 * rhoend) rho = rhoend;
                next = Next::Select;
                continue;
            }
            best.converged = true;
            break;
        }

        // label 140: move the best vertex to position n.
        std::size_t nbest = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (fval[j] < fval[nbest]) nbest = j;
        }
        if (nbest < n) {
            std::swap(fval[n], fval[nbest]);
            for (std::size_t i = 0; i < n; ++i) {
                const double temp = sim(i, nbest);
                sim(i, nbest) = 0.0;
                base[i] += temp;
                double tempa = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    sim(i, k) -= temp;
                    tempa -= simi(k, i);
                }
                simi(nbest, i) = tempa;
            }
        }

        double error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double t = i == j ? -1.0 : 0.0;
                for (std::size_t k = 0; k < n; ++k) t += simi(i, k) * sim(k, j);
                error = std::max(error, std::abs(t));
            }
        }
        if (error > 0.1) break;

        // Linear model gradient.
        for (std::size_t j = 0; j < n; ++j) w[j] = fval[j] - fval[n];
        for (std::size_t i = 0; i < n; ++i) {
            double t = 0.0;
            for (std::size_t j = 0; j < n; ++j) t += w[j] * simi(j, i);
            g[i] = t;
        }

        iflag = true;
        parsig = kAlpha * rho;
        const double pareta = kBeta * rho;
        for (std::size_t j = 0; j < n; ++j) {
            double wsig = 0.0, weta = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                wsig += simi(j, i) * simi(j, i);
                weta += sim(i, j) * sim(i, j);
            }
            vsig[j] = 1.0 / std::sqrt(wsig);
            veta[j] = std::sqrt(weta);
            if (vsig[j] < parsig || veta[j] > pareta) iflag = false;
        }

        if (!ibrnch && !iflag) {
            // Geometry step: replace the worst-shaped vertex.
            jdrop = n;
            double temp = pareta;
            for (std::size_t j = 0; j < n; ++j) {
                if (veta[j] > temp) {
                    jdrop = j;
                    temp = veta[j];
                }
            }
            if (jdrop == n) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (vsig[j] < temp) {
                        jdrop = j;
                        temp = vsig[j];
                    }
                }
            }
            const double scale = kGamma * rho * vsig[jdrop];
            double slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dx[i] = scale * simi(jdrop, i);
                slope -= g[i] * dx[i];
            }
            if (0.0 > slope + slope) {
                for (auto& d : dx) d = -d;
            }
            replace_vertex(jdrop, dx);
            trust_step = false;
            next = Next::Evaluate;
            continue;
        }

        // label 370: minimise the linear model on the ball of radius rho.
        double gnorm = 0.0;
        for (double gi : g) gnorm += gi * gi;
        gnorm = std::sqrt(gnorm);
        if (!(gnorm > 0.0)) {
            ibrnch = true;
            next = Next::Reduce;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) dx[i] = -rho * g[i] / gnorm;
        prerem = rho * gnorm;
        ibrnch = true;
        trust_step = true;
        next = Next::Evaluate;
    }

    best.evaluations = nfvals;
    return best;
}

ParameterVector init_random_params(int depth, ZetaMode mode, std::mt19937_64& rng) {
    if (depth < 1) throw std::invalid_argument("init_random_params: depth must be at least 1");
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::vector<double> flat(ParameterVector::size_for(depth, mode));
    for (auto& a : flat) a = angle(rng);
    return ParameterVector::unflatten(flat, depth, mode);
}

const char* to_string(Estimator e) noexcept { return e == Estimator::Exact ? "exact" : "sampled"; }

Estimator parse_estimator(const std::string& s) {
    if (s == "exact") return Estimator::Exact;
    if (s == "sampled") return Estimator::Sampled;
    throw std::invalid_argument("unknown estimator '" + s + "' (exact|sampled)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Objective::Objective(const SchedulingInstance& instance, const ObjectiveConfig& config,
                     std::uint64_t sample_seed)
    : config_(config), builder_(instance, config.ansatz), sample_seed_(sample_seed) {
    if (config.estimator == Estimator::Sampled && config.shots == 0) {
        throw std::invalid_argument("Objective: sampled estimator needs shots >= 1");
    }
    const OverlapMatrix overlaps = overlap_matrix(instance);
    qubo_ = build_qubo(instance, overlaps);
    bounds_ = energy_bounds(instance, overlaps);

    prefix_state_ = sim::run_circuit(builder_.prefix(), sim::StateVector(builder_.num_qubits()));

    const std::vector<int>& problem = builder_.problem_qubits();
    const std::vector<int> ancillas = builder_.layout().ancilla_qubits();
    const std::size_t dim = std::size_t{1} << builder_.num_qubits();
    energies_.resize(dim);
    if (!config.score_from_ancilla) {
        const std::vector<double> table = qubo_.energy_table();
        for (std::size_t z = 0; z < dim; ++z) energies_[z] = table[sim::extract_bits(z, problem)];
    } else {
        const SplitHamiltonian& h = builder_.hamiltonian();
        std::vector<bool> gates(ancillas.size());
        for (std::size_t z = 0; z < dim; ++z) {
            const std::uint64_t x = sim::extract_bits(z, problem);
            for (std::size_t a = 0; a < ancillas.size(); ++a) gates[a] = ((z >> ancillas[a]) & 1U) != 0;
            energies_[z] = h.hp.evaluate_bits(x) + h.hc.evaluate_bits(x, gates);
        }
    }
}

sim::StateVector Objective::final_state(const ParameterVector& params) const {
    sim::StateVector state = prefix_state_;
    const std::vector<sim::Gate> gates = builder_.layers(params);
    sim::apply_gates(state, gates);
    return state;
}

double Objective::exact_energy(const sim::StateVector& state) const {
    const auto amps = state.amplitudes();
    double e = 0.0;
    for (std::size_t z = 0; z < amps.size(); ++z) e += std::norm(amps[z]) * energies_[z];
    return e;
}

sim::ShotEstimate Objective::shot_energy(const sim::SampleCounts& counts) const {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [key, c] : counts.counts) {
        const double e = energies_.at(key);
        sum += e * static_cast<double>(c);
        sum_sq += e * e * static_cast<double>(c);
    }
    const auto shots = static_cast<double>(counts.shots);
    const double mean = sum / shots;
    const double var = shots > 1 ? std::max(0.0, (sum_sq - shots * mean * mean) / (shots - 1)) : 0.0;
    return {mean, std::sqrt(var / shots)};
}

double Objective::raw_energy(const ParameterVector& params) {
    const sim::StateVector state = final_state(params);
    const std::uint64_t k = counter_++;
    if (config_.estimator == Estimator::Exact) return exact_energy(state);
    const sim::SampleCounts counts = sim::sample(state, config_.shots, splitmix64(sample_seed_ ^ splitmix64(k)));
    return shot_energy(counts).mean;
}

double Objective::operator()(std::span<const double> flat) {
    return (*this)(ParameterVector::unflatten(flat, config_.ansatz.depth, config_.ansatz.zeta_mode));
}

const char* to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::Standard: return "standard";
        case Strategy::TQaoa: return "tqaoa";
        case Strategy::HtQaoa: return "htqaoa";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "standard") return Strategy::Standard;
    if (s == "tqaoa") return Strategy::TQaoa;
    if (s == "htqaoa") return Strategy::HtQaoa;
    throw std::invalid_argument("unknown strategy '" + s + "' (standard|tqaoa|htqaoa)");
}

ParameterVector tqaoa_extend(const ParameterVector& previous) {
    if (previous.depth() < 1) throw std::invalid_argument("tqaoa_extend: empty parameter vector");
    ParameterVector next = previous;
    next.gamma.push_back(previous.gamma.back());
    if (previous.mode == ZetaMode::Independent) next.zeta.push_back(previous.zeta.back());
    next.beta.push_back(0.0);
    return next;
}

ParameterVector htqaoa_interpolate(const ParameterVector& first_layer, int depth) {
    if (first_layer.depth() != 1) throw std::invalid_argument("htqaoa_interpolate: expected a depth-1 vector");
    if (depth < 2) throw std::invalid_argument("htqaoa_interpolate: depth must be at least 2");
    auto ramp = [depth](double a1, double end) {
        std::vector<double> v(static_cast<std::size_t>(depth));
        for (int l = 0; l < depth; ++l) {
            v[static_cast<std::size_t>(l)] = a1 + static_cast<double>(l) / (depth - 1) * (end - a1);
        }
        return v;
    };
    ParameterVector out;
    out.mode = first_layer.mode;
    out.gamma = ramp(first_layer.gamma[0], std::numbers::pi);
    if (first_layer.mode == ZetaMode::Independent) out.zeta = ramp(first_layer.zeta[0], std::numbers::pi);
    out.beta = ramp(first_layer.beta[0], 0.0);
    return out;
}

namespace {

struct RunState {
    const SchedulingInstance& instance;
    const RunOptions& options;
    RunResult result;
    int eval_index = 0;

    // One minimization at `start.depth()`.
    StageRecord minimize(const ParameterVector& start) {
        ObjectiveConfig cfg = options.objective;
        cfg.ansatz.depth = start.depth();
        const int stage = static_cast<int>(result.stages.size());
        Objective objective(instance, cfg, splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(stage) + 1)));
        ScalarFunction f = [&](std::span<const double> flat) {
            const double e = objective(flat);
            ++eval_index;
            if (options.on_evaluation) options.on_evaluation({stage, eval_index, e, flat});
            return e;
        };
        const CobylaResult r = cobyla_minimize(f, start.flatten(), options.optimizer);
        StageRecord rec{start.depth(), start,
                        ParameterVector::unflatten(r.x, start.depth(), start.mode), r.f, r.evaluations,
                        r.converged};
        result.stages.push_back(rec);
        result.evaluations += r.evaluations;
        return rec;
    }

    // Re-evaluates the final parameters and fills the distribution fields.
    void finish(const StageRecord& last) {
        ObjectiveConfig cfg = options.objective;
        cfg.ansatz.depth = last.depth;
        Objective objective(instance, cfg, splitmix64(options.seed ^ 0xF1A1ULL));
        const sim::StateVector state = objective.final_state(last.best);
        result.best_params = last.best;
        result.converged = last.converged;
        const std::vector<int>& problem = objective.builder().problem_qubits();
        result.problem_distribution = sim::marginal_probabilities(state, problem);
        if (cfg.estimator == Estimator::Exact) {
            result.raw_energy = objective.exact_energy(state);
            const auto it = std::max_element(result.problem_distribution.begin(), result.problem_distribution.end());
            result.modal = Assignment::from_bits(static_cast<std::uint64_t>(it - result.problem_distribution.begin()),
                                                 instance.num_vars());
        } else {
            sim::SampleCounts counts = sim::sample(state, cfg.shots, splitmix64(options.seed ^ 0x5A3DULL));
            result.raw_energy = objective.shot_energy(counts).mean;
            std::vector<std::uint64_t> tally(result.problem_distribution.size(), 0);
            for (const auto& [key, c] : counts.counts) tally[sim::extract_bits(key, problem)] += c;
            const auto it = std::max_element(tally.begin(), tally.end());
            result.modal = Assignment::from_bits(static_cast<std::uint64_t>(it - tally.begin()), instance.num_vars());
            result.counts = std::move(counts);
        }
        result.e_norm = normalize_energy(result.raw_energy, objective.bounds());
        result.modal_energy = objective.qubo().evaluate(result.modal);
    }
};

template <class Body>
RunResult timed_run(Strategy strategy, const SchedulingInstance& instance, const RunOptions& options, Body body) {
    options.optimizer.validate();
    if (options.objective.ansatz.depth < 1) throw std::invalid_argument("run: depth must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();
    RunState state{instance, options, {}, 0};
    state.result.strategy = strategy;
    state.result.seed = options.seed;
    std::mt19937_64 rng(options.seed);
    state.finish(body(state, rng));
    state.result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return state.result;
}

}  // namespace

RunResult strategy_standard(const SchedulingInstance& instance, const RunOptions& options) {
    return timed_run(Strategy::Standard, instance, options, [&](RunState& s, std::mt19937_64& rng) {
        const auto& a = options.objective.ansatz;
        return s.minimize(init_random_params(a.depth, a.zeta_mode, rng));
    });
}

RunResult strategy_tqaoa(const SchedulingInstance& instance, const RunOptions& options) {
    return timed_run(Strategy::TQaoa, instance, options, [&](RunState& s, std::mt19937_64& rng) {
        const auto& a = options.objective.ansatz;
        StageRecord rec = s.minimize(init_random_params(1, a.zeta_mode, rng));
        for (int depth = 2; depth <= a.depth; ++depth) rec = s.minimize(tqaoa_extend(rec.best));
        return rec;
    });
}

RunResult strategy_htqaoa(const SchedulingInstance& instance, const RunOptions& options) {
    if (options.objective.ansatz.depth < 2) throw std::invalid_argument("htqaoa: depth must be at least 2");
    return timed_run(Strategy::HtQaoa, instance, options, [&](RunState& s, std::mt19937_64& rng) {
        const auto& a = options.objective.ansatz;
        const StageRecord first = s.minimize(init_random_params(1, a.zeta_mode, rng));
        return s.minimize(htqaoa_interpolate(first.best, a.depth));
    });
}

RunResult run_strategy(Strategy strategy, const SchedulingInstance& instance, const RunOptions& options) {
    switch (strategy) {
        case Strategy::Standard: return strategy_standard(instance, options);
        case Strategy::TQaoa: return strategy_tqaoa(instance, options);
        case Strategy::HtQaoa: return strategy_htqaoa(instance, options);
    }
    throw std::invalid_argument("run_strategy: unknown strategy");
}

}  // namespace qtis
