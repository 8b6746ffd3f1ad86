// Copyright 2026 The mblmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mblmc/mcmc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mblmc {

void ChainConfig::validate() const {
    floquet.validate();
    integrator.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("ChainConfig.beta must be > 0");
    if (max_iters < 1) throw std::invalid_argument("ChainConfig.max_iters must be >= 1");
    if (estimator.kind == EstimatorMode::Kind::shots && estimator.shots < 1) {
        throw std::invalid_argument("ChainConfig.estimator: shots mode needs K >= 1");
    }
}

Decision metropolis_decide(double current_weight, double proposal_weight, Rng& rng) {
    if (!(current_weight > 0.0) || !(proposal_weight > 0.0)) {
        throw std::domain_error("metropolis_decide: weights must be positive (observable not positive-definite)");
    }
    const double q = proposal_weight / current_weight;
    if (q >= 1.0) return {true, q};
    return {rng.uniform() < q, q};
}

double estimate_weight(const QuantumState& state, const GibbsObservable& obs, const EstimatorMode& mode, Rng& rng) {
    if (state.dim() != obs.diag_cache.size()) throw std::invalid_argument("estimate_weight: dimension mismatch");
    if (mode.kind == EstimatorMode::Kind::exact) return expectation_diagonal(state, obs.diag_cache);
    if (mode.shots < 1) throw std::invalid_argument("estimate_weight: shots mode needs K >= 1");
    const auto samples = sample_indices(state, mode.shots, rng);
    double sum = 0.0;
    for (auto b : samples) sum += obs.diag_cache[b];
    const double estimate = sum / static_cast<double>(mode.shots);
    if (!(estimate > 0.0)) {
        throw std::domain_error("estimate_weight: all " + std::to_string(mode.shots) +
                                " sampled weights underflow to 0; beta is too large for this shot count");
    }
    return estimate;
}

double observable_variance(const QuantumState& state, const GibbsObservable& obs) {
    if (state.dim() != obs.diag_cache.size()) throw std::invalid_argument("observable_variance: dimension mismatch");
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        const double p = std::norm(state[b]);
        m1 += p * obs.diag_cache[b];
        m2 += p * obs.diag_cache[b] * obs.diag_cache[b];
    }
    return std::max(0.0, m2 - m1 * m1);
}

double gibbs_variance_bound(double beta, double e_min) { return std::exp(-2.0 * beta * e_min); }

ChainTrace run_chain(const ChainConfig& cfg, const GibbsObservable& obs, std::span<const Bitstring> solutions,
                     const ChainObserver& observer) {
    cfg.validate();
    const int n = cfg.floquet.n_qubits;
    if (obs.diag_cache.size() != (std::size_t{1} << n)) {
        throw std::invalid_argument("run_chain: observable dimension does not match FloquetParams.n_qubits");
    }
    if (obs.beta != cfg.beta) throw std::invalid_argument("run_chain: observable beta differs from ChainConfig.beta");
    std::vector<std::uint64_t> solution_idx;
    for (const auto& s : solutions) {
        if (s.size() != n) throw std::invalid_argument("run_chain: solution length mismatch");
        solution_idx.push_back(s.index());
    }

    const QuantumState initial(n);
    QuantumState current = initial;
    std::vector<std::uint64_t> accepted_seeds;

    auto replay = [&]() {
        QuantumState s = initial;
        for (auto seed : accepted_seeds) {
            Rng rng(seed);
            s = apply_period(s, cfg.floquet, draw_disorder(cfg.floquet, rng), cfg.integrator);
        }
        return s;
    };

    Rng init_rng(derive_seed(cfg.master_seed, 0, Stream::shots));
    double current_weight = estimate_weight(current, obs, cfg.estimator, init_rng);
    double current_cost = expectation_diagonal(current, obs.energies);
    double current_mass = solution_mass(current, solution_idx);

    ChainTrace trace;
    trace.config = cfg;
    trace.records.reserve(static_cast<std::size_t>(cfg.max_iters));
    std::size_t n_accepted = 0;

    for (int i = 1; i <= cfg.max_iters; ++i) {
        if (cfg.replay == ReplayMode::full_replay) current = replay();

        IterationRecord rec;
        rec.index = i;
        rec.disorder_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i), Stream::disorder);
        Rng disorder_rng(rec.disorder_seed);
        const auto h = draw_disorder(cfg.floquet, disorder_rng);

        IntegrationReport report;
        QuantumState proposal = apply_period(current, cfg.floquet, h, cfg.integrator, false, &report);
        rec.integrator_steps = report.steps;

        Rng shot_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i), Stream::shots));
        rec.proposal_weight = estimate_weight(proposal, obs, cfg.estimator, shot_rng);
        rec.current_weight = current_weight;
        rec.proposal_cost_expectation = expectation_diagonal(proposal, obs.energies);

        Rng decide_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i), Stream::metropolis));
        const Decision d = metropolis_decide(current_weight, rec.proposal_weight, decide_rng);
        rec.metropolis_ratio_q = d.q;
        rec.accepted = d.accepted;

        if (d.accepted) {
            ++n_accepted;
            current = std::move(proposal);
            current_weight = rec.proposal_weight;
            current_cost = rec.proposal_cost_expectation;
            current_mass = solution_mass(current, solution_idx);
            accepted_seeds.push_back(rec.disorder_seed);
        }
        rec.post_cost_expectation = current_cost;
        rec.post_solution_mass = current_mass;
        trace.records.push_back(rec);
        if (observer) observer(rec, current);
    }

    trace.acceptance_rate = static_cast<double>(n_accepted) / static_cast<double>(trace.records.size());
    trace.final_state = (cfg.replay == ReplayMode::full_replay) ? replay() : std::move(current);
    return trace;
}

double best_solution_mass(const ChainTrace& trace, std::size_t length) {
    if (trace.records.empty()) throw std::invalid_argument("best_solution_mass: empty trace");
    const std::size_t end = (length == 0) ? trace.records.size() : std::min(length, trace.records.size());
    double best = 0.0;
    for (std::size_t i = 0; i < end; ++i) best = std::max(best, trace.records[i].post_solution_mass);
    return best;
}

double success_probability(double p_star, std::uint64_t shot_budget) {
    if (!(p_star >= 0.0 && p_star <= 1.0)) throw std::invalid_argument("success_probability: p* must be in [0, 1]");
    if (shot_budget < 1) throw std::invalid_argument("success_probability: shot budget must be >= 1");
    if (p_star >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(shot_budget) * std::log1p(-p_star));
}

double success_probability(const ChainTrace& trace, std::uint64_t shot_budget) {
    return success_probability(best_solution_mass(trace), shot_budget);
}

std::uint64_t required_shots(double sigma_sq, double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("required_shots: epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_shots: delta must be in (0, 1)");
    if (sigma_sq < 0.0) throw std::invalid_argument("required_shots: variance must be >= 0");
    const double k = sigma_sq / (epsilon * epsilon * delta);
    // Absorb representation error in products like 0.1^2 so exact ratios stay exact.
    return static_cast<std::uint64_t>(std::ceil(k * (1.0 - 1e-12)));
}

double mixing_time_lower_bound(double acceptance_T, double epsilon) {
    if (!(acceptance_T > 0.0)) throw std::domain_error("mixing_time_lower_bound: acceptance T = 0 gives no finite bound");
    if (acceptance_T > 1.0) throw std::invalid_argument("mixing_time_lower_bound: acceptance T must be <= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("mixing_time_lower_bound: epsilon in (0, 1)");
    return std::log(1.0 / epsilon) * (1.0 / acceptance_T - 1.0);
}

std::map<double, double> cost_histogram(const QuantumState& state, const KBodyHamiltonian& H) {
    if (H.n_qubits() != state.n_qubits()) throw std::invalid_argument("cost_histogram: dimension mismatch");
    return cost_histogram(state, diagonal(H));
}

std::map<double, double> cost_histogram(const QuantumState& state, std::span<const double> energies) {
    if (energies.size() != state.dim()) throw std::invalid_argument("cost_histogram: dimension mismatch");
    std::map<double, double> bins;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        const double p = std::norm(state[b]);
        if (p == 0.0) continue;
        // Merge costs that differ only by rounding.
        bins[std::round(energies[b] * 1e9) / 1e9] += p;
    }
    return bins;
}

}  // namespace mblmc
