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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "mblmc/cost.hpp"
#include "mblmc/floquet.hpp"
#include "mblmc/qstate.hpp"
#include "mblmc/rng.hpp"

namespace mblmc {

/// How <psi|O|psi> is obtained inside the accept/reject step.
struct EstimatorMode {
    enum class Kind { exact, shots };
    Kind kind = Kind::exact;
    std::size_t shots = 0;

    static EstimatorMode exact() { return {}; }
    static EstimatorMode with_shots(std::size_t k) { return {Kind::shots, k}; }
};

/// cached_state keeps the current state in memory; full_replay rebuilds it
/// from |0...0> by re-applying every accepted period, as hardware must.
enum class ReplayMode { cached_state, full_replay };

struct ChainConfig {
    FloquetParams floquet;
    IntegratorConfig integrator;
    double beta = 1.0;
    int max_iters = 1;
    EstimatorMode estimator;
    ReplayMode replay = ReplayMode::cached_state;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct IterationRecord {
    int index = 0;  // 1-based; rejected proposals count
    double proposal_cost_expectation = 0.0;
    double proposal_weight = 0.0;
    double current_weight = 0.0;
    double metropolis_ratio_q = 0.0;
    bool accepted = false;
    double post_cost_expectation = 0.0;
    double post_solution_mass = 0.0;
    std::uint64_t disorder_seed = 0;
    int integrator_steps = 0;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct ChainTrace {
    ChainConfig config;
    std::vector<IterationRecord> records;
    double acceptance_rate = 0.0;
    QuantumState final_state{1};
};

struct Decision {
    bool accepted = false;
    double q = 0.0;
};

/// q = proposal / current. Accepts when q >= 1, otherwise when a uniform
/// draw falls below q.
Decision metropolis_decide(double current_weight, double proposal_weight, Rng& rng);

/// <psi|O|psi>, exactly or as the mean of O over K Born samples.
double estimate_weight(const QuantumState& state, const GibbsObservable& obs, const EstimatorMode& mode, Rng& rng);

/// Variance of O in the Born distribution of state.
double observable_variance(const QuantumState& state, const GibbsObservable& obs);

/// exp(-2 beta E_min): bound on the variance of exp(-beta H) for unshifted energies.
double gibbs_variance_bound(double beta, double e_min);

/// Called after every iteration with the record and the chain's current state.
using ChainObserver = std::function<void(const IterationRecord&, const QuantumState&)>;

ChainTrace run_chain(const ChainConfig& cfg, const GibbsObservable& obs, std::span<const Bitstring> solutions,
                     const ChainObserver& observer = {});

/// Largest post_solution_mass among the first `length` records (all when 0).
double best_solution_mass(const ChainTrace& trace, std::size_t length = 0);

/// 1 - (1 - p)^budget.
double success_probability(double p_star, std::uint64_t shot_budget);
double success_probability(const ChainTrace& trace, std::uint64_t shot_budget);

/// Smallest K with sigma^2 / (K epsilon^2) <= delta.
std::uint64_t required_shots(double sigma_sq, double epsilon, double delta);

/// ln(1/epsilon) (1/T - 1) with the acceptance rate standing in for T.
double mixing_time_lower_bound(double acceptance_T, double epsilon);

/// Born probability aggregated by cost value. Unoccupied levels are omitted.
std::map<double, double> cost_histogram(const QuantumState& state, const KBodyHamiltonian& H);
std::map<double, double> cost_histogram(const QuantumState& state, std::span<const double> energies);

}  // namespace mblmc
