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

#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mblmc/qstate.hpp"
#include "mblmc/rng.hpp"

namespace mblmc {

/// Disordered, periodically driven transverse-field Ising chain
///
///   H(t) = sum_i h_i Z_i + B(t) sum_i X_i + J sum_i Z_i Z_{i+1},
///   B(t) = B0 + deltaB cos(omega t),
///
/// with open boundaries and h_i ~ U[-W/2, W/2].
struct FloquetParams {
    int n_qubits = 1;
    double J = 4.15;
    double B0 = 1.25 * 4.15;
    double deltaB = -1.25 * 4.15;
    double omega = 10.0 * 4.15;
    double W = 200.0 * 4.15;

    /// Drive parameters in units of J: B0 = -deltaB = 1.25 J, omega = 10 J,
    /// W = w_over_j * J.
    static FloquetParams with_defaults(int n_qubits, double w_over_j, double J = 4.15);

    double period() const { return 2.0 * std::numbers::pi / omega; }
    double transverse_field(double t) const;
    /// Flips the sign of J, B0 and deltaB. Together with negated disorder this
    /// generates the inverse one-period map.
    FloquetParams negated() const;
    void validate() const;
};

struct DisorderRealization {
    std::vector<double> h;

    DisorderRealization negated() const;
};

struct IntegratorConfig {
    int steps_per_period = 256;
    double tolerance = 1e-8;
    /// Step-doubling budget; exceeding it raises ConvergenceError.
    int max_steps = 1 << 20;

    void validate() const;
};

/// Outcome of an adaptive integration.
struct IntegrationReport {
    int steps = 0;
    double last_change = 0.0;
};

class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Weighted Pauli string; factors are (qubit, 'X' | 'Z').
struct PauliTerm {
    double coefficient = 0.0;
    std::vector<std::pair<int, char>> factors;

    std::string label() const;
};

/// Neutral-atom control parameters reproducing the chain Hamiltonian.
struct RydbergParams {
    double spacing_a = 0.0;        // um
    double omega_drive_max = 0.0;  // rad/us
    double omega_drive_min = 0.0;  // rad/us
    std::vector<double> detunings; // rad/us
    double c6 = 0.0;               // rad um^6 / us
};

DisorderRealization draw_disorder(const FloquetParams& params, Rng& rng);

std::vector<PauliTerm> hamiltonian_at(const FloquetParams& params, const DisorderRealization& h, double t);

/// Diagonal part sum_i h_i z_i + J sum_i z_i z_{i+1} evaluated on every basis index.
std::vector<double> diagonal_energies(const FloquetParams& params, const DisorderRealization& h);

/// Dense H(t), for tests and small systems.
Eigen::MatrixXcd hamiltonian_matrix(const FloquetParams& params, const DisorderRealization& h, double t);

inline constexpr int kMaxDenseQubits = 12;

/// One-period propagator at a fixed number of Strang steps.
Eigen::MatrixXcd floquet_propagator_fixed(const FloquetParams& params, const DisorderRealization& h, int steps);

/// One-period propagator, refined by step doubling until the max-entry change
/// between successive refinements drops below cfg.tolerance.
Eigen::MatrixXcd floquet_propagator(const FloquetParams& params, const DisorderRealization& h,
                                    const IntegratorConfig& cfg, IntegrationReport* report = nullptr);

/// Matrix-free one-period evolution at a fixed step count. With inverse = true
/// the sign-flipped Hamiltonian is used, which inverts the forward map exactly
/// at equal step count.
QuantumState apply_period_fixed(const QuantumState& state, const FloquetParams& params,
                                const DisorderRealization& h, int steps, bool inverse = false);

QuantumState apply_period(const QuantumState& state, const FloquetParams& params, const DisorderRealization& h,
                          const IntegratorConfig& cfg, bool inverse = false, IntegrationReport* report = nullptr);

RydbergParams map_to_rydberg(const FloquetParams& params, const DisorderRealization& h, double c6);

}  // namespace mblmc
