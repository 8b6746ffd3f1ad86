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
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mblmc/floquet.hpp"
#include "mblmc/rng.hpp"

namespace mblmc {

/// Consecutive-gap ratios r = min(d_n, d_n+1) / max(d_n, d_n+1).
struct LevelSpacingSample {
    std::vector<double> r_values;

    double mean() const;
    void append(const LevelSpacingSample& other);
};

struct BinnedDistribution {
    std::vector<double> bin_edges;  // n_bins + 1, strictly increasing
    std::vector<double> masses;     // n_bins, sum to 1

    std::size_t n_bins() const { return masses.size(); }
    void validate() const;
};

inline constexpr int kDefaultSpacingBins = 20;

/// Eigenvalue phases of a unitary, sorted, in [0, 2 pi).
std::vector<double> eigenphases(const Eigen::MatrixXcd& U, double unitarity_tolerance = 1e-8);

/// Gaps are taken cyclically (the wrap-around gap closes the circle), so d
/// phases give d gaps and d ratios. Degenerate gaps contribute r = 0.
LevelSpacingSample r_statistics(std::span<const double> sorted_phases);

/// 2 / (1 + r)^2.
double poisson_pdf(double r);
double poisson_bin_mass(double lo, double hi);

/// Three-level circular-ensemble density of r, normalized on [0, 1].
double cue_pdf(double r);
double cue_bin_mass(double lo, double hi);

/// Mean of r under the CUE density.
double cue_mean_r();
inline double poisson_mean_r() { return 2.0 * 0.6931471805599453 - 1.0; }

enum class ReferenceDensity { poisson, cue };

/// Equal-width histogram over [0, 1]; r = 1 falls in the last bin.
BinnedDistribution histogram(const LevelSpacingSample& sample, int n_bins = kDefaultSpacingBins);
/// Reference density integrated exactly over each equal-width bin.
BinnedDistribution reference_distribution(ReferenceDensity kind, int n_bins = kDefaultSpacingBins);

/// sqrt((KL(P, A) + KL(Q, A)) / 2), A = (P + Q) / 2, natural log.
double js_distance(const BinnedDistribution& P, const BinnedDistribution& Q);

/// Pooled r statistics of products U_1 ... U_M of independently disordered
/// one-period propagators, one product per ensemble member.
LevelSpacingSample product_ensemble(const FloquetParams& params, const IntegratorConfig& cfg, int M,
                                    int ensemble_size, std::uint64_t seed, int workers = 1);

/// Same as product_ensemble for several M at once: each member draws
/// max(Ms) factors and the statistics for every M come from its prefix
/// products. Members remain independent, so each M is an i.i.d. ensemble.
std::map<int, LevelSpacingSample> product_ensemble_sweep(const FloquetParams& params, const IntegratorConfig& cfg,
                                                         std::span<const int> Ms, int ensemble_size,
                                                         std::uint64_t seed, int workers = 1);

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal moved into Q.
Eigen::MatrixXcd haar_unitary(Eigen::Index dim, Rng& rng);

LevelSpacingSample haar_ensemble(Eigen::Index dim, int ensemble_size, std::uint64_t seed, int workers = 1);

}  // namespace mblmc
