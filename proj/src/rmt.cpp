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

#include "mblmc/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>

#include "mblmc/parallel.hpp"

namespace mblmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-11;

template <typename F>
double integrate(F&& f, double a, double b) {
    if (b <= a) return 0.0;
    double err = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadratureTolerance, &err);
    if (!std::isfinite(value) || err > 1e-8 * std::max(1.0, std::abs(value))) {
        std::ostringstream msg;
        msg << "quadrature failed on [" << a << ", " << b << "]: estimate " << value << ", error " << err;
        throw std::runtime_error(msg.str());
    }
    return value;
}

void require_unit_interval(double r, const char* fn) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::domain_error(std::string(fn) + ": r = " + std::to_string(r) + " outside [0, 1]");
    }
}

// Joint density of two adjacent gaps (x, y) of three points on the circle is
// proportional to (sin(x/2) sin(y/2) sin((x+y)/2))^2. Fixing r = x/y gives
// x = r y with Jacobian y, and y ranges over [0, 2 pi / (1 + r)].
double cue_unnormalized(double r) {
    auto integrand = [r](double y) {
        const double s = std::sin(0.5 * r * y) * std::sin(0.5 * y) * std::sin(0.5 * (1.0 + r) * y);
        return y * s * s;
    };
    return integrate(integrand, 0.0, kTwoPi / (1.0 + r));
}

double cue_normalization() {
    static const double norm = integrate(cue_unnormalized, 0.0, 1.0);
    return norm;
}

void check_edges(const BinnedDistribution& P, const BinnedDistribution& Q) {
    if (P.bin_edges.size() != Q.bin_edges.size()) throw std::invalid_argument("js_distance: bin counts differ");
    for (std::size_t i = 0; i < P.bin_edges.size(); ++i) {
        if (std::abs(P.bin_edges[i] - Q.bin_edges[i]) > 1e-12) {
            throw std::invalid_argument("js_distance: bin edges differ");
        }
    }
}

std::vector<double> equal_edges(int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("histogram: n_bins must be >= 1");
    std::vector<double> e(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) e[static_cast<std::size_t>(i)] = static_cast<double>(i) / n_bins;
    return e;
}

}  // namespace

double LevelSpacingSample::mean() const {
    if (r_values.empty()) throw std::invalid_argument("LevelSpacingSample::mean: empty sample");
    double s = 0.0;
    for (double r : r_values) s += r;
    return s / static_cast<double>(r_values.size());
}

void LevelSpacingSample::append(const LevelSpacingSample& other) {
    r_values.insert(r_values.end(), other.r_values.begin(), other.r_values.end());
}

void BinnedDistribution::validate() const {
    if (bin_edges.size() != masses.size() + 1 || masses.empty()) {
        throw std::invalid_argument("BinnedDistribution: need n_bins + 1 edges");
    }
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (!(bin_edges[i] > bin_edges[i - 1])) throw std::invalid_argument("BinnedDistribution: edges not increasing");
    }
    double total = 0.0;
    for (double m : masses) {
        if (m < 0.0) throw std::invalid_argument("BinnedDistribution: negative mass");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("BinnedDistribution: masses do not sum to 1");
}

std::vector<double> eigenphases(const Eigen::MatrixXcd& U, double unitarity_tolerance) {
    if (U.rows() != U.cols() || U.rows() == 0) throw std::invalid_argument("eigenphases: matrix must be square");
    const double dev =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
    if (!(dev <= unitarity_tolerance)) {
        std::ostringstream msg;
        msg << "eigenphases: matrix is not unitary (max |U^dag U - I| = " << dev << ")";
        throw std::invalid_argument(msg.str());
    }
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U, /*computeU=*/false);
    if (schur.info() != Eigen::Success) throw std::runtime_error("eigenphases: Schur decomposition failed");
    const auto& T = schur.matrixT();
    std::vector<double> phases(static_cast<std::size_t>(U.rows()));
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        double th = std::arg(T(i, i));
        if (th < 0.0) th += kTwoPi;
        if (th >= kTwoPi) th -= kTwoPi;
        phases[static_cast<std::size_t>(i)] = th;
    }
    std::sort(phases.begin(), phases.end());
    return phases;
}

LevelSpacingSample r_statistics(std::span<const double> sorted_phases) {
    const std::size_t d = sorted_phases.size();
    if (d < 3) throw std::invalid_argument("r_statistics: need at least 3 phases");
    std::vector<double> gaps(d);
    for (std::size_t n = 0; n + 1 < d; ++n) {
        gaps[n] = sorted_phases[n + 1] - sorted_phases[n];
        if (gaps[n] < 0.0) throw std::invalid_argument("r_statistics: phases must be sorted");
    }
    gaps[d - 1] = kTwoPi - (sorted_phases[d - 1] - sorted_phases[0]);
    LevelSpacingSample out;
    out.r_values.resize(d);
    for (std::size_t n = 0; n < d; ++n) {
        const double a = gaps[n];
        const double b = gaps[(n + 1) % d];
        const double hi = std::max(a, b);
        out.r_values[n] = hi > 0.0 ? std::min(a, b) / hi : 0.0;
    }
    return out;
}

double poisson_pdf(double r) {
    require_unit_interval(r, "poisson_pdf");
    return 2.0 / ((1.0 + r) * (1.0 + r));
}

double poisson_bin_mass(double lo, double hi) {
    require_unit_interval(lo, "poisson_bin_mass");
    require_unit_interval(hi, "poisson_bin_mass");
    return 2.0 * (1.0 / (1.0 + lo) - 1.0 / (1.0 + hi));
}

double cue_pdf(double r) {
    require_unit_interval(r, "cue_pdf");
    return cue_unnormalized(r) / cue_normalization();
}

double cue_bin_mass(double lo, double hi) {
    require_unit_interval(lo, "cue_bin_mass");
    require_unit_interval(hi, "cue_bin_mass");
    return integrate(cue_unnormalized, lo, hi) / cue_normalization();
}

double cue_mean_r() {
    static const double mean = integrate([](double r) { return r * cue_unnormalized(r); }, 0.0, 1.0) /
                               cue_normalization();
    return mean;
}

BinnedDistribution histogram(const LevelSpacingSample& sample, int n_bins) {
    if (sample.r_values.empty()) throw std::invalid_argument("histogram: empty sample");
    BinnedDistribution h;
    h.bin_edges = equal_edges(n_bins);
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
    for (double r : sample.r_values) {
        require_unit_interval(r, "histogram");
        auto bin = static_cast<std::size_t>(r * n_bins);
        ++counts[std::min(bin, counts.size() - 1)];
    }
    h.masses.resize(counts.size());
    const auto total = static_cast<double>(sample.r_values.size());
    for (std::size_t i = 0; i < counts.size(); ++i) h.masses[i] = static_cast<double>(counts[i]) / total;
    return h;
}

BinnedDistribution reference_distribution(ReferenceDensity kind, int n_bins) {
    BinnedDistribution h;
    h.bin_edges = equal_edges(n_bins);
    h.masses.resize(static_cast<std::size_t>(n_bins));
    double total = 0.0;
    for (std::size_t i = 0; i < h.masses.size(); ++i) {
        const double lo = h.bin_edges[i];
        const double hi = h.bin_edges[i + 1];
        h.masses[i] = kind == ReferenceDensity::poisson ? poisson_bin_mass(lo, hi) : cue_bin_mass(lo, hi);
        total += h.masses[i];
    }
    // Remove the last ulps of quadrature error so the masses sum to 1.
    for (double& m : h.masses) m /= total;
    return h;
}

double js_distance(const BinnedDistribution& P, const BinnedDistribution& Q) {
    check_edges(P, Q);
    auto kl_term = [](double p, double a) { return p > 0.0 ? p * std::log(p / a) : 0.0; };
    double js = 0.0;
    for (std::size_t i = 0; i < P.masses.size(); ++i) {
        const double p = P.masses[i];
        const double q = Q.masses[i];
        const double a = 0.5 * (p + q);
        js += 0.5 * (kl_term(p, a) + kl_term(q, a));
    }
    return std::sqrt(std::max(0.0, js));
}

std::map<int, LevelSpacingSample> product_ensemble_sweep(const FloquetParams& params, const IntegratorConfig& cfg,
                                                         std::span<const int> Ms, int ensemble_size,
                                                         std::uint64_t seed, int workers) {
    params.validate();
    cfg.validate();
    if (params.n_qubits > 10) throw std::invalid_argument("product_ensemble: n_qubits must be <= 10");
    if (params.n_qubits < 2) throw std::invalid_argument("product_ensemble: need at least 2 qubits (4 phases)");
    if (ensemble_size < 1) throw std::invalid_argument("product_ensemble: ensemble_size must be >= 1");
    if (Ms.empty()) throw std::invalid_argument("product_ensemble: no product lengths given");
    for (int M : Ms) {
        if (M < 1) throw std::invalid_argument("product_ensemble: M must be >= 1");
    }
    const int max_M = *std::max_element(Ms.begin(), Ms.end());

    // per_member[m][M] holds member m's statistics for product length M.
    std::vector<std::map<int, LevelSpacingSample>> per_member(static_cast<std::size_t>(ensemble_size));
    parallel_for(per_member.size(), workers, [&](std::size_t m) {
        const Eigen::Index dim = Eigen::Index{1} << params.n_qubits;
        Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(dim, dim);
        for (int j = 1; j <= max_M; ++j) {
            Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j)}));
            const auto h = draw_disorder(params, rng);
            product = product * floquet_propagator(params, h, cfg);
            if (std::find(Ms.begin(), Ms.end(), j) != Ms.end()) {
                // Per-factor tolerance accumulates linearly in the product.
                const double tol = std::max(1e-8, 10.0 * j * cfg.tolerance);
                per_member[m][j] = r_statistics(eigenphases(product, tol));
            }
        }
    });

    std::map<int, LevelSpacingSample> pooled;
    for (int M : Ms) pooled[M];
    for (const auto& member : per_member) {
        for (const auto& [M, sample] : member) pooled[M].append(sample);
    }
    return pooled;
}

LevelSpacingSample product_ensemble(const FloquetParams& params, const IntegratorConfig& cfg, int M,
                                    int ensemble_size, std::uint64_t seed, int workers) {
    const int Ms[] = {M};
    return product_ensemble_sweep(params, cfg, Ms, ensemble_size, seed, workers).at(M);
}

Eigen::MatrixXcd haar_unitary(Eigen::Index dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("haar_unitary: dimension must be >= 1");
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd A(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            const double re = gauss(rng.engine());
            const double im = gauss(rng.engine());
            A(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
    const Eigen::MatrixXcd& R = qr.matrixQR();
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Complex d = R(i, i);
        const double mag = std::abs(d);
        Q.col(i) *= mag > 0.0 ? d / mag : Complex(1.0);
    }
    return Q;
}

LevelSpacingSample haar_ensemble(Eigen::Index dim, int ensemble_size, std::uint64_t seed, int workers) {
    if (ensemble_size < 1) throw std::invalid_argument("haar_ensemble: ensemble_size must be >= 1");
    std::vector<LevelSpacingSample> members(static_cast<std::size_t>(ensemble_size));
    parallel_for(members.size(), workers, [&](std::size_t m) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(Stream::ensemble)}));
        members[m] = r_statistics(eigenphases(haar_unitary(dim, rng)));
    });
    LevelSpacingSample pooled;
    for (const auto& m : members) pooled.append(m);
    return pooled;
}

}  // namespace mblmc
