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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mblmc/rmt.hpp"

namespace mblmc {
namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson rule, independent of the library's quadrature.
template <typename F>
double simpson(F&& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Mass of the three-point circle density on {x <= r y} for r in [lo, hi],
// from a midpoint grid over the (x, y) triangle. No delta function is resolved.
std::vector<double> cue_grid_masses(int n_bins, int grid = 1500) {
    std::vector<double> mass(static_cast<std::size_t>(n_bins), 0.0);
    const double h = 2.0 * kPi / grid;
    double total = 0.0;
    for (int i = 0; i < grid; ++i) {
        double x = (i + 0.5) * h;
        for (int j = 0; j < grid; ++j) {
            double y = (j + 0.5) * h;
            if (x + y >= 2.0 * kPi) break;
            double s = std::sin(x / 2) * std::sin(y / 2) * std::sin((x + y) / 2);
            double w = s * s;
            double r = std::min(x, y) / std::max(x, y);
            auto b = std::min(static_cast<std::size_t>(r * n_bins), mass.size() - 1);
            mass[b] += w;
            total += w;
        }
    }
    for (double& m : mass) m /= total;
    return mass;
}

TEST(Eigenphases, Identity) {
    for (double th : eigenphases(Eigen::MatrixXcd::Identity(8, 8))) EXPECT_NEAR(th, 0.0, 1e-14);
}

TEST(Eigenphases, DiagonalPhases) {
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(3, 3);
    U(0, 0) = 1.0;
    U(1, 1) = Complex(0.0, 1.0);
    U(2, 2) = -1.0;
    auto th = eigenphases(U);
    ASSERT_EQ(th.size(), 3u);
    EXPECT_NEAR(th[0], 0.0, 1e-14);
    EXPECT_NEAR(th[1], kPi / 2, 1e-14);
    EXPECT_NEAR(th[2], kPi, 1e-14);
}

TEST(Eigenphases, FloquetEigenvaluesSatisfyResidualCheck) {
    Rng rng(1);
    FloquetParams p = FloquetParams::with_defaults(4, 20.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-7;
    Eigen::MatrixXcd U = floquet_propagator(p, draw_disorder(p, rng), cfg);
    auto th = eigenphases(U);
    ASSERT_EQ(th.size(), 16u);
    for (double t : th) {
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, 2 * kPi);
        // e^{i theta} must be an eigenvalue: U - e^{i theta} I is singular.
        Eigen::MatrixXcd A = U - std::polar(1.0, t) * Eigen::MatrixXcd::Identity(16, 16);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        EXPECT_LT(svd.singularValues().minCoeff(), 1e-9);
    }
}

TEST(Eigenphases, RejectsNonUnitary) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(4, 4) * 1.01;
    EXPECT_THROW(eigenphases(A), std::invalid_argument);
    EXPECT_THROW(eigenphases(Eigen::MatrixXcd::Identity(2, 3)), std::invalid_argument);
}

TEST(RStatistics, EquallySpacedGivesOne) {
    std::vector<double> th;
    for (int k = 0; k < 16; ++k) th.push_back(2 * kPi * k / 16);
    auto s = r_statistics(th);
    ASSERT_EQ(s.r_values.size(), 16u);
    for (double r : s.r_values) EXPECT_NEAR(r, 1.0, 1e-12);
}

TEST(RStatistics, AlternatingGapsGiveHalf) {
    std::vector<double> th{0.0};
    double unit = 2 * kPi / 15.0;  // five pairs of gaps (1, 2)
    for (int k = 0; k < 9; ++k) th.push_back(th.back() + (k % 2 == 0 ? unit : 2 * unit));
    auto s = r_statistics(th);
    for (double r : s.r_values) EXPECT_NEAR(r, 0.5, 1e-12);
}

TEST(RStatistics, PoissonProcessMean) {
    Rng rng(2);
    LevelSpacingSample pooled;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> th(1000);
        for (double& t : th) t = rng.uniform(0.0, 2 * kPi);
        std::sort(th.begin(), th.end());
        pooled.append(r_statistics(th));
    }
    ASSERT_EQ(pooled.r_values.size(), 100000u);
    double oracle = simpson([](double r) { return r * 2.0 / ((1 + r) * (1 + r)); }, 0.0, 1.0);
    EXPECT_NEAR(oracle, 2 * std::log(2.0) - 1, 1e-12);
    EXPECT_NEAR(pooled.mean(), oracle, 0.005);
}

TEST(RStatistics, Errors) {
    std::vector<double> two{0.0, 1.0};
    EXPECT_THROW(r_statistics(two), std::invalid_argument);
    std::vector<double> unsorted{0.0, 2.0, 1.0};
    EXPECT_THROW(r_statistics(unsorted), std::invalid_argument);
}

TEST(RStatistics, DegenerateGapGivesZero) {
    std::vector<double> th{0.0, 1.0, 1.0, 3.0};
    auto s = r_statistics(th);
    EXPECT_EQ(s.r_values[0], 0.0);
    EXPECT_EQ(s.r_values[1], 0.0);
    for (double r : s.r_values) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(PoissonPdf, ValuesAndNormalization) {
    EXPECT_EQ(poisson_pdf(0.0), 2.0);
    EXPECT_EQ(poisson_pdf(1.0), 0.5);
    EXPECT_NEAR(simpson(poisson_pdf, 0.0, 1.0), 1.0, 1e-10);
    EXPECT_NEAR(poisson_bin_mass(0.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(poisson_mean_r(), 0.3863, 1e-4);
    EXPECT_THROW(poisson_pdf(1.5), std::domain_error);
    EXPECT_THROW(poisson_pdf(-0.1), std::domain_error);
}

TEST(CuePdf, VanishesAtZero) { EXPECT_NEAR(cue_pdf(0.0), 0.0, 1e-15); }

TEST(CuePdf, Normalized) {
    EXPECT_NEAR(simpson(cue_pdf, 0.0, 1.0, 400), 1.0, 1e-6);
    EXPECT_NEAR(cue_bin_mass(0.0, 1.0), 1.0, 1e-10);
    EXPECT_THROW(cue_pdf(1.01), std::domain_error);
}

TEST(CuePdf, MeanInExpectedRange) {
    EXPECT_GE(cue_mean_r(), 0.58);
    EXPECT_LE(cue_mean_r(), 0.62);
    EXPECT_NEAR(cue_mean_r(), simpson([](double r) { return r * cue_pdf(r); }, 0.0, 1.0, 400), 1e-8);
}

TEST(CuePdf, BinMassesMatchGridOracle) {
    auto grid = cue_grid_masses(20);
    BinnedDistribution ref = reference_distribution(ReferenceDensity::cue, 20);
    for (int b = 0; b < 20; ++b) EXPECT_NEAR(ref.masses[b], grid[b], 2e-3) << "bin " << b;
}

TEST(CuePdf, AgreesWithHaarSampling) {
    LevelSpacingSample s = haar_ensemble(32, 500, 3);
    EXPECT_EQ(s.r_values.size(), 32u * 500u);
    BinnedDistribution emp = histogram(s);
    EXPECT_LT(js_distance(emp, reference_distribution(ReferenceDensity::cue)), 0.03);
    EXPECT_NEAR(s.mean(), cue_mean_r(), 0.01);
}

TEST(HaarUnitary, IsUnitary) {
    Rng rng(4);
    Eigen::MatrixXcd U = haar_unitary(16, rng);
    EXPECT_LT((U.adjoint() * U - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Histogram, BinsAndEdges) {
    LevelSpacingSample s{{0.0, 0.05, 0.5, 1.0}};
    BinnedDistribution h = histogram(s, 20);
    h.validate();
    EXPECT_EQ(h.n_bins(), 20u);
    EXPECT_EQ(h.masses[0], 0.25);
    EXPECT_EQ(h.masses[1], 0.25);
    EXPECT_EQ(h.masses[10], 0.25);
    EXPECT_EQ(h.masses[19], 0.25);
    EXPECT_THROW(histogram(LevelSpacingSample{}, 20), std::invalid_argument);
}

TEST(ReferenceDistribution, SumsToOne) {
    for (auto kind : {ReferenceDensity::poisson, ReferenceDensity::cue}) {
        BinnedDistribution d = reference_distribution(kind);
        double total = 0.0;
        for (double m : d.masses) total += m;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NO_THROW(d.validate());
    }
}

BinnedDistribution random_distribution(Rng& rng, int bins) {
    BinnedDistribution d = reference_distribution(ReferenceDensity::poisson, bins);
    double total = 0.0;
    for (double& m : d.masses) total += (m = rng.uniform());
    for (double& m : d.masses) m /= total;
    return d;
}

TEST(JsDistance, SelfIsZeroAndSymmetric) {
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        auto P = random_distribution(rng, 20);
        auto Q = random_distribution(rng, 20);
        EXPECT_NEAR(js_distance(P, P), 0.0, 1e-12);
        EXPECT_DOUBLE_EQ(js_distance(P, Q), js_distance(Q, P));
    }
}

TEST(JsDistance, DisjointSupportIsSqrtLn2) {
    BinnedDistribution P = reference_distribution(ReferenceDensity::poisson, 2);
    BinnedDistribution Q = P;
    P.masses = {1.0, 0.0};
    Q.masses = {0.0, 1.0};
    EXPECT_NEAR(js_distance(P, Q), std::sqrt(std::log(2.0)), 1e-15);
    EXPECT_NEAR(js_distance(P, Q), 0.8326, 1e-4);
}

TEST(JsDistance, MismatchedBinningThrows) {
    EXPECT_THROW(js_distance(reference_distribution(ReferenceDensity::cue, 10),
                             reference_distribution(ReferenceDensity::cue, 20)),
                 std::invalid_argument);
}

TEST(ProductEnsemble, CountsAndDeterminism) {
    FloquetParams p = FloquetParams::with_defaults(3, 200.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-5;
    LevelSpacingSample a = product_ensemble(p, cfg, 3, 4, 11);
    EXPECT_EQ(a.r_values.size(), 8u * 4u);
    EXPECT_EQ(product_ensemble(p, cfg, 3, 4, 11).r_values, a.r_values);
    for (double r : a.r_values) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(ProductEnsemble, SweepPrefixMatchesSingleLength) {
    FloquetParams p = FloquetParams::with_defaults(3, 200.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-5;
    std::vector<int> Ms{1, 4};
    auto sweep = product_ensemble_sweep(p, cfg, Ms, 3, 12);
    EXPECT_EQ(sweep.at(4).r_values, product_ensemble(p, cfg, 4, 3, 12).r_values);
    EXPECT_EQ(sweep.at(1).r_values, product_ensemble(p, cfg, 1, 3, 12).r_values);
}

TEST(ProductEnsemble, WorkerCountDoesNotChangeResult) {
    FloquetParams p = FloquetParams::with_defaults(3, 100.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-5;
    EXPECT_EQ(product_ensemble(p, cfg, 2, 6, 13, 1).r_values, product_ensemble(p, cfg, 2, 6, 13, 3).r_values);
}

TEST(ProductEnsemble, ProductStaysUnitary) {
    FloquetParams p = FloquetParams::with_defaults(4, 200.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-6;
    Rng rng(14);
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(16, 16);
    const int M = 20;
    for (int j = 0; j < M; ++j) prod = prod * floquet_propagator(p, draw_disorder(p, rng), cfg);
    EXPECT_LT((prod.adjoint() * prod - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff(), M * cfg.tolerance);
    EXPECT_EQ(eigenphases(prod).size(), 16u);
}

TEST(ProductEnsemble, SizeGuards) {
    IntegratorConfig cfg;
    EXPECT_THROW(product_ensemble(FloquetParams::with_defaults(11, 1.0), cfg, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(product_ensemble(FloquetParams::with_defaults(1, 1.0), cfg, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(product_ensemble(FloquetParams::with_defaults(3, 1.0), cfg, 0, 1, 1), std::invalid_argument);
    EXPECT_THROW(product_ensemble(FloquetParams::with_defaults(3, 1.0), cfg, 1, 0, 1), std::invalid_argument);
}

TEST(ProductEnsemble, JsToCueFallsWithLogM) {
    // Least-squares slope of JS-to-CUE against log M must be negative.
    FloquetParams p = FloquetParams::with_defaults(4, 200.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-4;
    std::vector<int> Ms{1, 10, 50, 150};
    auto sweep = product_ensemble_sweep(p, cfg, Ms, 60, 15);
    BinnedDistribution cue = reference_distribution(ReferenceDensity::cue);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int M : Ms) {
        double x = std::log(M);
        double y = js_distance(histogram(sweep.at(M)), cue);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(Ms.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_LT(slope, 0.0);
}

}  // namespace
}  // namespace mblmc
