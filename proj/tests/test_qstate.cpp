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
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "mblmc/cost.hpp"
#include "mblmc/floquet.hpp"
#include "mblmc/qstate.hpp"

namespace mblmc {
namespace {

TEST(Bitstring, IndexUsesQubitZeroAsLeastSignificantBit) {
    EXPECT_EQ(Bitstring::parse("10").index(), 1u);
    EXPECT_EQ(Bitstring::parse("01").index(), 2u);
    EXPECT_EQ(Bitstring::parse("111").index(), 7u);
    EXPECT_EQ(Bitstring::from_index(4, 6).to_string(), "0110");
}

TEST(Bitstring, ParseRoundTrip) {
    for (std::uint64_t i = 0; i < 32; ++i) {
        Bitstring b = Bitstring::from_index(5, i);
        EXPECT_EQ(Bitstring::parse(b.to_string()), b);
        EXPECT_EQ(b.index(), i);
    }
}

TEST(Bitstring, RejectsBadCharacters) {
    EXPECT_THROW(Bitstring::parse("012"), std::invalid_argument);
    EXPECT_THROW(Bitstring::from_index(2, 4), std::invalid_argument);
}

TEST(QuantumState, DefaultIsAllZeros) {
    QuantumState s(3);
    EXPECT_EQ(s.dim(), 8u);
    EXPECT_EQ(s[0], Complex(1.0, 0.0));
    for (std::size_t b = 1; b < 8; ++b) EXPECT_EQ(s[b], Complex(0.0, 0.0));
}

TEST(QuantumState, RejectsBadSizes) {
    EXPECT_THROW(QuantumState(0), std::invalid_argument);
    EXPECT_THROW(QuantumState(QuantumState::kMaxQubits + 1), std::invalid_argument);
    EXPECT_THROW(QuantumState(2, std::vector<Complex>(3)), std::invalid_argument);
}

TEST(BasisState, SingleQubitZero) {
    QuantumState s = basis_state(1, Bitstring::parse("0"));
    EXPECT_EQ(s[0], Complex(1.0));
    EXPECT_EQ(s[1], Complex(0.0));
}

TEST(BasisState, QubitZeroSetGivesIndexOne) {
    QuantumState s = basis_state(2, Bitstring({1, 0}));
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(s[b], Complex(b == 1 ? 1.0 : 0.0));
}

TEST(BasisState, AllOnesIsLastIndex) {
    QuantumState s = basis_state(3, Bitstring({1, 1, 1}));
    EXPECT_EQ(s[7], Complex(1.0));
    EXPECT_DOUBLE_EQ(s.norm_squared(), 1.0);
}

TEST(BasisState, DimensionMismatchThrows) {
    EXPECT_THROW(basis_state(3, Bitstring({1, 0})), std::invalid_argument);
}

TEST(ExpectationDiagonal, SelectsBasisEntry) {
    QuantumState s = basis_state(2, Bitstring({1, 0}));
    std::vector<double> d{0, 5, 0, 0};
    EXPECT_DOUBLE_EQ(expectation_diagonal(s, d), 5.0);
}

TEST(ExpectationDiagonal, UniformAverages) {
    std::vector<double> d{1, 3};
    EXPECT_NEAR(expectation_diagonal(uniform_state(1), d), 2.0, 1e-15);
}

TEST(ExpectationDiagonal, MatchesDirectSumOnTriangleMis) {
    Rng rng(7);
    QuantumState s = random_state(3, rng);
    Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    std::vector<double> d = diagonal(mis_hamiltonian(tri));
    // Independent oracle: cost from the bit pattern directly.
    double expect = 0.0;
    for (int b = 0; b < 8; ++b) {
        int x0 = b & 1, x1 = (b >> 1) & 1, x2 = (b >> 2) & 1;
        double cost = -(x0 + x1 + x2) + 2.0 * (x0 * x1 + x1 * x2 + x0 * x2);
        expect += std::norm(s[static_cast<std::size_t>(b)]) * cost;
    }
    EXPECT_NEAR(expectation_diagonal(s, d), expect, 1e-12);
}

TEST(ExpectationDiagonal, DimensionMismatchThrows) {
    std::vector<double> d{1, 2, 3};
    EXPECT_THROW(expectation_diagonal(QuantumState(2), d), std::invalid_argument);
}

TEST(ExpectationDiagonal, LinearAndBounded) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        QuantumState s = random_state(4, rng);
        std::vector<double> a(16), b(16), mix(16);
        for (int i = 0; i < 16; ++i) {
            a[i] = rng.uniform(-5, 5);
            b[i] = rng.uniform(-5, 5);
            mix[i] = 2.5 * a[i] - 0.75 * b[i];
        }
        double ea = expectation_diagonal(s, a);
        EXPECT_NEAR(expectation_diagonal(s, mix), 2.5 * ea - 0.75 * expectation_diagonal(s, b), 1e-12);
        EXPECT_GE(ea, *std::min_element(a.begin(), a.end()) - 1e-12);
        EXPECT_LE(ea, *std::max_element(a.begin(), a.end()) + 1e-12);
    }
}

TEST(SampleBitstrings, BasisStateIsDeterministic) {
    Rng rng(3);
    auto shots = sample_bitstrings(basis_state(2, Bitstring({0, 1})), 100, rng);
    ASSERT_EQ(shots.size(), 100u);
    for (const auto& b : shots) EXPECT_EQ(b, Bitstring({0, 1}));
}

TEST(SampleBitstrings, UniformQubitFrequencyWithinThreeSigma) {
    Rng rng(12345);
    auto idx = sample_indices(uniform_state(1), 100000, rng);
    double zeros = static_cast<double>(std::count(idx.begin(), idx.end(), 0u));
    double f = zeros / 1e5;
    EXPECT_GE(f, 0.494);
    EXPECT_LE(f, 0.506);
}

TEST(SampleBitstrings, SameSeedSameSequence) {
    Rng gen(5);
    QuantumState s = random_state(5, gen);
    Rng a(99), b(99);
    EXPECT_EQ(sample_bitstrings(s, 1000, a), sample_bitstrings(s, 1000, b));
}

TEST(SampleBitstrings, UnnormalizedStateThrows) {
    QuantumState s(1, {Complex(1.0), Complex(0.01)});
    Rng rng(1);
    EXPECT_THROW(sample_bitstrings(s, 10, rng), std::domain_error);
}

TEST(SampleBitstrings, ChiSquareGoodnessOfFit) {
    Rng gen(2718);
    QuantumState s = random_state(4, gen);
    Rng rng(31415);
    const std::size_t shots = 100000;
    auto idx = sample_indices(s, shots, rng);
    std::vector<double> counts(16, 0.0);
    for (auto i : idx) counts[i] += 1.0;
    auto p = s.probabilities();
    double chi2 = 0.0;
    for (int b = 0; b < 16; ++b) {
        double e = p[b] * shots;
        chi2 += (counts[b] - e) * (counts[b] - e) / e;
    }
    boost::math::chi_squared dist(15.0);
    double p_value = 1.0 - boost::math::cdf(dist, chi2);
    EXPECT_GT(p_value, 0.001) << "chi2 = " << chi2;
}

TEST(SolutionMass, BasisStateInSet) {
    std::vector<Bitstring> sols{Bitstring::parse("101"), Bitstring::parse("010")};
    EXPECT_DOUBLE_EQ(solution_mass(basis_state(3, Bitstring::parse("010")), sols), 1.0);
}

TEST(SolutionMass, EmptySetIsZero) {
    std::vector<Bitstring> none;
    EXPECT_EQ(solution_mass(uniform_state(3), none), 0.0);
}

TEST(SolutionMass, UniformTwoQubitHalf) {
    std::vector<Bitstring> sols{Bitstring::parse("00"), Bitstring::parse("11")};
    EXPECT_NEAR(solution_mass(uniform_state(2), sols), 0.5, 1e-15);
}

TEST(SolutionMass, DimensionMismatchThrows) {
    std::vector<Bitstring> sols{Bitstring::parse("00")};
    EXPECT_THROW(solution_mass(uniform_state(3), sols), std::invalid_argument);
}

TEST(SolutionMass, DuplicatesCountOnce) {
    std::vector<Bitstring> sols{Bitstring::parse("00"), Bitstring::parse("00")};
    EXPECT_NEAR(solution_mass(uniform_state(2), sols), 0.25, 1e-15);
}

TEST(Normalization, PreservedByFloquetPeriods) {
    Rng rng(8);
    FloquetParams p = FloquetParams::with_defaults(6, 50.0);
    IntegratorConfig cfg;
    cfg.tolerance = 1e-6;
    QuantumState s = random_state(6, rng);
    for (int k = 0; k < 5; ++k) {
        s = apply_period(s, p, draw_disorder(p, rng), cfg);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
    }
}

TEST(Fidelity, SelfIsOneOrthogonalIsZero) {
    Rng rng(4);
    QuantumState s = random_state(3, rng);
    EXPECT_NEAR(fidelity(s, s), 1.0, 1e-12);
    EXPECT_EQ(fidelity(basis_state(2, Bitstring::parse("00")), basis_state(2, Bitstring::parse("11"))), 0.0);
}

}  // namespace
}  // namespace mblmc
