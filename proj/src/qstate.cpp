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

#include "mblmc/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace mblmc {

namespace {

constexpr double kSamplingNormTolerance = 1e-6;

std::size_t checked_dim(int n_qubits) {
    if (n_qubits < 1 || n_qubits > QuantumState::kMaxQubits) {
        throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(QuantumState::kMaxQubits) +
                                    "], got " + std::to_string(n_qubits));
    }
    return std::size_t{1} << n_qubits;
}

void require_dim(const QuantumState& state, std::size_t n, const char* what) {
    if (state.dim() != n) {
        throw std::invalid_argument(std::string(what) + ": length " + std::to_string(n) +
                                    " does not match state dimension " + std::to_string(state.dim()));
    }
}

}  // namespace

Bitstring::Bitstring(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) throw std::invalid_argument("Bitstring entries must be 0 or 1");
    }
}

Bitstring Bitstring::from_index(int n_qubits, std::uint64_t index) {
    if (n_qubits < 1 || n_qubits > 63) throw std::invalid_argument("Bitstring length must be in [1, 63]");
    if (index >> n_qubits) throw std::invalid_argument("basis index out of range for Bitstring length");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_qubits));
    for (int j = 0; j < n_qubits; ++j) bits[static_cast<std::size_t>(j)] = (index >> j) & 1U;
    return Bitstring(std::move(bits));
}

Bitstring Bitstring::parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("Bitstring text must contain only '0' and '1'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Bitstring(std::move(bits));
}

std::uint64_t Bitstring::index() const {
    std::uint64_t b = 0;
    for (std::size_t j = 0; j < bits_.size(); ++j) b |= std::uint64_t{bits_[j]} << j;
    return b;
}

std::string Bitstring::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
}

QuantumState::QuantumState(int n_qubits) : n_qubits_(n_qubits), amplitudes_(checked_dim(n_qubits)) {
    amplitudes_[0] = 1.0;
}

QuantumState::QuantumState(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != checked_dim(n_qubits)) {
        throw std::invalid_argument("amplitude count " + std::to_string(amplitudes_.size()) + " is not 2^" +
                                    std::to_string(n_qubits));
    }
}

double QuantumState::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
}

void QuantumState::normalize() {
    const double n = std::sqrt(norm_squared());
    if (!(n > 0.0)) throw std::domain_error("cannot normalize a zero state");
    for (auto& a : amplitudes_) a /= n;
}

std::vector<double> QuantumState::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(), [](const Complex& a) { return std::norm(a); });
    return p;
}

QuantumState basis_state(int n_qubits, const Bitstring& bits) {
    if (bits.size() != n_qubits) {
        throw std::invalid_argument("basis_state: bitstring length " + std::to_string(bits.size()) +
                                    " != n_qubits " + std::to_string(n_qubits));
    }
    QuantumState s(n_qubits);
    s[0] = 0.0;
    s[bits.index()] = 1.0;
    return s;
}

QuantumState uniform_state(int n_qubits) {
    const std::size_t dim = checked_dim(n_qubits);
    return QuantumState(n_qubits, std::vector<Complex>(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

QuantumState random_state(int n_qubits, Rng& rng) {
    const std::size_t dim = checked_dim(n_qubits);
    std::normal_distribution<double> gauss;
    std::vector<Complex> amps(dim);
    for (auto& a : amps) {
        const double re = gauss(rng.engine());
        const double im = gauss(rng.engine());
        a = Complex(re, im);
    }
    QuantumState s(n_qubits, std::move(amps));
    s.normalize();
    return s;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    require_dim(b, a.dim(), "fidelity");
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) overlap += std::conj(a[i]) * b[i];
    return std::norm(overlap);
}

double expectation_diagonal(const QuantumState& state, std::span<const double> diag) {
    require_dim(state, diag.size(), "expectation_diagonal");
    double s = 0.0;
    for (std::size_t b = 0; b < diag.size(); ++b) s += std::norm(state[b]) * diag[b];
    return s;
}

std::vector<std::uint64_t> sample_indices(const QuantumState& state, std::size_t shots, Rng& rng) {
    std::vector<double> cdf(state.dim());
    double acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        acc += std::norm(state[b]);
        cdf[b] = acc;
    }
    if (std::abs(acc - 1.0) > kSamplingNormTolerance) {
        throw std::domain_error("sample_bitstrings: state is not normalized (norm^2 = " + std::to_string(acc) + ")");
    }
    std::vector<std::uint64_t> out(shots);
    for (auto& o : out) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        o = static_cast<std::uint64_t>(it - cdf.begin());
    }
    return out;
}

std::vector<Bitstring> sample_bitstrings(const QuantumState& state, std::size_t shots, Rng& rng) {
    const auto idx = sample_indices(state, shots, rng);
    std::vector<Bitstring> out;
    out.reserve(idx.size());
    for (auto b : idx) out.push_back(Bitstring::from_index(state.n_qubits(), b));
    return out;
}

double solution_mass(const QuantumState& state, std::span<const Bitstring> solutions) {
    std::vector<std::uint64_t> idx;
    idx.reserve(solutions.size());
    for (const auto& s : solutions) {
        if (s.size() != state.n_qubits()) {
            throw std::invalid_argument("solution_mass: solution length " + std::to_string(s.size()) +
                                        " != n_qubits " + std::to_string(state.n_qubits()));
        }
        idx.push_back(s.index());
    }
    return solution_mass(state, idx);
}

double solution_mass(const QuantumState& state, std::span<const std::uint64_t> solution_indices) {
    std::vector<std::uint64_t> idx(solution_indices.begin(), solution_indices.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    double m = 0.0;
    for (auto b : idx) {
        if (b >= state.dim()) throw std::invalid_argument("solution_mass: basis index out of range");
        m += std::norm(state[b]);
    }
    return std::min(m, 1.0);
}

}  // namespace mblmc
