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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mblmc/rng.hpp"

namespace mblmc {

using Complex = std::complex<double>;

/// Computational-basis outcome. Qubit j is bit j (least significant first)
/// of the basis index.
class Bitstring {
  public:
    Bitstring() = default;
    explicit Bitstring(std::vector<std::uint8_t> bits);

    static Bitstring from_index(int n_qubits, std::uint64_t index);
    /// Parses "b0b1...b(n-1)", i.e. qubit 0 first.
    static Bitstring parse(std::string_view text);

    int size() const { return static_cast<int>(bits_.size()); }
    std::uint8_t operator[](int j) const { return bits_[static_cast<std::size_t>(j)]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::uint64_t index() const;
    /// Qubit 0 first, matching parse().
    std::string to_string() const;

    friend bool operator==(const Bitstring&, const Bitstring&) = default;
    friend auto operator<=>(const Bitstring&, const Bitstring&) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

/// Dense pure state of n qubits.
class QuantumState {
  public:
    static constexpr int kMaxQubits = 28;

    /// |0...0>.
    explicit QuantumState(int n_qubits);
    QuantumState(int n_qubits, std::vector<Complex> amplitudes);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }

    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<Complex> amplitudes() { return amplitudes_; }
    const Complex& operator[](std::size_t b) const { return amplitudes_[b]; }
    Complex& operator[](std::size_t b) { return amplitudes_[b]; }

    double norm_squared() const;
    void normalize();

    /// Born probabilities |a_b|^2.
    std::vector<double> probabilities() const;

    friend bool operator==(const QuantumState&, const QuantumState&) = default;

  private:
    int n_qubits_;
    std::vector<Complex> amplitudes_;
};

QuantumState basis_state(int n_qubits, const Bitstring& bits);
QuantumState uniform_state(int n_qubits);
/// Haar-random pure state (normalized complex Gaussian vector).
QuantumState random_state(int n_qubits, Rng& rng);

/// |<a|b>|^2.
double fidelity(const QuantumState& a, const QuantumState& b);

/// sum_b |a_b|^2 diag[b].
double expectation_diagonal(const QuantumState& state, std::span<const double> diag);

/// Basis indices drawn i.i.d. from the Born distribution by inverse CDF.
std::vector<std::uint64_t> sample_indices(const QuantumState& state, std::size_t shots, Rng& rng);
std::vector<Bitstring> sample_bitstrings(const QuantumState& state, std::size_t shots, Rng& rng);

double solution_mass(const QuantumState& state, std::span<const Bitstring> solutions);
double solution_mass(const QuantumState& state, std::span<const std::uint64_t> solution_indices);

}  // namespace mblmc
