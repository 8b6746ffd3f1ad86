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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mblmc/qstate.hpp"

namespace mblmc {

/// Variable meaning of a KBodyHamiltonian monomial: Pauli-Z eigenvalues
/// v = 1 - 2 x (zpauli) or the bits x themselves (binary).
enum class Convention { zpauli, binary };

std::string to_string(Convention c);

struct Term {
    std::vector<int> support;
    double coefficient = 0.0;
};

/// Diagonal k-body Hamiltonian, i.e. a pseudo-Boolean polynomial
/// sum_S c_S prod_{j in S} v_j. The empty support carries the constant.
class KBodyHamiltonian {
  public:
    static constexpr int kMaxDiagonalQubits = 24;

    explicit KBodyHamiltonian(int n_qubits, Convention convention = Convention::binary);

    int n_qubits() const { return n_qubits_; }
    Convention convention() const { return convention_; }

    /// Adds c * prod_{j in support} v_j. Repeated indices are reduced
    /// (x^2 = x, Z^2 = 1); equal supports are merged.
    KBodyHamiltonian& add_term(std::vector<int> support, double coefficient);
    KBodyHamiltonian& add_constant(double c) { return add_term({}, c); }

    std::vector<Term> terms() const;
    std::size_t term_count() const { return terms_.size(); }
    double coefficient(const std::vector<int>& support) const;
    double constant() const { return coefficient({}); }
    int max_order() const;

    KBodyHamiltonian to_convention(Convention target) const;
    KBodyHamiltonian to_binary() const { return to_convention(Convention::binary); }
    KBodyHamiltonian to_zpauli() const { return to_convention(Convention::zpauli); }

    KBodyHamiltonian& operator+=(const KBodyHamiltonian& other);
    KBodyHamiltonian& operator*=(double s);
    friend KBodyHamiltonian operator+(KBodyHamiltonian a, const KBodyHamiltonian& b) { return a += b; }
    friend KBodyHamiltonian operator*(KBodyHamiltonian a, double s) { return a *= s; }
    /// Polynomial product with monomial reduction. Both operands must share a convention.
    friend KBodyHamiltonian operator*(const KBodyHamiltonian& a, const KBodyHamiltonian& b);

  private:
    void check(const KBodyHamiltonian& other) const;

    int n_qubits_;
    Convention convention_;
    std::map<std::vector<int>, double> terms_;
};

double evaluate(const KBodyHamiltonian& H, const Bitstring& b);
double evaluate(const KBodyHamiltonian& H, std::uint64_t index);

/// Dense view: entry b equals evaluate(H, b).
std::vector<double> diagonal(const KBodyHamiltonian& H);

/// Undirected simple graph.
class Graph {
  public:
    explicit Graph(int n_vertices, std::vector<std::pair<int, int>> edges = {});

    int n_vertices() const { return n_; }
    /// Normalized (u < v), sorted.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::vector<int> degrees() const;
    bool has_edge(int u, int v) const;

  private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
};

/// Plain text: first line N, then one "u v" pair per line (0-indexed).
/// Blank lines and text after "#" are ignored.
Graph read_graph(std::istream& in);
Graph read_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const Graph& g);

/// G(N, p): each pair (i < j), visited lexicographically, is kept when a
/// uniform draw falls below p.
Graph erdos_renyi(int n_vertices, double edge_probability, std::uint64_t seed);

/// -sum_i x_i + 2 sum_{(i,j)} x_i x_j
KBodyHamiltonian mis_hamiltonian(const Graph& g);
/// -sum_i deg(i) x_i + 2 sum_{(i,j)} x_i x_j, equal to minus the cut size.
KBodyHamiltonian maxcut_hamiltonian(const Graph& g);

/// p^2 q^2 - 2 M p q with p = sum_l 2^l x_l on qubits [0, n) and
/// q = sum_l 2^l x_{n+l} on qubits [n, 2n).
KBodyHamiltonian factorization_hubo(std::uint64_t M, int n_bits);
/// Set when M fits in n_bits, in which case 1 * M is also a minimizer.
std::optional<std::string> factorization_instance_warning(std::uint64_t M, int n_bits);
/// (p, q) encoded by a 2 n_bits assignment.
std::pair<std::uint64_t, std::uint64_t> decode_factors(std::uint64_t index, int n_bits);

struct Minima {
    double min_cost = 0.0;
    std::vector<Bitstring> solutions;
    std::vector<std::uint64_t> indices;
};

/// Exhaustive scan. Ties within 1e-9 (1 + |min|) are reported as solutions.
Minima brute_force_minima(const KBodyHamiltonian& H);
Minima brute_force_minima(const KBodyHamiltonian& H, std::span<const double> diag);

/// O = exp(-beta H) with energies shifted by the ground-state energy, so
/// ground states carry weight exactly 1.
struct GibbsObservable {
    double beta = 1.0;
    KBodyHamiltonian hamiltonian{1};
    std::vector<double> energies;
    std::vector<double> diag_cache;
    double e_min = 0.0;
    double e_max = 0.0;
};

inline constexpr double kMaxGibbsExponent = 700.0;

GibbsObservable gibbs_observable(const KBodyHamiltonian& H, double beta);

}  // namespace mblmc
