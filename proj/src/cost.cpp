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

#include "mblmc/cost.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mblmc/rng.hpp"

namespace mblmc {

namespace {

struct MaskedTerm {
    std::uint64_t mask;
    double coefficient;
};

std::vector<MaskedTerm> masked_terms(const KBodyHamiltonian& H) {
    std::vector<MaskedTerm> out;
    for (const auto& t : H.terms()) {
        std::uint64_t m = 0;
        for (int j : t.support) m |= std::uint64_t{1} << j;
        out.push_back({m, t.coefficient});
    }
    return out;
}

double evaluate_masked(const std::vector<MaskedTerm>& terms, Convention c, std::uint64_t b) {
    double e = 0.0;
    if (c == Convention::binary) {
        for (const auto& t : terms) {
            if ((b & t.mask) == t.mask) e += t.coefficient;
        }
    } else {
        for (const auto& t : terms) e += (std::popcount(b & t.mask) & 1) ? -t.coefficient : t.coefficient;
    }
    return e;
}

void require_diagonal_size(const KBodyHamiltonian& H) {
    if (H.n_qubits() > KBodyHamiltonian::kMaxDiagonalQubits) {
        throw std::length_error("dense diagonal requested for " + std::to_string(H.n_qubits()) +
                                " qubits; limit is " + std::to_string(KBodyHamiltonian::kMaxDiagonalQubits));
    }
}

/// Calls f(subset) for every subset of a sorted support.
template <typename F>
void for_each_subset(const std::vector<int>& support, F&& f) {
    const std::size_t k = support.size();
    std::vector<int> subset;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) {
        subset.clear();
        for (std::size_t i = 0; i < k; ++i) {
            if ((m >> i) & 1U) subset.push_back(support[i]);
        }
        f(subset);
    }
}

}  // namespace

std::string to_string(Convention c) { return c == Convention::binary ? "binary" : "zpauli"; }

KBodyHamiltonian::KBodyHamiltonian(int n_qubits, Convention convention) : n_qubits_(n_qubits), convention_(convention) {
    if (n_qubits < 1 || n_qubits > 63) throw std::invalid_argument("KBodyHamiltonian: n_qubits must be in [1, 63]");
}

KBodyHamiltonian& KBodyHamiltonian::add_term(std::vector<int> support, double coefficient) {
    for (int j : support) {
        if (j < 0 || j >= n_qubits_) {
            throw std::out_of_range("KBodyHamiltonian: qubit index " + std::to_string(j) + " out of range [0, " +
                                    std::to_string(n_qubits_) + ")");
        }
    }
    std::sort(support.begin(), support.end());
    if (convention_ == Convention::binary) {
        support.erase(std::unique(support.begin(), support.end()), support.end());
    } else {
        std::vector<int> reduced;
        for (int j : support) {
            if (!reduced.empty() && reduced.back() == j) {
                reduced.pop_back();
            } else {
                reduced.push_back(j);
            }
        }
        support = std::move(reduced);
    }
    auto [it, inserted] = terms_.try_emplace(std::move(support), 0.0);
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
    return *this;
}

std::vector<Term> KBodyHamiltonian::terms() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [s, c] : terms_) out.push_back({s, c});
    return out;
}

double KBodyHamiltonian::coefficient(const std::vector<int>& support) const {
    auto it = terms_.find(support);
    return it == terms_.end() ? 0.0 : it->second;
}

int KBodyHamiltonian::max_order() const {
    std::size_t k = 0;
    for (const auto& [s, c] : terms_) k = std::max(k, s.size());
    return static_cast<int>(k);
}

KBodyHamiltonian KBodyHamiltonian::to_convention(Convention target) const {
    if (target == convention_) return *this;
    KBodyHamiltonian out(n_qubits_, target);
    for (const auto& [support, c] : terms_) {
        if (target == Convention::zpauli) {
            // x_j = (1 - Z_j) / 2
            const double scale = std::ldexp(c, -static_cast<int>(support.size()));
            for_each_subset(support, [&](const std::vector<int>& sub) {
                out.add_term(sub, (sub.size() % 2) ? -scale : scale);
            });
        } else {
            // Z_j = 1 - 2 x_j
            for_each_subset(support, [&](const std::vector<int>& sub) {
                const double f = std::ldexp(1.0, static_cast<int>(sub.size()));
                out.add_term(sub, (sub.size() % 2) ? -c * f : c * f);
            });
        }
    }
    return out;
}

void KBodyHamiltonian::check(const KBodyHamiltonian& other) const {
    if (other.n_qubits_ != n_qubits_ || other.convention_ != convention_) {
        throw std::invalid_argument("KBodyHamiltonian operands differ in size or convention");
    }
}

KBodyHamiltonian& KBodyHamiltonian::operator+=(const KBodyHamiltonian& other) {
    check(other);
    for (const auto& [s, c] : other.terms_) add_term(s, c);
    return *this;
}

KBodyHamiltonian& KBodyHamiltonian::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [support, c] : terms_) c *= s;
    return *this;
}

KBodyHamiltonian operator*(const KBodyHamiltonian& a, const KBodyHamiltonian& b) {
    a.check(b);
    KBodyHamiltonian out(a.n_qubits_, a.convention_);
    for (const auto& [sa, ca] : a.terms_) {
        for (const auto& [sb, cb] : b.terms_) {
            std::vector<int> support(sa);
            support.insert(support.end(), sb.begin(), sb.end());
            out.add_term(std::move(support), ca * cb);
        }
    }
    return out;
}

double evaluate(const KBodyHamiltonian& H, const Bitstring& b) {
    if (b.size() != H.n_qubits()) {
        throw std::out_of_range("evaluate: bitstring length " + std::to_string(b.size()) + " != n_qubits " +
                                std::to_string(H.n_qubits()));
    }
    return evaluate(H, b.index());
}

double evaluate(const KBodyHamiltonian& H, std::uint64_t index) {
    if (H.n_qubits() < 64 && (index >> H.n_qubits())) throw std::out_of_range("evaluate: basis index out of range");
    return evaluate_masked(masked_terms(H), H.convention(), index);
}

std::vector<double> diagonal(const KBodyHamiltonian& H) {
    require_diagonal_size(H);
    const auto terms = masked_terms(H);
    const std::size_t dim = std::size_t{1} << H.n_qubits();
    std::vector<double> d(dim);
    for (std::size_t b = 0; b < dim; ++b) d[b] = evaluate_masked(terms, H.convention(), b);
    return d;
}

Graph::Graph(int n_vertices, std::vector<std::pair<int, int>> edges) : n_(n_vertices) {
    if (n_vertices < 1) throw std::invalid_argument("Graph: n_vertices must be >= 1");
    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) {
            throw std::invalid_argument("Graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") has a vertex out of range");
        }
        if (u == v) throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end()) {
        throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(it->first) + ", " +
                                    std::to_string(it->second) + ")");
    }
    edges_ = std::move(edges);
}

std::vector<int> Graph::degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n_), 0);
    for (const auto& [u, v] : edges_) {
        ++d[static_cast<std::size_t>(u)];
        ++d[static_cast<std::size_t>(v)];
    }
    return d;
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), std::pair{u, v});
}

Graph read_graph(std::istream& in) {
    std::string line;
    int line_no = 0;
    std::optional<int> n;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        line.erase(std::min(line.size(), line.find('#')));
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        ls.clear();
        ls.str(line);
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("graph file line " + std::to_string(line_no) + ": " + what);
        };
        if (!n) {
            int v = 0;
            std::string rest;
            if (!(ls >> v) || (ls >> rest)) fail("expected vertex count N");
            if (v < 1) fail("vertex count must be >= 1");
            n = v;
            continue;
        }
        int u = 0;
        int v = 0;
        std::string rest;
        if (!(ls >> u >> v) || (ls >> rest)) fail("expected edge \"u v\"");
        if (u < 0 || v < 0 || u >= *n || v >= *n) fail("vertex index out of range");
        edges.emplace_back(u, v);
    }
    if (!n) throw std::invalid_argument("graph file: missing vertex count");
    return Graph(*n, std::move(edges));
}

Graph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file " + path.string());
    return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
    out << g.n_vertices() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph erdos_renyi(int n_vertices, double edge_probability, std::uint64_t seed) {
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
        throw std::invalid_argument("erdos_renyi: edge probability must be in [0, 1]");
    }
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_vertices; ++i) {
        for (int j = i + 1; j < n_vertices; ++j) {
            if (rng.uniform() < edge_probability) edges.emplace_back(i, j);
        }
    }
    return Graph(n_vertices, std::move(edges));
}

KBodyHamiltonian mis_hamiltonian(const Graph& g) {
    KBodyHamiltonian H(g.n_vertices(), Convention::binary);
    for (int i = 0; i < g.n_vertices(); ++i) H.add_term({i}, -1.0);
    for (const auto& [u, v] : g.edges()) H.add_term({u, v}, 2.0);
    return H;
}

KBodyHamiltonian maxcut_hamiltonian(const Graph& g) {
    KBodyHamiltonian H(g.n_vertices(), Convention::binary);
    const auto deg = g.degrees();
    for (int i = 0; i < g.n_vertices(); ++i) H.add_term({i}, -static_cast<double>(deg[static_cast<std::size_t>(i)]));
    for (const auto& [u, v] : g.edges()) H.add_term({u, v}, 2.0);
    return H;
}

KBodyHamiltonian factorization_hubo(std::uint64_t M, int n_bits) {
    if (n_bits < 2 || n_bits > 15) throw std::invalid_argument("factorization_hubo: n_bits must be in [2, 15]");
    if (M < 1) throw std::invalid_argument("factorization_hubo: M must be positive");
    const int n = 2 * n_bits;
    KBodyHamiltonian p(n, Convention::binary);
    KBodyHamiltonian q(n, Convention::binary);
    for (int l = 0; l < n_bits; ++l) {
        p.add_term({l}, std::ldexp(1.0, l));
        q.add_term({n_bits + l}, std::ldexp(1.0, l));
    }
    const KBodyHamiltonian pq = p * q;
    return pq * pq + pq * (-2.0 * static_cast<double>(M));
}

std::optional<std::string> factorization_instance_warning(std::uint64_t M, int n_bits) {
    if (n_bits < 64 && M < (std::uint64_t{1} << n_bits)) {
        return "M = " + std::to_string(M) + " is representable with " + std::to_string(n_bits) +
               " bits, so the trivial factorization 1 * M is also a ground state";
    }
    return std::nullopt;
}

std::pair<std::uint64_t, std::uint64_t> decode_factors(std::uint64_t index, int n_bits) {
    const std::uint64_t mask = (std::uint64_t{1} << n_bits) - 1;
    return {index & mask, (index >> n_bits) & mask};
}

Minima brute_force_minima(const KBodyHamiltonian& H) { return brute_force_minima(H, diagonal(H)); }

Minima brute_force_minima(const KBodyHamiltonian& H, std::span<const double> diag) {
    require_diagonal_size(H);
    if (diag.size() != (std::size_t{1} << H.n_qubits())) {
        throw std::invalid_argument("brute_force_minima: diagonal length mismatch");
    }
    Minima m;
    m.min_cost = *std::min_element(diag.begin(), diag.end());
    const double tie = 1e-9 * (1.0 + std::abs(m.min_cost));
    for (std::size_t b = 0; b < diag.size(); ++b) {
        if (diag[b] <= m.min_cost + tie) {
            m.indices.push_back(b);
            m.solutions.push_back(Bitstring::from_index(H.n_qubits(), b));
        }
    }
    return m;
}

GibbsObservable gibbs_observable(const KBodyHamiltonian& H, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("gibbs_observable: beta must be > 0");
    GibbsObservable o;
    o.beta = beta;
    o.hamiltonian = H;
    o.energies = diagonal(H);
    const auto [lo, hi] = std::minmax_element(o.energies.begin(), o.energies.end());
    o.e_min = *lo;
    o.e_max = *hi;
    if (beta * (o.e_max - o.e_min) > kMaxGibbsExponent) {
        std::ostringstream msg;
        msg << "gibbs_observable: beta * (E_max - E_min) = " << beta * (o.e_max - o.e_min) << " exceeds "
            << kMaxGibbsExponent << "; weights would underflow";
        throw std::overflow_error(msg.str());
    }
    o.diag_cache.resize(o.energies.size());
    for (std::size_t b = 0; b < o.energies.size(); ++b) o.diag_cache[b] = std::exp(-beta * (o.energies[b] - o.e_min));
    return o;
}

}  // namespace mblmc
