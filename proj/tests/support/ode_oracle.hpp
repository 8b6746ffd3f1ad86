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

// Reference propagator from adaptive Runge-Kutta integration of
// dU/dt = -i H(t) U. Shares no code with the splitting integrator: the
// Hamiltonian is rebuilt here from Kronecker products of Pauli matrices.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "mblmc/floquet.hpp"

namespace mblmc::testing {

inline Eigen::MatrixXd kron_chain(const std::vector<Eigen::Matrix2d>& ops) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    // Qubit 0 is the least significant bit, so it is the rightmost factor.
    for (const auto& op : ops) {
        Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) next.block(r * out.rows(), c * out.cols(), out.rows(), out.cols()) = op(r, c) * out;
        out = next;
    }
    return out;
}

inline Eigen::MatrixXd pauli_string(int n, const std::vector<std::pair<int, char>>& factors) {
    Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d X;
    X << 0, 1, 1, 0;
    Eigen::Matrix2d Z;
    Z << 1, 0, 0, -1;
    std::vector<Eigen::Matrix2d> ops(static_cast<std::size_t>(n), I);
    for (auto [q, c] : factors) ops[static_cast<std::size_t>(q)] = c == 'X' ? X : Z;
    return kron_chain(ops);
}

/// Static part sum h_i Z_i + J sum Z_i Z_i+1 and the transverse operator sum X_i.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_hamiltonian(const FloquetParams& p,
                                                                     const DisorderRealization& h) {
    const int n = p.n_qubits;
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXd H0 = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd HX = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        H0 += h.h[static_cast<std::size_t>(i)] * pauli_string(n, {{i, 'Z'}});
        HX += pauli_string(n, {{i, 'X'}});
    }
    for (int i = 0; i + 1 < n; ++i) H0 += p.J * pauli_string(n, {{i, 'Z'}, {i + 1, 'Z'}});
    return {H0, HX};
}

inline Eigen::MatrixXcd ode_propagator(const FloquetParams& p, const DisorderRealization& h, double tol = 1e-12) {
    namespace odeint = boost::numeric::odeint;
    auto [H0, HX] = split_hamiltonian(p, h);
    const Eigen::Index d = H0.rows();
    const Eigen::Index block = d * d;
    // U = A + iB with real H: A' = H B, B' = -H A.
    std::vector<double> x(static_cast<std::size_t>(2 * block), 0.0);
    Eigen::Map<Eigen::MatrixXd>(x.data(), d, d).setIdentity();
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double t) {
        Eigen::MatrixXd H = H0 + (p.B0 + p.deltaB * std::cos(p.omega * t)) * HX;
        Eigen::Map<const Eigen::MatrixXd> A(s.data(), d, d), B(s.data() + block, d, d);
        Eigen::Map<Eigen::MatrixXd> dA(ds.data(), d, d), dB(ds.data() + block, d, d);
        dA.noalias() = H * B;
        dB.noalias() = -H * A;
    };
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<std::vector<double>>>(tol, tol), rhs,
                               x, 0.0, p.period(), p.period() / 1000.0);
    Eigen::Map<const Eigen::MatrixXd> A(x.data(), d, d), B(x.data() + block, d, d);
    Eigen::MatrixXcd U(d, d);
    U.real() = A;
    U.imag() = B;
    return U;
}

inline double max_abs(const Eigen::MatrixXcd& M) { return M.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const Eigen::MatrixXcd& U) {
    return max_abs(U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols()));
}

}  // namespace mblmc::testing
