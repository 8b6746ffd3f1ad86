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

#include "mblmc/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mblmc {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("FloquetParams.") + name + " must be finite");
}

void require_disorder(const FloquetParams& params, const DisorderRealization& h) {
    if (static_cast<int>(h.h.size()) != params.n_qubits) {
        throw std::invalid_argument("disorder realization has " + std::to_string(h.h.size()) + " fields for " +
                                    std::to_string(params.n_qubits) + " qubits");
    }
}

/// Second-order Strang splitting of one drive period. Each step is
///   exp(-i D dt/2) exp(-i B(t_mid) dt sum X) exp(-i D dt/2),
/// with adjacent diagonal half-steps merged. Both factors are applied exactly.
class StrangEvolver {
  public:
    StrangEvolver(const FloquetParams& params, const DisorderRealization& h, int steps, bool inverse)
        : n_qubits_(params.n_qubits), steps_(steps) {
        if (steps < 1) throw std::invalid_argument("step count must be positive");
        const double sign = inverse ? -1.0 : 1.0;
        const double dt = params.period() / steps;
        const auto diag = diagonal_energies(params, h);
        half_re_.resize(diag.size());
        half_im_.resize(diag.size());
        full_re_.resize(diag.size());
        full_im_.resize(diag.size());
        for (std::size_t b = 0; b < diag.size(); ++b) {
            const double e = sign * diag[b];
            half_re_[b] = std::cos(0.5 * e * dt);
            half_im_[b] = -std::sin(0.5 * e * dt);
            full_re_[b] = std::cos(e * dt);
            full_im_[b] = -std::sin(e * dt);
        }
        cos_.resize(static_cast<std::size_t>(steps));
        sin_.resize(static_cast<std::size_t>(steps));
        for (int k = 0; k < steps; ++k) {
            const double theta = sign * params.transverse_field((k + 0.5) * dt) * dt;
            cos_[static_cast<std::size_t>(k)] = std::cos(theta);
            sin_[static_cast<std::size_t>(k)] = std::sin(theta);
        }
    }

    /// Evolves a block of `width` states stored as split real/imaginary
    /// arrays, row-major with one row per basis index.
    void evolve(double* re, double* im, std::size_t width) const {
        phase_rows(re, im, width, half_re_.data(), half_im_.data());
        for (int k = 0; k < steps_; ++k) {
            const double c = cos_[static_cast<std::size_t>(k)];
            const double s = sin_[static_cast<std::size_t>(k)];
            for (int j = 0; j < n_qubits_; ++j) rotate_x(re, im, width, j, c, s);
            if (k + 1 < steps_) {
                phase_rows(re, im, width, full_re_.data(), full_im_.data());
            } else {
                phase_rows(re, im, width, half_re_.data(), half_im_.data());
            }
        }
    }

    void evolve(Complex* psi) const {
        const std::size_t dim = half_re_.size();
        std::vector<double> re(dim);
        std::vector<double> im(dim);
        for (std::size_t b = 0; b < dim; ++b) {
            re[b] = psi[b].real();
            im[b] = psi[b].imag();
        }
        evolve(re.data(), im.data(), 1);
        for (std::size_t b = 0; b < dim; ++b) psi[b] = Complex(re[b], im[b]);
    }

  private:
    void phase_rows(double* __restrict re, double* __restrict im, std::size_t width, const double* __restrict pr,
                    const double* __restrict pi) const {
        const std::size_t dim = half_re_.size();
        if (width == 1) {
            for (std::size_t b = 0; b < dim; ++b) {
                const double ar = re[b];
                const double ai = im[b];
                re[b] = ar * pr[b] - ai * pi[b];
                im[b] = ar * pi[b] + ai * pr[b];
            }
            return;
        }
        for (std::size_t b = 0; b < dim; ++b) {
            double* __restrict rr = re + b * width;
            double* __restrict ri = im + b * width;
            const double c = pr[b];
            const double s = pi[b];
            for (std::size_t i = 0; i < width; ++i) {
                const double ar = rr[i];
                const double ai = ri[i];
                rr[i] = ar * c - ai * s;
                ri[i] = ar * s + ai * c;
            }
        }
    }

    // (c I - i s X) on qubit j.
    void rotate_x(double* __restrict re, double* __restrict im, std::size_t width, int j, double c,
                  double s) const {
        const std::size_t dim = half_re_.size();
        const std::size_t stride = std::size_t{1} << j;
        const std::size_t run = stride * width;
        if (run == 1) {
            for (std::size_t i = 0; i < dim; i += 2) {
                const double ar = re[i], ai = im[i];
                const double br = re[i + 1], bi = im[i + 1];
                re[i] = c * ar + s * bi;
                im[i] = c * ai - s * br;
                re[i + 1] = c * br + s * ai;
                im[i + 1] = c * bi - s * ar;
            }
            return;
        }
        for (std::size_t base = 0; base < dim * width; base += 2 * run) {
            double* __restrict lr = re + base;
            double* __restrict li = im + base;
            double* __restrict hr = re + base + run;
            double* __restrict hi = im + base + run;
            for (std::size_t i = 0; i < run; ++i) {
                const double ar = lr[i], ai = li[i];
                const double br = hr[i], bi = hi[i];
                lr[i] = c * ar + s * bi;
                li[i] = c * ai - s * br;
                hr[i] = c * br + s * ai;
                hi[i] = c * bi - s * ar;
            }
        }
    }

    int n_qubits_;
    int steps_;
    std::vector<double> half_re_;
    std::vector<double> half_im_;
    std::vector<double> full_re_;
    std::vector<double> full_im_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

int next_refinement(int steps, const IntegratorConfig& cfg, double change) {
    if (steps > cfg.max_steps / 2) {
        std::ostringstream msg;
        msg << "Floquet integrator did not converge to tolerance " << cfg.tolerance << " within " << cfg.max_steps
            << " steps (last change " << change << ")";
        throw ConvergenceError(msg.str());
    }
    return 2 * steps;
}

}  // namespace

FloquetParams FloquetParams::with_defaults(int n_qubits, double w_over_j, double J) {
    FloquetParams p;
    p.n_qubits = n_qubits;
    p.J = J;
    p.B0 = 1.25 * J;
    p.deltaB = -1.25 * J;
    p.omega = 10.0 * J;
    p.W = w_over_j * J;
    return p;
}

double FloquetParams::transverse_field(double t) const { return B0 + deltaB * std::cos(omega * t); }

FloquetParams FloquetParams::negated() const {
    FloquetParams p = *this;
    p.J = -J;
    p.B0 = -B0;
    p.deltaB = -deltaB;
    return p;
}

void FloquetParams::validate() const {
    if (n_qubits < 1) throw std::invalid_argument("FloquetParams.n_qubits must be >= 1");
    if (n_qubits > QuantumState::kMaxQubits) throw std::invalid_argument("FloquetParams.n_qubits too large");
    require_finite(J, "J");
    require_finite(B0, "B0");
    require_finite(deltaB, "deltaB");
    require_finite(W, "W");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("FloquetParams.omega must be > 0");
    if (W < 0.0) throw std::invalid_argument("FloquetParams.W must be >= 0");
}

DisorderRealization DisorderRealization::negated() const {
    DisorderRealization r = *this;
    for (auto& x : r.h) x = -x;
    return r;
}

void IntegratorConfig::validate() const {
    if (steps_per_period < 2) throw std::invalid_argument("IntegratorConfig.steps_per_period must be >= 2");
    if (!(tolerance > 0.0)) throw std::invalid_argument("IntegratorConfig.tolerance must be > 0");
    if (max_steps < steps_per_period) throw std::invalid_argument("IntegratorConfig.max_steps < steps_per_period");
}

std::string PauliTerm::label() const {
    std::string s;
    for (const auto& [q, op] : factors) {
        s.push_back(op);
        s += std::to_string(q);
    }
    return s;
}

DisorderRealization draw_disorder(const FloquetParams& params, Rng& rng) {
    params.validate();
    DisorderRealization r;
    r.h.resize(static_cast<std::size_t>(params.n_qubits));
    const double half = 0.5 * params.W;
    for (auto& x : r.h) x = rng.uniform(-half, half);
    return r;
}

std::vector<PauliTerm> hamiltonian_at(const FloquetParams& params, const DisorderRealization& h, double t) {
    params.validate();
    require_disorder(params, h);
    if (t < 0.0) throw std::invalid_argument("hamiltonian_at: t must be >= 0");
    const int n = params.n_qubits;
    const double b = params.transverse_field(t);
    std::vector<PauliTerm> terms;
    terms.reserve(static_cast<std::size_t>(3 * n - 1));
    for (int i = 0; i < n; ++i) terms.push_back({h.h[static_cast<std::size_t>(i)], {{i, 'Z'}}});
    for (int i = 0; i < n; ++i) terms.push_back({b, {{i, 'X'}}});
    for (int i = 0; i + 1 < n; ++i) terms.push_back({params.J, {{i, 'Z'}, {i + 1, 'Z'}}});
    return terms;
}

std::vector<double> diagonal_energies(const FloquetParams& params, const DisorderRealization& h) {
    require_disorder(params, h);
    const int n = params.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> diag(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double zi = ((b >> i) & 1U) ? -1.0 : 1.0;
            e += h.h[static_cast<std::size_t>(i)] * zi;
            if (i + 1 < n) e += params.J * zi * (((b >> (i + 1)) & 1U) ? -1.0 : 1.0);
        }
        diag[b] = e;
    }
    return diag;
}

Eigen::MatrixXcd hamiltonian_matrix(const FloquetParams& params, const DisorderRealization& h, double t) {
    const auto diag = diagonal_energies(params, h);
    const auto dim = static_cast<Eigen::Index>(diag.size());
    const double b = params.transverse_field(t);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        H(r, r) = diag[static_cast<std::size_t>(r)];
        for (int j = 0; j < params.n_qubits; ++j) H(r ^ (Eigen::Index{1} << j), r) += b;
    }
    return H;
}

Eigen::MatrixXcd floquet_propagator_fixed(const FloquetParams& params, const DisorderRealization& h, int steps) {
    params.validate();
    require_disorder(params, h);
    if (params.n_qubits > kMaxDenseQubits) {
        throw std::invalid_argument("floquet_propagator: n_qubits " + std::to_string(params.n_qubits) +
                                    " exceeds dense limit " + std::to_string(kMaxDenseQubits));
    }
    const StrangEvolver evolver(params, h, steps, false);
    const std::size_t dim = std::size_t{1} << params.n_qubits;
    // Row b, column c of the identity block lives at b * dim + c.
    std::vector<double> re(dim * dim, 0.0);
    std::vector<double> im(dim * dim, 0.0);
    for (std::size_t b = 0; b < dim; ++b) re[b * dim + b] = 1.0;
    evolver.evolve(re.data(), im.data(), dim);
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd U(n, n);
    for (std::size_t b = 0; b < dim; ++b) {
        for (std::size_t c = 0; c < dim; ++c) {
            U(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = Complex(re[b * dim + c], im[b * dim + c]);
        }
    }
    return U;
}

Eigen::MatrixXcd floquet_propagator(const FloquetParams& params, const DisorderRealization& h,
                                    const IntegratorConfig& cfg, IntegrationReport* report) {
    cfg.validate();
    int steps = cfg.steps_per_period;
    Eigen::MatrixXcd prev = floquet_propagator_fixed(params, h, steps);
    double change = 0.0;
    for (;;) {
        steps = next_refinement(steps, cfg, change);
        Eigen::MatrixXcd cur = floquet_propagator_fixed(params, h, steps);
        change = (cur - prev).cwiseAbs().maxCoeff();
        if (change < cfg.tolerance) {
            if (report) *report = {steps, change};
            return cur;
        }
        prev = std::move(cur);
    }
}

QuantumState apply_period_fixed(const QuantumState& state, const FloquetParams& params,
                                const DisorderRealization& h, int steps, bool inverse) {
    params.validate();
    require_disorder(params, h);
    if (state.n_qubits() != params.n_qubits) {
        throw std::invalid_argument("apply_period: state has " + std::to_string(state.n_qubits()) +
                                    " qubits, params describe " + std::to_string(params.n_qubits));
    }
    QuantumState out = state;
    StrangEvolver(params, h, steps, inverse).evolve(out.amplitudes().data());
    return out;
}

QuantumState apply_period(const QuantumState& state, const FloquetParams& params, const DisorderRealization& h,
                          const IntegratorConfig& cfg, bool inverse, IntegrationReport* report) {
    cfg.validate();
    int steps = cfg.steps_per_period;
    QuantumState prev = apply_period_fixed(state, params, h, steps, inverse);
    double change = 0.0;
    for (;;) {
        steps = next_refinement(steps, cfg, change);
        QuantumState cur = apply_period_fixed(state, params, h, steps, inverse);
        change = max_abs_diff(cur.amplitudes(), prev.amplitudes());
        if (change < cfg.tolerance) {
            if (report) *report = {steps, change};
            return cur;
        }
        prev = std::move(cur);
    }
}

RydbergParams map_to_rydberg(const FloquetParams& params, const DisorderRealization& h, double c6) {
    require_disorder(params, h);
    if (!(params.J > 0.0)) throw std::invalid_argument("map_to_rydberg: J must be > 0");
    if (!(c6 > 0.0)) throw std::invalid_argument("map_to_rydberg: C6 must be > 0");
    RydbergParams r;
    r.c6 = c6;
    r.spacing_a = std::pow(c6 / (4.0 * params.J), 1.0 / 6.0);
    r.omega_drive_max = 2.0 * (params.B0 + std::abs(params.deltaB));
    r.omega_drive_min = 2.0 * (params.B0 - std::abs(params.deltaB));
    const int n = params.n_qubits;
    r.detunings.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Each neighbour bond C6/a^6 n_i n_j contributes +J Z_i.
        const int neighbours = (i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0);
        r.detunings[static_cast<std::size_t>(i)] = 2.0 * params.J * neighbours - 2.0 * h.h[static_cast<std::size_t>(i)];
    }
    return r;
}

}  // namespace mblmc
