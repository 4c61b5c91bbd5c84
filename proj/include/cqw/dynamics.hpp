// Copyright 2026 The chiralwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cqw/common.hpp"
#include "cqw/netgraph.hpp"

namespace cqw {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

inline constexpr double hermiticity_tol = 1e-12;

/// Dense complex Hermitian matrix over the site basis.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols())
            throw dimension_error("HermitianOperator: matrix must be square");
        const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
        if (dev > hermiticity_tol)
            throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
        // Symmetrize away the residual so downstream solvers see an exact input.
        mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
    }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

/// H[n][m] = J_nm * exp(i*theta_nm) for canonical n < m, conjugate below the
/// diagonal, zero elsewhere. On-site terms are added separately when needed.
inline HermitianOperator hamiltonian_from_graph(const PhasedGraph& g) {
    ComplexMatrix h = ComplexMatrix::Zero(g.site_count(), g.site_count());
    for (const Edge& e : g.edges()) {
        const Complex v = std::polar(e.coupling, e.phase);
        h(e.n, e.m) += v;
        h(e.m, e.n) += std::conj(v);
    }
    return HermitianOperator(std::move(h));
}

inline HermitianOperator add_onsite_energies(const HermitianOperator& h,
                                             const std::vector<double>& energies) {
    if (static_cast<int>(energies.size()) != h.dim())
        throw dimension_error("add_onsite_energies: energy count must match dimension");
    ComplexMatrix m = h.matrix();
    for (int i = 0; i < h.dim(); ++i) m(i, i) += energies[static_cast<std::size_t>(i)];
    return HermitianOperator(std::move(m));
}

/// Time reversal acts as complex conjugation in the site basis; on the
/// parameters it maps every hopping phase theta to -theta.
inline HermitianOperator time_reverse(const HermitianOperator& h) {
    return HermitianOperator(h.matrix().conjugate());
}

/// Density operator: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols())
            throw dimension_error("DensityMatrix: matrix must be square");
        if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
        if (std::abs(mat_.trace().real() - 1.0) > 1e-9 || std::abs(mat_.trace().imag()) > 1e-9)
            throw std::invalid_argument("DensityMatrix: trace must equal 1");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (mat_ + mat_.adjoint().eval()),
                                                        Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
    }

    /// |site><site| in dimension dim.
    static DensityMatrix site_basis(int dim, int site) {
        if (site < 0 || site >= dim) throw std::invalid_argument("DensityMatrix: site out of range");
        ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
        m(site, site) = 1.0;
        return DensityMatrix(std::move(m));
    }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const ComplexMatrix& matrix() const { return mat_; }

private:
    ComplexMatrix mat_;
};

/// Time grid plus per-site occupancy probabilities of one evolution.
struct Trajectory {
    std::vector<double> times;
    RealMatrix occupancies;       // row = time index, column = site
    std::vector<double> trace;    // total trace per time point

    int dim() const { return static_cast<int>(occupancies.cols()); }
    std::size_t points() const { return times.size(); }
};

inline std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) throw std::invalid_argument("linspace: need at least two points");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return out;
}

/// Extract <target|rho(t)|target> as a time series.
inline std::vector<double> transfer_probability(const Trajectory& traj, int target) {
    if (target < 0 || target >= traj.dim())
        throw std::invalid_argument("transfer_probability: target out of range");
    std::vector<double> out(traj.points());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = traj.occupancies(static_cast<Eigen::Index>(i), target);
    return out;
}

// ---------------------------------------------------------------------------
// Unitary propagation
// ---------------------------------------------------------------------------

/// Spectral propagator: eigendecomposition of H cached once, states at
/// arbitrary (positive or negative) times evaluated directly.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const HermitianOperator& h) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
        if (es.info() != Eigen::Success)
            throw numerical_error("SpectralPropagator: eigendecomposition failed");
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
    }

    int dim() const { return static_cast<int>(evals_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

    ComplexVector state_from_site(int initial_site, double t) const {
        if (initial_site < 0 || initial_site >= dim())
            throw std::invalid_argument("SpectralPropagator: initial site out of range");
        ComplexVector c = evecs_.row(initial_site).adjoint();  // V^dag |S>
        for (int k = 0; k < dim(); ++k)
            c(k) *= std::exp(Complex(0.0, -evals_(k) * t));
        return evecs_ * c;
    }

    /// P_{S->E}(t) = |<E| exp(-iHt) |S>|^2.
    double site_to_site(int from, int to, double t) const {
        if (to < 0 || to >= dim()) throw std::invalid_argument("SpectralPropagator: target out of range");
        ComplexVector psi = state_from_site(from, t);
        return std::norm(psi(to));
    }

private:
    Eigen::VectorXd evals_;
    ComplexMatrix evecs_;
};

/// Unitary site-basis evolution via the spectral propagator.
inline Trajectory evolve_unitary(const HermitianOperator& h, int initial_site,
                                 const std::vector<double>& times) {
    SpectralPropagator prop(h);
    Trajectory traj;
    traj.times = times;
    traj.occupancies.resize(static_cast<Eigen::Index>(times.size()), h.dim());
    traj.trace.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        ComplexVector psi = prop.state_from_site(initial_site, times[i]);
        for (int s = 0; s < h.dim(); ++s)
            traj.occupancies(static_cast<Eigen::Index>(i), s) = std::norm(psi(s));
        traj.trace[i] = psi.squaredNorm();
    }
    return traj;
}

/// Convenience single-value STP for unitary dynamics.
inline double unitary_stp(const HermitianOperator& h, int from, int to, double t) {
    return SpectralPropagator(h).site_to_site(from, to, t);
}

// ---------------------------------------------------------------------------
// Markovian (Lindblad) propagation
// ---------------------------------------------------------------------------

struct LindbladJump {
    ComplexMatrix op;
    double rate = 0.0;
};

/// Hamiltonian plus jump operators with nonnegative rates.
class LindbladModel {
public:
    LindbladModel(HermitianOperator hamiltonian, std::vector<LindbladJump> jumps)
        : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
        for (const auto& j : jumps_) {
            if (j.op.rows() != hamiltonian_.dim() || j.op.cols() != hamiltonian_.dim())
                throw dimension_error("LindbladModel: jump operator dimension mismatch");
            if (j.rate < 0.0) throw std::invalid_argument("LindbladModel: rates must be >= 0");
        }
    }

    int dim() const { return hamiltonian_.dim(); }
    const HermitianOperator& hamiltonian() const { return hamiltonian_; }
    const std::vector<LindbladJump>& jumps() const { return jumps_; }

    /// drho/dt = -i[H,rho] + sum_k c_k (L rho L^dag - {L^dag L, rho}/2).
    ComplexMatrix apply_generator(const ComplexMatrix& rho) const {
        const ComplexMatrix& h = hamiltonian_.matrix();
        ComplexMatrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
        for (const auto& j : jumps_) {
            if (j.rate == 0.0) continue;
            ComplexMatrix ldl = j.op.adjoint() * j.op;
            out += j.rate * (j.op * rho * j.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
        }
        return out;
    }

private:
    HermitianOperator hamiltonian_;
    std::vector<LindbladJump> jumps_;
};

namespace detail {

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

/// Column-stacked superoperator of the full generator: acting on vec(rho)
/// with vec(A rho B) = (B^T kron A) vec(rho).
inline ComplexMatrix liouvillian_matrix(const LindbladModel& model) {
    const int d = model.dim();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix& h = model.hamiltonian().matrix();
    ComplexMatrix sup = Complex(0.0, -1.0) *
                        (detail::kron(id, h) - detail::kron(h.transpose(), id));
    for (const auto& j : model.jumps()) {
        if (j.rate == 0.0) continue;
        ComplexMatrix ldl = j.op.adjoint() * j.op;
        sup += j.rate * (detail::kron(j.op.conjugate(), j.op) -
                         0.5 * detail::kron(id, ldl) -
                         0.5 * detail::kron(ldl.transpose(), id));
    }
    return sup;
}

namespace detail {

inline void check_time_grid(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("time grid must be nonempty");
    if (times.front() < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("time grid must be strictly ascending");
}

inline bool is_uniform_grid(const std::vector<double>& times) {
    if (times.size() < 3) return true;
    const double h0 = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - h0) > 1e-9 * std::max(1.0, std::abs(h0)))
            return false;
    return true;
}

inline void record_point(Trajectory& traj, std::size_t i, const ComplexMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    double tr = 0.0;
    for (int s = 0; s < d; ++s) {
        const double p = rho(s, s).real();
        traj.occupancies(static_cast<Eigen::Index>(i), s) = p;
        tr += p;
    }
    traj.trace[i] = tr;
}

/// One Dormand-Prince 5(4) step on the vectorized density matrix.
/// Returns the embedded error estimate (max norm, scaled).
template <typename Deriv>
double dopri5_step(const Deriv& f, const ComplexVector& y, double h, ComplexVector& y_out,
                   double atol, double rtol) {
    static const double a21 = 1.0 / 5.0;
    static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static const double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static const double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static const double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static const double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    ComplexVector k1 = f(y);
    ComplexVector k2 = f(y + h * (a21 * k1));
    ComplexVector k3 = f(y + h * (a31 * k1 + a32 * k2));
    ComplexVector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    ComplexVector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    ComplexVector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_out = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    ComplexVector k7 = f(y_out);
    ComplexVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double scaled = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y_out(i)));
        scaled = std::max(scaled, std::abs(err(i)) / sc);
    }
    return scaled;
}

/// Integrate y' = f(y) (autonomous) from t0 to t1 with adaptive steps.
template <typename Deriv>
ComplexVector integrate_adaptive(const Deriv& f, ComplexVector y, double t0, double t1,
                                 double atol = 1e-12, double rtol = 1e-10) {
    double t = t0;
    double h = (t1 - t0) * 0.1;
    if (h <= 0.0) return y;
    ComplexVector y_next(y.size());
    while (t < t1) {
        if (h < 1e-14 * std::max(1.0, std::abs(t1)))
            throw numerical_error("integrate_adaptive: step size underflow");
        const bool clipped = t + h >= t1;
        const double step = clipped ? (t1 - t) : h;
        const double err = dopri5_step(f, y, step, y_next, atol, rtol);
        if (err <= 1.0) {
            y.swap(y_next);
            t += step;
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = step * std::min(5.0, std::max(0.2, grow));
        } else {
            h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    return y;
}

}  // namespace detail

/// Lindblad propagation by exponentiating the dense superoperator once per
/// (uniform) step: scaling-and-squaring, then repeated application.
inline Trajectory evolve_lindblad_expm(const LindbladModel& model, const DensityMatrix& initial,
                                       const std::vector<double>& times) {
    detail::check_time_grid(times);
    if (initial.dim() != model.dim())
        throw dimension_error("evolve_lindblad: state dimension mismatch");
    if (!detail::is_uniform_grid(times))
        throw std::invalid_argument("evolve_lindblad_expm: grid must be uniform");
    const int d = model.dim();
    const ComplexMatrix sup = liouvillian_matrix(model);
    Trajectory traj;
    traj.times = times;
    traj.occupancies.resize(static_cast<Eigen::Index>(times.size()), d);
    traj.trace.resize(times.size());

    ComplexVector v = Eigen::Map<const ComplexVector>(initial.matrix().data(), d * d);
    if (times.front() > 0.0) {
        ComplexMatrix e0 = (sup * times.front()).exp();
        v = e0 * v;
    }
    detail::record_point(traj, 0, Eigen::Map<const ComplexMatrix>(v.data(), d, d));
    if (times.size() > 1) {
        const double h = times[1] - times[0];
        const ComplexMatrix step = (sup * h).exp();
        for (std::size_t i = 1; i < times.size(); ++i) {
            v = step * v;
            detail::record_point(traj, i, Eigen::Map<const ComplexMatrix>(v.data(), d, d));
        }
    }
    return traj;
}

/// Lindblad propagation with an adaptive embedded Runge-Kutta integrator on
/// the vectorized master equation; independent of the exponential route.
inline Trajectory evolve_lindblad_rk45(const LindbladModel& model, const DensityMatrix& initial,
                                       const std::vector<double>& times, double atol = 1e-12,
                                       double rtol = 1e-10) {
    detail::check_time_grid(times);
    if (initial.dim() != model.dim())
        throw dimension_error("evolve_lindblad: state dimension mismatch");
    const int d = model.dim();
    Trajectory traj;
    traj.times = times;
    traj.occupancies.resize(static_cast<Eigen::Index>(times.size()), d);
    traj.trace.resize(times.size());

    auto deriv = [&](const ComplexVector& y) -> ComplexVector {
        Eigen::Map<const ComplexMatrix> rho(y.data(), d, d);
        ComplexMatrix drho = model.apply_generator(rho);
        return Eigen::Map<const ComplexVector>(drho.data(), d * d);
    };
    ComplexVector v = Eigen::Map<const ComplexVector>(initial.matrix().data(), d * d);
    double t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        v = detail::integrate_adaptive(deriv, std::move(v), t, times[i], atol, rtol);
        t = times[i];
        detail::record_point(traj, i, Eigen::Map<const ComplexMatrix>(v.data(), d, d));
    }
    return traj;
}

/// Default entry point: exponential stepping on uniform grids, adaptive
/// integration otherwise.
inline Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& initial,
                                  const std::vector<double>& times) {
    if (detail::is_uniform_grid(times)) return evolve_lindblad_expm(model, initial, times);
    return evolve_lindblad_rk45(model, initial, times);
}

// ---------------------------------------------------------------------------
// Transport metrics
// ---------------------------------------------------------------------------

/// Earliest time the series reaches `level`, located by linear interpolation
/// between bracketing grid points. Empty optional if never reached.
inline std::optional<double> half_arrival_time(const std::vector<double>& series,
                                               const std::vector<double>& times,
                                               double level = 0.5) {
    if (series.size() != times.size())
        throw dimension_error("half_arrival_time: series and grid sizes differ");
    if (series.empty()) return std::nullopt;
    if (series.front() >= level) return times.front();
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i] >= level) {
            const double f = (level - series[i - 1]) / (series[i] - series[i - 1]);
            return times[i - 1] + f * (times[i] - times[i - 1]);
        }
    }
    return std::nullopt;
}

/// nu = 1 / tau.
inline double transport_speed(double tau) {
    if (tau <= 0.0) throw std::invalid_argument("transport_speed: tau must be positive");
    return 1.0 / tau;
}

struct FirstMaximum {
    double time = 0.0;
    double value = 0.0;
    bool boundary = false;  // no interior maximum found; final point reported
};

/// First local maximum by discrete comparison with parabolic refinement.
/// Plateaus resolve to their earliest point; a series with no descent is
/// flagged as boundary and reports the final point.
inline FirstMaximum first_maximum(const std::vector<double>& series,
                                  const std::vector<double>& times) {
    if (series.size() != times.size() || series.empty())
        throw dimension_error("first_maximum: series empty or sizes differ");
    if (series.size() == 1) return {times[0], series[0], true};
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        if (series[i] > series[i + 1]) {
            std::size_t j = i;
            while (j > 0 && series[j - 1] == series[j]) --j;  // earliest point of a plateau
            FirstMaximum fm{times[j], series[j], false};
            if (j == i && j > 0 && series[j - 1] < series[j]) {
                // Strict interior peak: refine with the parabola through the
                // three bracketing samples.
                const double t0 = times[j - 1], t1 = times[j], t2 = times[j + 1];
                const double s0 = series[j - 1], s1 = series[j], s2 = series[j + 1];
                const double d1 = (t1 - t0) * (s1 - s2), d2 = (t1 - t2) * (s1 - s0);
                const double denom = d1 - d2;
                if (std::abs(denom) > 0.0) {
                    const double t_star = t1 - 0.5 * ((t1 - t0) * d1 - (t1 - t2) * d2) / denom;
                    // Lagrange evaluation at the vertex.
                    const double l0 = (t_star - t1) * (t_star - t2) / ((t0 - t1) * (t0 - t2));
                    const double l1 = (t_star - t0) * (t_star - t2) / ((t1 - t0) * (t1 - t2));
                    const double l2 = (t_star - t0) * (t_star - t1) / ((t2 - t0) * (t2 - t1));
                    fm.time = t_star;
                    fm.value = s0 * l0 + s1 * l1 + s2 * l2;
                }
            }
            return fm;
        }
    }
    return {times.back(), series.back(), true};
}

// ---------------------------------------------------------------------------
// Pure-trapping fast path
// ---------------------------------------------------------------------------

/// Exact propagator for models whose only non-unitary channels are one-way
/// absorbers |sink><s|. The system block then evolves under the non-Hermitian
/// H_eff = H - (i/2) sum_s r_s |s><s| and pure states stay pure, so a single
/// eigendecomposition gives the state at arbitrary time. Absorbed weights are
/// the closed-form integrals of the damped site populations.
class TrappedPropagator {
public:
    /// damps: (site, rate) pairs over the system space of `h`.
    TrappedPropagator(const HermitianOperator& h, const std::vector<std::pair<int, double>>& damps)
        : dim_(h.dim()) {
        ComplexMatrix heff = h.matrix();
        rates_.assign(static_cast<std::size_t>(dim_), 0.0);
        for (const auto& [site, rate] : damps) {
            if (site < 0 || site >= dim_)
                throw std::invalid_argument("TrappedPropagator: damped site out of range");
            if (rate < 0.0) throw std::invalid_argument("TrappedPropagator: rate must be >= 0");
            heff(site, site) -= Complex(0.0, 0.5 * rate);
            rates_[static_cast<std::size_t>(site)] += rate;
        }
        Eigen::ComplexEigenSolver<ComplexMatrix> es(heff);
        if (es.info() != Eigen::Success)
            throw numerical_error("TrappedPropagator: eigendecomposition failed");
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        vinv_ = evecs_.partialPivLu().solve(ComplexMatrix::Identity(dim_, dim_));
        const double resid = (evecs_ * evals_.asDiagonal() * vinv_ - heff).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, heff.cwiseAbs().maxCoeff());
        if (!(resid < 1e-8 * scale))
            throw numerical_error("TrappedPropagator: eigenbasis is ill-conditioned");
    }

    int dim() const { return dim_; }

    ComplexVector state_from_site(int initial_site, double t) const {
        ComplexVector c = coeffs(initial_site);
        for (int k = 0; k < dim_; ++k) c(k) *= std::exp(Complex(0.0, -1.0) * evals_(k) * t);
        return evecs_ * c;
    }

    /// Survival probability |psi(t)|^2 (monotone nonincreasing).
    double survival(int initial_site, double t) const {
        return state_from_site(initial_site, t).squaredNorm();
    }

    /// Total absorbed probability across all sinks.
    double absorbed(int initial_site, double t) const { return 1.0 - survival(initial_site, t); }

    /// Probability absorbed through the sink attached at `site` up to time t:
    /// r * Integral_0^t |psi_site|^2. Pass t = infinity for the asymptote.
    double absorbed_at(int initial_site, int site, double t) const {
        if (site < 0 || site >= dim_) throw std::invalid_argument("TrappedPropagator: site out of range");
        const double rate = rates_[static_cast<std::size_t>(site)];
        if (rate == 0.0) return 0.0;
        const ComplexVector c = coeffs(initial_site);
        const bool infinite = !std::isfinite(t);
        double integral = 0.0;
        for (int j = 0; j < dim_; ++j) {
            const Complex wj = std::conj(evecs_(site, j) * c(j));
            if (wj == Complex(0.0, 0.0)) continue;
            for (int k = 0; k < dim_; ++k) {
                const Complex w = wj * evecs_(site, k) * c(k);
                // |psi_site(t)|^2 term: w * exp(mu t), mu = i(conj(l_j) - l_k).
                const Complex mu = Complex(0.0, 1.0) * (std::conj(evals_(j)) - evals_(k));
                if (infinite) {
                    if (mu.real() < -1e-13) integral += (-w / mu).real();
                    // Undamped pairs carry no weight at damped sites.
                } else if (std::abs(mu) < 1e-13) {
                    integral += (w * t).real();
                } else {
                    integral += (w * (std::exp(mu * t) - 1.0) / mu).real();
                }
            }
        }
        return rate * integral;
    }

    /// Earliest time the total absorbed probability reaches `level`, found by
    /// bracket doubling plus bisection (valid because absorption is monotone).
    std::optional<double> absorption_half_time(int initial_site, double level = 0.5,
                                               double t_max = 16384.0) const {
        double hi = 1.0;
        while (absorbed(initial_site, hi) < level) {
            hi *= 2.0;
            if (hi > t_max) return std::nullopt;
        }
        double lo = 0.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (absorbed(initial_site, mid) >= level ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    ComplexVector coeffs(int initial_site) const {
        if (initial_site < 0 || initial_site >= dim_)
            throw std::invalid_argument("TrappedPropagator: initial site out of range");
        return vinv_.col(initial_site);
    }

    int dim_;
    std::vector<double> rates_;
    ComplexVector evals_;
    ComplexMatrix evecs_;
    ComplexMatrix vinv_;
};

}  // namespace cqw
