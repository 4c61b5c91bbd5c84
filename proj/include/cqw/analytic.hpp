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
#include <vector>

#include "cqw/common.hpp"
#include "cqw/dynamics.hpp"
#include "cqw/netgraph.hpp"

namespace cqw {

/// Homogeneous polygon (unit couplings): N sites on a ring, uniform per-edge
/// phase phi along the ring orientation, walker from S to E.
struct PolygonSpec {
    int n_sites = 3;
    double phase_per_edge = 0.0;
    int start = 0;
    int end = 0;

    void validate() const {
        if (n_sites < 3) throw std::invalid_argument("PolygonSpec: need at least 3 sites");
        if (start < 0 || start >= n_sites || end < 0 || end >= n_sites)
            throw std::invalid_argument("PolygonSpec: site out of range");
    }
};

/// Fourier spectrum of the phased ring: E_k = 2 cos(2 pi k / N - phi).
inline std::vector<double> polygon_spectrum(const PolygonSpec& spec) {
    spec.validate();
    std::vector<double> evals(static_cast<std::size_t>(spec.n_sites));
    for (int k = 0; k < spec.n_sites; ++k)
        evals[static_cast<std::size_t>(k)] =
            2.0 * std::cos(2.0 * pi * k / spec.n_sites - spec.phase_per_edge);
    return evals;
}

/// Closed-form site-to-site transfer probability on the homogeneous polygon:
///   P(t) = | (1/N) sum_k exp(-i (2 t cos(2 pi k/N - phi) + 2 pi k (E-S)/N)) |^2.
inline double polygon_stp(const PolygonSpec& spec, double t) {
    spec.validate();
    const int n = spec.n_sites;
    const int hop = spec.end - spec.start;
    Complex amp(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
        const double phase = 2.0 * t * std::cos(2.0 * pi * k / n - spec.phase_per_edge) +
                             2.0 * pi * k * hop / n;
        amp += std::exp(Complex(0.0, -phase));
    }
    amp /= static_cast<double>(n);
    return std::norm(amp);
}

/// Max antipodal STP over the grid for an even cycle with loop phase pi
/// (phi = pi/N per edge). Transport to the opposite site is fully blocked,
/// so the contract is a value <= 1e-10.
inline double even_cycle_suppression_check(int n_sites, const std::vector<double>& t_grid) {
    if (n_sites < 4 || n_sites % 2 != 0)
        throw std::invalid_argument("even_cycle_suppression_check: N must be even and >= 4");
    PolygonSpec spec{n_sites, pi / n_sites, 0, n_sites / 2};
    double worst = 0.0;
    for (double t : t_grid) worst = std::max(worst, polygon_stp(spec, t));
    return worst;
}

namespace detail {

/// Golden-section maximization on [lo, hi] for a unimodal objective.
template <typename F>
std::pair<double, double> golden_max(const F& f, double lo, double hi, double xtol = 1e-10) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace detail

/// First maximum (time, value) of P_{1->2}(t) on the 3-site loop with
/// couplings (J12, J23, J13) and loop phase theta gauged onto edge 1-2.
/// Coarse scan at one thousandth of the fastest oscillation period, then
/// golden-section refinement in the bracketing interval.
inline std::pair<double, double> triangle_analytic_peak(double j12, double j23, double j13,
                                                        double theta, double t_max = 40.0) {
    if (j12 <= 0.0 || j23 <= 0.0 || j13 <= 0.0)
        throw std::invalid_argument("triangle_analytic_peak: couplings must be positive");
    PhasedGraph g(3);
    g.add_edge(0, 1, j12, theta);
    g.add_edge(1, 2, j23, 0.0);
    g.add_edge(0, 2, j13, 0.0);
    SpectralPropagator prop(hamiltonian_from_graph(g));
    const double spread = prop.eigenvalues().maxCoeff() - prop.eigenvalues().minCoeff();
    const double dt = (2.0 * pi / spread) * 1e-3;
    auto p12 = [&](double t) { return prop.site_to_site(0, 1, t); };

    double prev2 = p12(0.0), prev1 = p12(dt);
    for (double t = 2.0 * dt; t <= t_max; t += dt) {
        const double cur = p12(t);
        if (prev1 >= prev2 && prev1 > cur) {
            auto [t_star, val] = detail::golden_max(p12, t - 2.0 * dt, t, 1e-12);
            return {t_star, val};
        }
        prev2 = prev1;
        prev1 = cur;
    }
    return {t_max, p12(t_max)};  // no interior maximum in range
}

}  // namespace cqw
