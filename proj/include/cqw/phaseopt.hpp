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

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cqw/common.hpp"
#include "cqw/systems.hpp"

namespace cqw {

/// Decision variable of the optimizer: phases (canonical-orientation values
/// in (-pi, pi]) on a designated subset of edges.
struct PhaseAssignment {
    std::vector<std::pair<int, int>> edges;
    std::vector<double> values;

    void validate_against(const PhasedGraph& g) const {
        if (edges.size() != values.size())
            throw dimension_error("PhaseAssignment: edge/value count mismatch");
        for (const auto& [n, m] : edges)
            if (!g.has_edge(n, m))
                throw std::invalid_argument("PhaseAssignment: edge not present in graph");
    }
};

inline PhasedGraph apply_phase_assignment(const PhasedGraph& g, const PhaseAssignment& pa) {
    pa.validate_against(g);
    PhasedGraph out = g;
    for (std::size_t i = 0; i < pa.edges.size(); ++i)
        out.set_edge_phase(*out.edge_index(pa.edges[i].first, pa.edges[i].second), pa.values[i]);
    return out;
}

/// Transport figure of merit for one propagation.
struct Objective {
    enum class Kind { occupancy_at_time, half_arrival_time, first_max };

    Kind kind = Kind::occupancy_at_time;
    int site = 0;            // model-space index; >= system_dim() addresses a sink
    double at_time = 0.0;    // for occupancy_at_time
    bool maximize = true;    // half-arrival objectives usually minimize
    double horizon = -1.0;   // < 0: use the system default
    int grid_points = 2000;

    static Objective occupancy(int site, double t) {
        return {Kind::occupancy_at_time, site, t, true, -1.0, 2000};
    }
    static Objective half_arrival(int site) {
        return {Kind::half_arrival_time, site, 0.0, false, -1.0, 2000};
    }
    static Objective first_max_value(int site) {
        return {Kind::first_max, site, 0.0, true, -1.0, 2000};
    }
};

namespace detail {

inline double eval_system(const ExperimentSystem& sys, const Objective& obj) {
    sys.validate();
    if (obj.site < 0 || obj.site >= sys.model_dim())
        throw std::invalid_argument("Objective: site out of range");
    const double horizon = obj.horizon > 0.0 ? obj.horizon : sys.default_horizon;
    const bool sink_target = obj.site >= sys.system_dim();

    if (sys.absorbers.empty() && sys.dephasing_rate == 0.0) {
        // Closed system: spectral propagation only.
        SpectralPropagator prop(system_hamiltonian(sys));
        if (obj.kind == Objective::Kind::occupancy_at_time)
            return prop.site_to_site(sys.start_site, obj.site, obj.at_time);
        const auto times = linspace(0.0, horizon, obj.grid_points);
        std::vector<double> series(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            series[i] = prop.site_to_site(sys.start_site, obj.site, times[i]);
        if (obj.kind == Objective::Kind::half_arrival_time) {
            auto tau = half_arrival_time(series, times);
            return tau ? *tau : std::numeric_limits<double>::infinity();
        }
        return first_maximum(series, times).value;
    }

    if (pure_trapping(sys)) {
        const TrappedPropagator prop = trapped_propagator(sys);
        if (obj.kind == Objective::Kind::occupancy_at_time) {
            if (sink_target)
                return absorbed_in(sys, prop,
                                   sys.absorbers[static_cast<std::size_t>(obj.site - sys.system_dim())],
                                   obj.at_time);
            return std::norm(prop.state_from_site(sys.start_site, obj.at_time)(obj.site));
        }
        if (obj.kind == Objective::Kind::half_arrival_time && sink_target &&
            sys.absorbers.size() == 1) {
            auto tau = prop.absorption_half_time(sys.start_site);
            return tau ? *tau : std::numeric_limits<double>::infinity();
        }
        // Remaining pure-trapping metrics go through a dense grid on the
        // trapped propagator.
        const auto times = linspace(0.0, horizon, obj.grid_points);
        std::vector<double> series(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            series[i] = sink_target
                ? absorbed_in(sys, prop,
                              sys.absorbers[static_cast<std::size_t>(obj.site - sys.system_dim())],
                              times[i])
                : std::norm(prop.state_from_site(sys.start_site, times[i])(obj.site));
        }
        if (obj.kind == Objective::Kind::half_arrival_time) {
            auto tau = half_arrival_time(series, times);
            return tau ? *tau : std::numeric_limits<double>::infinity();
        }
        return first_maximum(series, times).value;
    }

    // General open-system path.
    if (obj.kind == Objective::Kind::occupancy_at_time) {
        LindbladModel model = assemble_lindblad(sys);
        if (obj.at_time == 0.0) return obj.site == sys.start_site ? 1.0 : 0.0;
        Trajectory traj = evolve_lindblad_expm(
            model, DensityMatrix::site_basis(model.dim(), sys.start_site),
            {0.0, obj.at_time});
        return traj.occupancies(1, obj.site);
    }
    Trajectory traj = run_open(sys, linspace(0.0, horizon, obj.grid_points));
    auto series = transfer_probability(traj, obj.site);
    if (obj.kind == Objective::Kind::half_arrival_time) {
        auto tau = half_arrival_time(series, traj.times);
        return tau ? *tau : std::numeric_limits<double>::infinity();
    }
    return first_maximum(series, traj.times).value;
}

}  // namespace detail

/// Apply the assignment, propagate, and return the raw objective value.
inline double evaluate(const ExperimentSystem& sys, const PhaseAssignment& assignment,
                       const Objective& obj) {
    ExperimentSystem cur = sys;
    cur.graph = apply_phase_assignment(sys.graph, assignment);
    return detail::eval_system(cur, obj);
}

/// Objective value per phase for a one-edge sweep.
inline std::vector<double> landscape_scan(const ExperimentSystem& sys, std::pair<int, int> edge,
                                          const std::vector<double>& phase_grid,
                                          const Objective& obj) {
    std::vector<double> out;
    out.reserve(phase_grid.size());
    PhaseAssignment pa{{edge}, {0.0}};
    for (double th : phase_grid) {
        pa.values[0] = th;
        out.push_back(evaluate(sys, pa, obj));
    }
    return out;
}

struct OptimizeOptions {
    int max_iterations = 500;   // per restart
    double objective_tol = 1e-6;
    double initial_step = 0.6;  // radians
};

struct OptimizeResult {
    PhaseAssignment assignment;
    double value = 0.0;
    double baseline = 0.0;  // objective at the system's current phases
    int restarts = 0;
    std::uint64_t seed = 0;
    std::vector<double> restart_values;  // best value per restart
};

namespace detail {

/// Nelder-Mead with adaptive wraparound: the objective is 2pi-periodic per
/// coordinate, simplex vertices are rigidly shifted by multiples of 2pi
/// whenever the centroid drifts out of (-pi, pi], which keeps coordinates
/// bounded without tearing the simplex.
template <typename F>
std::pair<std::vector<double>, double> nelder_mead_max(const F& f, std::vector<double> x0,
                                                       const OptimizeOptions& opts) {
    const std::size_t k = x0.size();
    struct Vertex {
        std::vector<double> x;
        double score;  // maximized
    };
    std::vector<Vertex> simplex;
    simplex.reserve(k + 1);
    simplex.push_back({x0, f(x0)});
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> x = x0;
        x[i] += opts.initial_step;
        simplex.push_back({x, f(x)});
    }
    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.score > b.score; });
    };
    order();
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (std::abs(simplex.front().score - simplex.back().score) < opts.objective_tol) break;
        // Centroid of all but the worst.
        std::vector<double> centroid(k, 0.0);
        for (std::size_t v = 0; v < k; ++v)
            for (std::size_t i = 0; i < k; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(k);
        // Rigid wrap: shift every vertex together per coordinate.
        for (std::size_t i = 0; i < k; ++i) {
            const double shift = wrap_phase(centroid[i]) - centroid[i];
            if (shift != 0.0) {
                centroid[i] += shift;
                for (auto& v : simplex) v.x[i] += shift;
            }
        }
        auto blend = [&](double coeff) {
            std::vector<double> x(k);
            for (std::size_t i = 0; i < k; ++i)
                x[i] = centroid[i] + coeff * (centroid[i] - simplex.back().x[i]);
            return x;
        };
        std::vector<double> xr = blend(1.0);
        const double fr = f(xr);
        if (fr > simplex.front().score) {
            std::vector<double> xe = blend(2.0);
            const double fe = f(xe);
            simplex.back() = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr > simplex[k - 1].score) {
            simplex.back() = {xr, fr};
        } else {
            const bool outside = fr > simplex.back().score;
            std::vector<double> xc = blend(outside ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc > (outside ? fr : simplex.back().score)) {
                simplex.back() = {xc, fc};
            } else {
                // Shrink towards the best vertex.
                for (std::size_t v = 1; v <= k; ++v) {
                    for (std::size_t i = 0; i < k; ++i)
                        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].score = f(simplex[v].x);
                }
            }
        }
        order();
    }
    return {simplex.front().x, simplex.front().score};
}

}  // namespace detail

/// Multistart simplex maximization of the objective over the listed edges'
/// phases. Restart 0 starts from the system's current phases, the rest from
/// seeded uniform draws; ties resolve to the lowest restart index, so results
/// are reproducible bit for bit under a fixed seed.
inline OptimizeResult optimize(const ExperimentSystem& sys,
                               const std::vector<std::pair<int, int>>& edges,
                               const Objective& obj, int restarts, std::uint64_t seed,
                               const OptimizeOptions& opts = {}) {
    if (restarts < 1) throw std::invalid_argument("optimize: need at least one restart");
    PhaseAssignment pa;
    pa.edges = edges;
    pa.values.assign(edges.size(), 0.0);
    pa.validate_against(sys.graph);
    const std::size_t k = edges.size();

    auto score_of = [&](double raw) {
        return obj.maximize ? raw : (std::isfinite(raw) ? -raw : -std::numeric_limits<double>::infinity());
    };
    auto f = [&](const std::vector<double>& x) {
        PhaseAssignment cand = pa;
        for (std::size_t i = 0; i < k; ++i) cand.values[i] = wrap_phase(x[i]);
        return score_of(evaluate(sys, cand, obj));
    };

    std::vector<double> baseline_x(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Edge& e = sys.graph.edges()[static_cast<std::size_t>(
            *sys.graph.edge_index(edges[i].first, edges[i].second))];
        baseline_x[i] = e.phase;
    }
    const double baseline_raw = evaluate(
        sys, PhaseAssignment{edges, baseline_x}, obj);

    Rng rng(seed);
    OptimizeResult result;
    result.restarts = restarts;
    result.seed = seed;
    result.baseline = baseline_raw;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<double> best_x = baseline_x;
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> x0(k);
        if (r == 0) {
            x0 = baseline_x;
        } else {
            for (std::size_t i = 0; i < k; ++i) x0[i] = rng.uniform(-pi, pi);
        }
        auto [x, score] = k == 0 ? std::make_pair(x0, f(x0))
                                 : detail::nelder_mead_max(f, std::move(x0), opts);
        result.restart_values.push_back(obj.maximize ? score : -score);
        if (score > best_score) {
            best_score = score;
            best_x = std::move(x);
        }
    }
    result.assignment = pa;
    for (std::size_t i = 0; i < k; ++i) result.assignment.values[i] = wrap_phase(best_x[i]);
    result.value = obj.maximize ? best_score : -best_score;
    return result;
}

}  // namespace cqw
