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

// cqwalk: command-line runner for the chiral-quantum-walk experiments.
// Subcommands emit CSV/JSON data files plus a manifest echoing every
// parameter. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cqw/analytic.hpp"
#include "cqw/dynamics.hpp"
#include "cqw/io.hpp"
#include "cqw/ion.hpp"
#include "cqw/netgraph.hpp"
#include "cqw/phaseopt.hpp"
#include "cqw/systems.hpp"

namespace fs = std::filesystem;
using namespace cqw;

namespace {

#ifndef CQW_DEFAULT_FMO_DATA
#define CQW_DEFAULT_FMO_DATA "data/fmo_hamiltonian.json"
#endif

struct CommonOpts {
    std::string out;
    std::string format = "csv";
    int grid_points = 2000;
    double horizon = -1.0;  // < 0: subcommand default
};

void add_common(CLI::App* sub, CommonOpts& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--format", c.format, "trajectory file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--grid-points", c.grid_points, "time grid resolution")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--horizon", c.horizon, "time horizon (subcommand default when omitted)");
}

fs::path prepare_out(const CommonOpts& c) {
    fs::path dir(c.out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& sub, json params) {
    params["subcommand"] = sub;
    write_json_file((dir / "manifest.json").string(), params);
}

/// Linear interpolation of a sampled series at time t.
double series_at(const std::vector<double>& series, const std::vector<double>& times, double t) {
    if (t <= times.front()) return series.front();
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] >= t) {
            const double f = (t - times[i - 1]) / (times[i] - times[i - 1]);
            return series[i - 1] + f * (series[i] - series[i - 1]);
        }
    }
    return series.back();
}

std::string traj_name(const std::string& stem, const std::string& format) {
    return stem + "." + format;
}

std::optional<double> tau_from_traj(const Trajectory& traj, int site) {
    return half_arrival_time(transfer_probability(traj, site), traj.times);
}

json opt_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json();
}

// ---------------------------------------------------------------------------
// switch
// ---------------------------------------------------------------------------

struct SwitchOpts {
    CommonOpts common;
    double theta = pi / 2;
    double trap_rate = 1.0;
    bool no_trap = false;
    int input_arm = 1;
    int output_arm = 2;
};

int run_switch(const SwitchOpts& o) {
    const double horizon = o.common.horizon > 0 ? o.common.horizon : 20.0;
    const fs::path dir = prepare_out(o.common);
    auto times = linspace(0.0, horizon, o.common.grid_points);

    SwitchExperiment open_sw = build_switch({o.theta, o.input_arm, o.output_arm, 0.0});
    Trajectory unitary = run_unitary(open_sw.system, times);
    write_trajectory_file((dir / traj_name("switch_unitary", o.common.format)).string(),
                          unitary, o.common.format);

    auto pe = transfer_probability(unitary, open_sw.pole_e);
    auto pf = transfer_probability(unitary, open_sw.pole_f);
    FirstMaximum max_e = first_maximum(pe, times);
    FirstMaximum max_f = first_maximum(pf, times);

    json summary{{"theta", o.theta},
                 {"pole_e", open_sw.pole_e},
                 {"pole_f", open_sw.pole_f},
                 {"first_max_e", {{"t", max_e.time}, {"value", max_e.value}, {"boundary", max_e.boundary}}},
                 {"first_max_f", {{"t", max_f.time}, {"value", max_f.value}, {"boundary", max_f.boundary}}}};

    if (!o.no_trap && o.trap_rate > 0.0) {
        SwitchExperiment trapped = build_switch({o.theta, o.input_arm, o.output_arm, o.trap_rate});
        Trajectory open_traj = run_open(trapped.system, times);
        write_trajectory_file((dir / traj_name("switch_trapped", o.common.format)).string(),
                              open_traj, o.common.format);
        TrappedPropagator prop = trapped_propagator(trapped.system);
        const double inf = std::numeric_limits<double>::infinity();
        summary["trap_rate"] = o.trap_rate;
        summary["tau_half_sink_e"] =
            opt_to_json(tau_from_traj(open_traj, trapped.system.absorber_site("sink_e")));
        summary["efficiency_e"] = absorbed_in(trapped.system, prop, trapped.system.absorbers[0], inf);
        summary["efficiency_f"] = absorbed_in(trapped.system, prop, trapped.system.absorbers[1], inf);
    }
    write_json_file((dir / "summary.json").string(), summary);
    write_manifest(dir, "switch",
                   json{{"theta", o.theta},
                        {"trap_rate", o.no_trap ? 0.0 : o.trap_rate},
                        {"input_arm", o.input_arm},
                        {"output_arm", o.output_arm},
                        {"horizon", horizon},
                        {"grid_points", o.common.grid_points},
                        {"format", o.common.format}});
    std::cout << "switch: wrote " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

struct ChainOpts {
    CommonOpts common;
    int triangles = 8;
    std::vector<double> thetas;
    double trap_rate = 1.0;
    std::vector<int> sweep_sizes;
};

int run_chain(const ChainOpts& o) {
    const double horizon = o.common.horizon > 0 ? o.common.horizon : 60.0;
    const fs::path dir = prepare_out(o.common);
    std::vector<double> thetas = o.thetas.empty() ? std::vector<double>{0.0, -pi / 2} : o.thetas;
    auto times = linspace(0.0, horizon, o.common.grid_points);

    json per_theta = json::array();
    std::optional<double> tau_achiral;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        ChainExperiment chain =
            build_triangle_chain({o.triangles, thetas[i], o.trap_rate > 0.0, o.trap_rate});
        Trajectory traj = o.trap_rate > 0.0 ? run_open(chain.system, times)
                                            : run_unitary(chain.system, times);
        write_trajectory_file(
            (dir / traj_name("chain_theta_" + std::to_string(i), o.common.format)).string(),
            traj, o.common.format);
        json entry{{"theta", thetas[i]}};
        if (o.trap_rate > 0.0) {
            auto tau = tau_from_traj(traj, chain.system.tracked_site());
            entry["tau_half"] = opt_to_json(tau);
            if (thetas[i] == 0.0) tau_achiral = tau;
        } else {
            auto series = transfer_probability(traj, chain.system.target_site);
            FirstMaximum fm = first_maximum(series, times);
            entry["first_max"] = {{"t", fm.time}, {"value", fm.value}};
        }
        per_theta.push_back(std::move(entry));
    }
    if (tau_achiral) {
        for (auto& entry : per_theta) {
            if (!entry.contains("tau_half") || entry["tau_half"].is_null()) continue;
            const double tau = entry["tau_half"].get<double>();
            entry["speed_ratio_vs_achiral"] = *tau_achiral / tau;
        }
    }
    json summary{{"per_theta", std::move(per_theta)}};

    if (!o.sweep_sizes.empty()) {
        json sweep = json::array();
        for (double theta : thetas) {
            std::vector<double> ns, taus;
            for (int n : o.sweep_sizes) {
                ChainExperiment chain = build_triangle_chain({n, theta, true, o.trap_rate});
                auto tau = trapped_propagator(chain.system).absorption_half_time(0);
                if (!tau) continue;
                ns.push_back(static_cast<double>(n));
                taus.push_back(*tau);
            }
            // Least-squares line plus R^2.
            json fit;
            if (ns.size() >= 2) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (std::size_t i = 0; i < ns.size(); ++i) {
                    sx += ns[i]; sy += taus[i]; sxx += ns[i] * ns[i]; sxy += ns[i] * taus[i];
                }
                const double m = static_cast<double>(ns.size());
                const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
                const double intercept = (sy - slope * sx) / m;
                double ss_res = 0, ss_tot = 0;
                const double mean = sy / m;
                for (std::size_t i = 0; i < ns.size(); ++i) {
                    const double pred = slope * ns[i] + intercept;
                    ss_res += (taus[i] - pred) * (taus[i] - pred);
                    ss_tot += (taus[i] - mean) * (taus[i] - mean);
                }
                fit = json{{"slope", slope}, {"intercept", intercept},
                           {"r2", ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0}};
            }
            sweep.push_back(json{{"theta", theta}, {"sizes", ns}, {"tau_half", taus}, {"fit", fit}});
        }
        summary["size_sweep"] = std::move(sweep);
    }
    write_json_file((dir / "summary.json").string(), summary);
    write_manifest(dir, "chain",
                   json{{"triangles", o.triangles},
                        {"thetas", thetas},
                        {"trap_rate", o.trap_rate},
                        {"sweep_sizes", o.sweep_sizes},
                        {"horizon", horizon},
                        {"grid_points", o.common.grid_points},
                        {"format", o.common.format}});
    std::cout << "chain: wrote " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// polygon
// ---------------------------------------------------------------------------

struct PolygonOpts {
    CommonOpts common;
    int sites = 4;
    double phi = pi / 4;
    int start = 0;
    int end = -1;  // default N/2
};

int run_polygon(const PolygonOpts& o) {
    const double horizon = o.common.horizon > 0 ? o.common.horizon : 30.0;
    const fs::path dir = prepare_out(o.common);
    const int end = o.end >= 0 ? o.end : o.sites / 2;
    PolygonSpec spec{o.sites, o.phi, o.start, end};
    spec.validate();
    SpectralPropagator prop(hamiltonian_from_graph(generate_cycle(o.sites, 1.0, o.phi)));
    auto times = linspace(0.0, horizon, o.common.grid_points);

    std::ofstream os(dir / "polygon_overlay.csv");
    if (!os) throw std::runtime_error("cannot open polygon_overlay.csv");
    os << "t,analytic,numeric,abs_diff\n";
    double worst = 0.0;
    for (double t : times) {
        const double a = polygon_stp(spec, t);
        const double n = prop.site_to_site(o.start, end, t);
        worst = std::max(worst, std::abs(a - n));
        os << format_double(t) << ',' << format_double(a) << ',' << format_double(n) << ','
           << format_double(std::abs(a - n)) << '\n';
    }
    write_json_file((dir / "summary.json").string(),
                    json{{"sites", o.sites},
                         {"phi_per_edge", o.phi},
                         {"loop_sum", wrap_phase(o.sites * o.phi)},
                         {"start", o.start},
                         {"end", end},
                         {"max_abs_deviation", worst}});
    write_manifest(dir, "polygon",
                   json{{"sites", o.sites}, {"phi", o.phi}, {"start", o.start}, {"end", end},
                        {"horizon", horizon}, {"grid_points", o.common.grid_points}});
    std::cout << "polygon: wrote " << dir.string() << " (max deviation " << worst << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// fmo
// ---------------------------------------------------------------------------

struct FmoOpts {
    CommonOpts common;
    std::string phase_set = "a1";
    bool optimize_phases = false;
    int restarts = 32;
    std::uint64_t seed = 1;
    std::string data_path = CQW_DEFAULT_FMO_DATA;
    double dephasing = 9.0;
    double recombination = 0.001;
    double trap_rate = 1.0;
};

int run_fmo(const FmoOpts& o) {
    const double horizon = o.common.horizon > 0 ? o.common.horizon : 10.0;
    const fs::path dir = prepare_out(o.common);
    FmoHamiltonianData data = load_fmo_data(o.data_path);
    const FmoParams rates{o.dephasing, o.recombination, o.trap_rate};
    auto times = linspace(0.0, horizon, o.common.grid_points);

    FmoExperiment base = build_fmo(data, rates);
    const int sink = base.system.absorber_site("sink");
    Trajectory base_traj = run_open(base.system, times);
    write_trajectory_file((dir / traj_name("fmo_achiral", o.common.format)).string(), base_traj,
                          o.common.format);
    auto tau0 = tau_from_traj(base_traj, sink);

    json summary{{"tau_half_achiral_ps", opt_to_json(tau0)}, {"phase_set", o.phase_set}};

    FmoExperiment chiral = build_fmo(data, rates);
    bool have_chiral = false;
    if (o.optimize_phases) {
        std::vector<std::pair<int, int>> edges;
        for (const auto& [n1, m1, th] : fmo_phase_set_a1()) edges.emplace_back(n1 - 1, m1 - 1);
        if (!tau0) throw numerical_error("fmo: achiral half-arrival not reached; extend --horizon");
        Objective obj = Objective::occupancy(sink, *tau0);
        OptimizeResult res = optimize(chiral.system, edges, obj, o.restarts, o.seed);
        chiral.system.graph = apply_phase_assignment(chiral.system.graph, res.assignment);
        write_json_file((dir / "optimization.json").string(), optimize_report_to_json(res));
        have_chiral = true;
    } else if (o.phase_set == "a1") {
        apply_fmo_phase_table(chiral, fmo_phase_set_a1());
        have_chiral = true;
    } else if (o.phase_set == "a2") {
        apply_fmo_phase_table(chiral, fmo_phase_set_a2());
        have_chiral = true;
    }

    if (have_chiral) {
        Trajectory chiral_traj = run_open(chiral.system, times);
        write_trajectory_file((dir / traj_name("fmo_chiral", o.common.format)).string(),
                              chiral_traj, o.common.format);
        // Occupancy difference of the reaction-centre sink vs the achiral run.
        std::ofstream os(dir / "fmo_difference.csv");
        os << "t,sink_chiral,sink_achiral,difference\n";
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double a = chiral_traj.occupancies(static_cast<Eigen::Index>(i), sink);
            const double b = base_traj.occupancies(static_cast<Eigen::Index>(i), sink);
            os << format_double(times[i]) << ',' << format_double(a) << ',' << format_double(b)
               << ',' << format_double(a - b) << '\n';
        }
        auto tau1 = tau_from_traj(chiral_traj, sink);
        summary["tau_half_chiral_ps"] = opt_to_json(tau1);
        if (tau0 && tau1) {
            summary["speed_enhancement"] = *tau0 / *tau1 - 1.0;
            const double occ = series_at(transfer_probability(chiral_traj, sink), times, *tau0);
            summary["occupancy_gain_at_achiral_tau"] = occ / 0.5 - 1.0;
        }
    }
    write_json_file((dir / "summary.json").string(), summary);
    write_manifest(dir, "fmo",
                   json{{"phase_set", o.phase_set}, {"optimize", o.optimize_phases},
                        {"restarts", o.restarts}, {"seed", o.seed}, {"fmo_data", o.data_path},
                        {"dephasing", o.dephasing}, {"recombination", o.recombination},
                        {"trap_rate", o.trap_rate}, {"horizon", horizon},
                        {"grid_points", o.common.grid_points}, {"format", o.common.format}});
    std::cout << "fmo: wrote " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// ws-ensemble
// ---------------------------------------------------------------------------

struct WsOpts {
    CommonOpts common;
    std::vector<double> ps;
    int realizations = 20;
    std::uint64_t seed = 1000;
    int sites = 32;
    int degree = 4;
    double trap_rate = 1.0;
    int restarts = 8;
    int workers = 1;
};

struct WsRow {
    std::uint64_t seed = 0;
    int degree_e = 0;
    double tau_base = 0.0;
    double tau_opt = 0.0;
    bool valid = false;
};

int run_ws(const WsOpts& o) {
    const fs::path dir = prepare_out(o.common);
    std::vector<double> ps = o.ps.empty() ? std::vector<double>{0.2} : o.ps;
    json per_p = json::array();

    for (double p : ps) {
        std::vector<WsRow> rows(static_cast<std::size_t>(o.realizations));
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= o.realizations) return;
                WsRow row;
                // Deterministic per-slot seeds; skip forward on dead baselines.
                std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
                for (int hop = 0; hop < 50; ++hop, seed += static_cast<std::uint64_t>(o.realizations) * 64) {
                    WsExperiment ws = build_ws_experiment(
                        {o.sites, o.degree, p, seed, o.trap_rate});
                    auto tau0 = trapped_propagator(ws.system).absorption_half_time(0);
                    if (!tau0) continue;
                    std::vector<std::pair<int, int>> edges;
                    for (const Edge& e : ws.system.graph.edges())
                        if (e.n == ws.system.target_site || e.m == ws.system.target_site)
                            edges.emplace_back(e.n, e.m);
                    Objective obj = Objective::occupancy(ws.system.tracked_site(), *tau0);
                    OptimizeResult res =
                        optimize(ws.system, edges, obj, o.restarts, seed ^ 0x9e3779b97f4a7c15ull);
                    ExperimentSystem tuned = ws.system;
                    tuned.graph = apply_phase_assignment(ws.system.graph, res.assignment);
                    auto tau1 = trapped_propagator(tuned).absorption_half_time(0);
                    row.seed = seed;
                    row.degree_e = static_cast<int>(edges.size());
                    row.tau_base = *tau0;
                    row.tau_opt = tau1 ? *tau1 : *tau0;
                    row.valid = true;
                    break;
                }
                rows[static_cast<std::size_t>(i)] = row;
            }
        };
        std::vector<std::thread> pool;
        const int workers = std::max(1, o.workers);
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        char fname[64];
        std::snprintf(fname, sizeof(fname), "ws_p%.3f.csv", p);
        std::ofstream os(dir / fname);
        os << "seed,degree_e,tau_base,tau_opt,reduction\n";
        double sum = 0.0, worst = 1.0;
        int valid = 0;
        for (const WsRow& r : rows) {
            if (!r.valid) continue;
            const double reduction = 1.0 - r.tau_opt / r.tau_base;
            os << r.seed << ',' << r.degree_e << ',' << format_double(r.tau_base) << ','
               << format_double(r.tau_opt) << ',' << format_double(reduction) << '\n';
            sum += reduction;
            worst = std::min(worst, reduction);
            ++valid;
        }
        per_p.push_back(json{{"p", p},
                             {"realizations", valid},
                             {"mean_tau_reduction", valid ? sum / valid : 0.0},
                             {"min_tau_reduction", valid ? worst : 0.0},
                             {"rows_file", fname}});
        std::cout << "ws-ensemble p=" << p << ": mean reduction "
                  << (valid ? 100.0 * sum / valid : 0.0) << "% over " << valid
                  << " realizations\n";
    }
    write_json_file((dir / "summary.json").string(), json{{"per_p", std::move(per_p)}});
    write_manifest(dir, "ws-ensemble",
                   json{{"p", ps}, {"realizations", o.realizations}, {"seed", o.seed},
                        {"sites", o.sites}, {"degree", o.degree}, {"trap_rate", o.trap_rate},
                        {"restarts", o.restarts}, {"workers", o.workers}});
    std::cout << "ws-ensemble: wrote " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// ion
// ---------------------------------------------------------------------------

struct IonOpts {
    CommonOpts common;
    std::string row = "all";
};

int run_ion(const IonOpts& o) {
    const double horizon = o.common.horizon > 0 ? o.common.horizon : 3.0;
    const fs::path dir = prepare_out(o.common);
    auto times = linspace(0.0, horizon, o.common.grid_points);

    struct Row {
        std::string name;
        ion::IonModel model;
        int target;  // walk site whose curve matters (0-based)
    };
    std::vector<Row> rows;
    if (o.row == "cqw1" || o.row == "all") rows.push_back({"cqw1", ion::IonModel::cqw1(), 1});
    if (o.row == "cqw2" || o.row == "all") rows.push_back({"cqw2", ion::IonModel::cqw2(), 1});
    if (o.row == "qw" || o.row == "all") rows.push_back({"qw", ion::IonModel::qw(), 3});
    if (rows.empty()) throw std::invalid_argument("ion: unknown row '" + o.row + "'");

    json summary = json::array();
    for (const Row& r : rows) {
        HermitianOperator h = ion::build_ion_walk(r.model);
        Trajectory traj = evolve_unitary(h, 0, times);
        write_trajectory_file((dir / traj_name("ion_" + r.name, o.common.format)).string(), traj,
                              o.common.format);
        auto series = transfer_probability(traj, r.target);
        FirstMaximum fm = first_maximum(series, times);
        summary.push_back(json{{"row", r.name},
                               {"target_site", r.target + 1},
                               {"first_max", {{"t", fm.time}, {"value", fm.value}}},
                               {"subspace_commutator", ion::subspace_commutator_norm(r.model)}});
    }
    write_json_file((dir / "summary.json").string(), json{{"rows", std::move(summary)}});
    write_manifest(dir, "ion",
                   json{{"row", o.row}, {"horizon", horizon},
                        {"grid_points", o.common.grid_points}, {"format", o.common.format}});
    std::cout << "ion: wrote " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chiral quantum walk experiment runner"};
    app.require_subcommand(1);

    SwitchOpts sw;
    auto* sub_switch = app.add_subcommand("switch", "triangle-junction directional switch");
    add_common(sub_switch, sw.common, "out-switch");
    sub_switch->add_option("--theta", sw.theta, "control-edge phase")->capture_default_str();
    sub_switch->add_option("--trap-rate", sw.trap_rate, "pole sink rate")->capture_default_str();
    sub_switch->add_flag("--no-trap", sw.no_trap, "skip the trapped run");
    sub_switch->add_option("--input-arm", sw.input_arm, "input wire sites")->capture_default_str();
    sub_switch->add_option("--output-arm", sw.output_arm, "output wire sites")->capture_default_str();

    ChainOpts ch;
    auto* sub_chain = app.add_subcommand("chain", "corner-sharing triangle chain transport");
    add_common(sub_chain, ch.common, "out-chain");
    sub_chain->add_option("--triangles", ch.triangles, "number of triangles")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_chain->add_option("--theta", ch.thetas, "control phases (repeatable; default 0 and -pi/2)");
    sub_chain->add_option("--trap-rate", ch.trap_rate, "end-site sink rate (0 = unitary)")
        ->capture_default_str();
    sub_chain->add_option("--sweep-sizes", ch.sweep_sizes, "chain lengths for the scaling sweep");

    PolygonOpts poly;
    auto* sub_poly = app.add_subcommand("polygon", "ring walk: closed form vs propagator");
    add_common(sub_poly, poly.common, "out-polygon");
    sub_poly->add_option("--sites", poly.sites, "ring size")->check(CLI::Range(3, 1000))
        ->capture_default_str();
    sub_poly->add_option("--phi", poly.phi, "phase per edge")->capture_default_str();
    sub_poly->add_option("--start", poly.start, "start site")->capture_default_str();
    sub_poly->add_option("--end", poly.end, "end site (default: antipode)");

    FmoOpts fm;
    auto* sub_fmo = app.add_subcommand("fmo", "seven-site light-harvesting transport");
    add_common(sub_fmo, fm.common, "out-fmo");
    sub_fmo->add_option("--phase-set", fm.phase_set, "edge phase table: a1, a2 or none")
        ->check(CLI::IsMember({"a1", "a2", "none"}))
        ->capture_default_str();
    sub_fmo->add_flag("--optimize", fm.optimize_phases, "optimize the seven-edge set instead");
    sub_fmo->add_option("--restarts", fm.restarts, "optimizer restarts")->capture_default_str();
    sub_fmo->add_option("--seed", fm.seed, "optimizer seed")->capture_default_str();
    sub_fmo->add_option("--fmo-data", fm.data_path, "Hamiltonian data file")->capture_default_str();
    sub_fmo->add_option("--dephasing", fm.dephasing, "dephasing rate, 1/ps")->capture_default_str();
    sub_fmo->add_option("--recombination", fm.recombination, "recombination rate, 1/ps")
        ->capture_default_str();
    sub_fmo->add_option("--trap-rate", fm.trap_rate, "reaction-centre trapping rate, 1/ps")
        ->capture_default_str();

    WsOpts ws;
    auto* sub_ws = app.add_subcommand("ws-ensemble", "small-world ensemble with phase optimization");
    add_common(sub_ws, ws.common, "out-ws");
    sub_ws->add_option("--p", ws.ps, "rewiring probabilities (repeatable; default 0.2)");
    sub_ws->add_option("--realizations", ws.realizations, "graphs per p")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub_ws->add_option("--seed", ws.seed, "base seed")->capture_default_str();
    sub_ws->add_option("--sites", ws.sites, "nodes")->capture_default_str();
    sub_ws->add_option("--degree", ws.degree, "ring degree k")->capture_default_str();
    sub_ws->add_option("--trap-rate", ws.trap_rate, "sink absorption rate")->capture_default_str();
    sub_ws->add_option("--restarts", ws.restarts, "optimizer restarts")->capture_default_str();
    sub_ws->add_option("--workers", ws.workers, "parallel workers")->capture_default_str();

    IonOpts ion_opts;
    auto* sub_ion = app.add_subcommand("ion", "three-ion four-site walk encoding");
    add_common(sub_ion, ion_opts.common, "out-ion");
    sub_ion->add_option("--row", ion_opts.row, "parameter row: cqw1, cqw2, qw or all")
        ->check(CLI::IsMember({"cqw1", "cqw2", "qw", "all"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sub_switch->parsed()) return run_switch(sw);
        if (sub_chain->parsed()) return run_chain(ch);
        if (sub_poly->parsed()) return run_polygon(poly);
        if (sub_fmo->parsed()) return run_fmo(fm);
        if (sub_ws->parsed()) return run_ws(ws);
        if (sub_ion->parsed()) return run_ion(ion_opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
