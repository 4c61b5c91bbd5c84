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

#include <string>
#include <tuple>
#include <vector>

#include "cqw/dynamics.hpp"
#include "cqw/netgraph.hpp"

namespace cqw {

/// One-way absorber: an extra site fed by jump operators |sink><s| at a
/// common rate from every source site.
struct Absorber {
    std::string label;
    double rate = 1.0;
    std::vector<int> sources;
};

/// A complete experimental setup: the coherent graph plus open-system
/// augmentation. Absorbers become explicit extra sites in the Lindblad model
/// (appended after the system sites, in declaration order) so the total trace
/// is conserved and sink occupancy is directly readable.
struct ExperimentSystem {
    PhasedGraph graph{1};
    std::vector<double> onsite_energies;  // empty means all zero
    double dephasing_rate = 0.0;          // |n><n| channel on every system site
    std::vector<Absorber> absorbers;
    int start_site = 0;
    int target_site = 0;              // system site of interest
    std::string transport_absorber;   // when set, transport is read at this sink
    double default_horizon = 20.0;
    std::string time_unit = "1/J";

    int system_dim() const { return graph.site_count(); }
    int model_dim() const { return system_dim() + static_cast<int>(absorbers.size()); }

    int absorber_site(const std::string& label) const {
        for (std::size_t i = 0; i < absorbers.size(); ++i)
            if (absorbers[i].label == label) return system_dim() + static_cast<int>(i);
        throw std::invalid_argument("ExperimentSystem: unknown absorber '" + label + "'");
    }

    /// Model-space site whose occupancy defines the transport metric.
    int tracked_site() const {
        return transport_absorber.empty() ? target_site : absorber_site(transport_absorber);
    }

    void validate() const {
        if (start_site < 0 || start_site >= system_dim())
            throw std::invalid_argument("ExperimentSystem: start site out of range");
        if (target_site < 0 || target_site >= system_dim())
            throw std::invalid_argument("ExperimentSystem: target site out of range");
        if (dephasing_rate < 0.0)
            throw std::invalid_argument("ExperimentSystem: dephasing rate must be >= 0");
        if (!onsite_energies.empty() &&
            static_cast<int>(onsite_energies.size()) != system_dim())
            throw dimension_error("ExperimentSystem: onsite energy count mismatch");
        for (const auto& a : absorbers) {
            if (a.rate < 0.0) throw std::invalid_argument("ExperimentSystem: absorber rate must be >= 0");
            for (int s : a.sources)
                if (s < 0 || s >= system_dim())
                    throw std::invalid_argument("ExperimentSystem: absorber source out of range");
        }
        if (!transport_absorber.empty()) absorber_site(transport_absorber);
    }
};

inline HermitianOperator system_hamiltonian(const ExperimentSystem& sys) {
    HermitianOperator h = hamiltonian_from_graph(sys.graph);
    if (!sys.onsite_energies.empty()) h = add_onsite_energies(h, sys.onsite_energies);
    return h;
}

/// Full open-system model over system sites + absorber sites.
inline LindbladModel assemble_lindblad(const ExperimentSystem& sys) {
    sys.validate();
    const int n = sys.system_dim();
    const int d = sys.model_dim();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    h.topLeftCorner(n, n) = system_hamiltonian(sys).matrix();
    std::vector<LindbladJump> jumps;
    if (sys.dephasing_rate > 0.0) {
        for (int s = 0; s < n; ++s) {
            ComplexMatrix op = ComplexMatrix::Zero(d, d);
            op(s, s) = 1.0;
            jumps.push_back({std::move(op), sys.dephasing_rate});
        }
    }
    for (std::size_t i = 0; i < sys.absorbers.size(); ++i) {
        const int sink = n + static_cast<int>(i);
        for (int s : sys.absorbers[i].sources) {
            ComplexMatrix op = ComplexMatrix::Zero(d, d);
            op(sink, s) = 1.0;
            jumps.push_back({std::move(op), sys.absorbers[i].rate});
        }
    }
    return LindbladModel(HermitianOperator(std::move(h)), std::move(jumps));
}

/// Open evolution from |start><start| over the model space.
inline Trajectory run_open(const ExperimentSystem& sys, const std::vector<double>& times) {
    LindbladModel model = assemble_lindblad(sys);
    return evolve_lindblad(model, DensityMatrix::site_basis(model.dim(), sys.start_site), times);
}

/// Closed (trap-free, bath-free) evolution over the system sites only.
inline Trajectory run_unitary(const ExperimentSystem& sys, const std::vector<double>& times) {
    sys.validate();
    return evolve_unitary(system_hamiltonian(sys), sys.start_site, times);
}

/// The only non-unitary channels are absorbers: the fast non-Hermitian pure
/// state propagator applies.
inline bool pure_trapping(const ExperimentSystem& sys) {
    return sys.dephasing_rate == 0.0 && !sys.absorbers.empty();
}

inline TrappedPropagator trapped_propagator(const ExperimentSystem& sys) {
    sys.validate();
    std::vector<std::pair<int, double>> damps;
    for (const auto& a : sys.absorbers)
        for (int s : a.sources) damps.emplace_back(s, a.rate);
    return TrappedPropagator(system_hamiltonian(sys), damps);
}

/// Probability accumulated in one absorber by time t (pure-trapping path).
/// Sources shared between absorbers split in proportion to their rates.
inline double absorbed_in(const ExperimentSystem& sys, const TrappedPropagator& prop,
                          const Absorber& absorber, double t) {
    double total = 0.0;
    for (int s : absorber.sources) {
        double rate_at_site = 0.0;
        for (const auto& a : sys.absorbers)
            for (int src : a.sources)
                if (src == s) rate_at_site += a.rate;
        total += (absorber.rate / rate_at_site) * prop.absorbed_at(sys.start_site, s, t);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Quantum switch
// ---------------------------------------------------------------------------

struct SwitchParams {
    double theta = pi / 2.0;
    int input_arm = 1;    // sites on the input wire (start site included)
    int output_arm = 2;   // sites on each output wire beyond the junction
    double trap_rate = 0.0;  // > 0 attaches competing sinks at both poles
};

struct SwitchExperiment {
    ExperimentSystem system;
    int junction = 0;      // triangle vertex fed by the input wire
    int pole_e = 0;        // output enhanced at theta = +pi/2
    int pole_f = 0;        // mirror output
    int control_edge = 0;  // edge index carrying theta
};

/// Fig-style triangle junction: an input wire into vertex A, the control
/// edge with phase theta between the two branch vertices, and two output
/// wires ending at the poles E and F. theta = 0 is mirror symmetric;
/// positive theta = pi/2 routes towards E.
inline SwitchExperiment build_switch(const SwitchParams& p = {}) {
    if (p.input_arm < 1 || p.output_arm < 0)
        throw std::invalid_argument("build_switch: arms must have input >= 1, output >= 0 sites");
    const int wi = p.input_arm, wo = p.output_arm;
    const int n = wi + 3 + 2 * wo;
    PhasedGraph g(n);
    for (int i = 0; i + 1 < wi; ++i) g.add_edge(i, i + 1, 1.0, 0.0);
    const int a = wi, b = wi + 1, c = wi + 2;
    if (wi > 0) g.add_edge(wi - 1, a, 1.0, 0.0);
    g.add_edge(a, b, 1.0, 0.0);
    g.add_edge(a, c, 1.0, 0.0);
    const int control = g.edge_count();
    g.add_edge(b, c, 1.0, p.theta);
    int pole_e = b, pole_f = c;
    int prev = b;
    for (int i = 0; i < wo; ++i) {
        const int s = wi + 3 + i;
        g.add_edge(prev, s, 1.0, 0.0);
        prev = s;
    }
    pole_e = prev;
    prev = c;
    for (int i = 0; i < wo; ++i) {
        const int s = wi + 3 + wo + i;
        g.add_edge(prev, s, 1.0, 0.0);
        prev = s;
    }
    pole_f = prev;

    SwitchExperiment sw;
    sw.junction = a;
    sw.pole_e = pole_e;
    sw.pole_f = pole_f;
    sw.control_edge = control;
    sw.system.graph = std::move(g);
    sw.system.start_site = 0;
    sw.system.target_site = pole_e;
    sw.system.default_horizon = 20.0;
    if (p.trap_rate > 0.0) {
        sw.system.absorbers.push_back({"sink_e", p.trap_rate, {pole_e}});
        sw.system.absorbers.push_back({"sink_f", p.trap_rate, {pole_f}});
        sw.system.transport_absorber = "sink_e";
    }
    return sw;
}

// ---------------------------------------------------------------------------
// Triangle chain
// ---------------------------------------------------------------------------

struct ChainParams {
    int n_triangles = 8;
    double theta = 0.0;
    bool with_trap = true;
    double trap_rate = 1.0;
};

struct ChainExperiment {
    ExperimentSystem system;
    std::vector<int> control_edges;
};

/// Corner-sharing triangle chain entered through a single lead site. The
/// lead is required for finite achiral arrival: on the bare chain the state
/// (|corner> - |apex>)/sqrt(2) of the first triangle is an exact eigenstate
/// holding half the initial weight, which never reaches the far end. Control
/// edges are the rising edges, so theta = -pi/2 is the enhancing sign for
/// start -> end transport.
inline ChainExperiment build_triangle_chain(const ChainParams& p = {}) {
    if (p.n_triangles < 1)
        throw std::invalid_argument("build_triangle_chain: need at least one triangle");
    const int core = 2 * p.n_triangles + 1;
    PhasedGraph g(core + 1);
    std::vector<int> control;
    g.add_edge(0, 1, 1.0, 0.0);  // lead
    for (int t = 0; t < p.n_triangles; ++t) {
        const int x = 1 + 2 * t, y = 2 + 2 * t, z = 3 + 2 * t;
        control.push_back(g.edge_count());
        g.add_edge(x, y, 1.0, p.theta);
        g.add_edge(y, z, 1.0, 0.0);
        g.add_edge(x, z, 1.0, 0.0);
    }
    ChainExperiment chain;
    chain.control_edges = std::move(control);
    chain.system.graph = std::move(g);
    chain.system.start_site = 0;
    chain.system.target_site = core;  // far corner
    chain.system.default_horizon = 60.0;
    if (p.with_trap) {
        chain.system.absorbers.push_back({"sink", p.trap_rate, {core}});
        chain.system.transport_absorber = "sink";
    }
    return chain;
}

// ---------------------------------------------------------------------------
// FMO complex
// ---------------------------------------------------------------------------

/// rad/ps per wavenumber: 2 pi c * 100 with c in cm/ps.
inline constexpr double cm_inverse_to_rad_per_ps = 2.0 * pi * 0.0299792458;

/// Seven-site exciton Hamiltonian in wavenumbers (site energies on the
/// diagonal, couplings off it), as tabulated in the literature.
struct FmoHamiltonianData {
    Eigen::MatrixXd matrix_cm;  // 7x7, symmetric

    void validate() const {
        if (matrix_cm.rows() != 7 || matrix_cm.cols() != 7)
            throw std::invalid_argument("FmoHamiltonianData: matrix must be 7x7");
        if ((matrix_cm - matrix_cm.transpose()).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("FmoHamiltonianData: matrix must be symmetric");
    }
};

struct FmoParams {
    double dephasing_rate = 9.0;       // 1/ps
    double recombination_rate = 0.001; // 1/ps
    double trap_rate = 1.0;            // 1/ps, site 3 -> reaction centre
};

struct FmoExperiment {
    ExperimentSystem system;
};

/// Single-excitation FMO model: dephasing on all seven sites, recombination
/// from every site into a common drain, trapping from site 3 (index 2) into
/// the reaction-centre sink. Walker starts on site 1 (index 0). Time unit ps.
inline FmoExperiment build_fmo(const FmoHamiltonianData& data, const FmoParams& p = {}) {
    data.validate();
    if (p.dephasing_rate < 0 || p.recombination_rate < 0 || p.trap_rate < 0)
        throw std::invalid_argument("build_fmo: rates must be >= 0");
    PhasedGraph g(7);
    std::vector<double> onsite(7);
    for (int i = 0; i < 7; ++i) onsite[static_cast<std::size_t>(i)] =
        data.matrix_cm(i, i) * cm_inverse_to_rad_per_ps;
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) {
            const double v = data.matrix_cm(i, j) * cm_inverse_to_rad_per_ps;
            if (v == 0.0) continue;
            g.add_edge(i, j, std::abs(v), v < 0.0 ? pi : 0.0);
        }
    FmoExperiment fmo;
    fmo.system.graph = std::move(g);
    fmo.system.onsite_energies = std::move(onsite);
    fmo.system.dephasing_rate = p.dephasing_rate;
    if (p.recombination_rate > 0.0)
        fmo.system.absorbers.push_back({"drain", p.recombination_rate, {0, 1, 2, 3, 4, 5, 6}});
    if (p.trap_rate > 0.0) {
        fmo.system.absorbers.push_back({"sink", p.trap_rate, {2}});
        fmo.system.transport_absorber = "sink";
    }
    fmo.system.start_site = 0;
    fmo.system.target_site = 2;
    fmo.system.default_horizon = 10.0;
    fmo.system.time_unit = "ps";
    return fmo;
}

/// (site, site, phase) triples, 1-based site labels, phases in radians.
using FmoPhaseTable = std::vector<std::tuple<int, int, double>>;

/// Optimized seven-edge phase set.
inline FmoPhaseTable fmo_phase_set_a1() {
    return {{3, 4, 1.31484899 * pi}, {4, 5, 1.66997830 * pi}, {6, 7, 1.8406103 * pi},
            {2, 7, 1.2949616 * pi},  {1, 6, 1.67543320 * pi}, {1, 3, 0.04222214 * pi},
            {3, 6, 0.8761298 * pi}};
}

/// Optimized three-edge phase set.
inline FmoPhaseTable fmo_phase_set_a2() {
    return {{3, 4, 1.58371001 * pi}, {4, 5, 1.39551582 * pi}, {6, 7, 0.1338368 * pi}};
}

/// Dress the listed couplings with extra phases: J_nm -> J_nm e^{i theta}
/// on the upper-triangle orientation, magnitudes untouched. Phases add to
/// whatever sign phase the coupling already carries.
inline void apply_fmo_phase_table(FmoExperiment& fmo, const FmoPhaseTable& table) {
    for (const auto& [n1, m1, theta] : table) {
        const int n = n1 - 1, m = m1 - 1;
        auto idx = fmo.system.graph.edge_index(n, m);
        if (!idx) throw std::invalid_argument("apply_fmo_phase_table: no such coupling");
        fmo.system.graph.shift_edge_phase(*idx, theta);
    }
}

// ---------------------------------------------------------------------------
// Watts-Strogatz transport experiment
// ---------------------------------------------------------------------------

struct WsParams {
    int n_sites = 32;
    int degree = 4;
    double rewire_probability = 0.2;
    std::uint64_t seed = 0;
    double sink_rate = 1.0;
};

struct WsExperiment {
    ExperimentSystem system;
};

/// Small-world transport: walker starts at site 0, sink attached to the
/// antipodal site N/2 of the original ring labeling.
inline WsExperiment build_ws_experiment(const WsParams& p = {}) {
    WsExperiment ws;
    ws.system.graph = generate_watts_strogatz(p.n_sites, p.degree, p.rewire_probability, p.seed);
    ws.system.start_site = 0;
    ws.system.target_site = p.n_sites / 2;
    ws.system.absorbers.push_back({"sink", p.sink_rate, {p.n_sites / 2}});
    ws.system.transport_absorber = "sink";
    ws.system.default_horizon = 50.0;
    return ws;
}

}  // namespace cqw
