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

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cqw/dynamics.hpp"
#include "cqw/netgraph.hpp"
#include "cqw/phaseopt.hpp"
#include "cqw/systems.hpp"

namespace cqw {

using json = nlohmann::json;

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Graph JSON
// ---------------------------------------------------------------------------

inline json graph_to_json(const PhasedGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges())
        edges.push_back({{"n", e.n}, {"m", e.m}, {"J", e.coupling}, {"theta", e.phase}});
    return json{{"n_sites", g.site_count()}, {"edges", std::move(edges)}};
}

inline PhasedGraph graph_from_json(const json& j) {
    if (!j.contains("n_sites") || !j.contains("edges"))
        throw std::invalid_argument("graph_from_json: missing n_sites or edges");
    PhasedGraph g(j.at("n_sites").get<int>());
    for (const auto& e : j.at("edges"))
        g.add_edge(e.at("n").get<int>(), e.at("m").get<int>(), e.at("J").get<double>(),
                   e.at("theta").get<double>());
    return g;
}

// ---------------------------------------------------------------------------
// Trajectory output
// ---------------------------------------------------------------------------

/// CSV with header t,site_0,...,site_{d-1},trace, full 64-bit precision.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int s = 0; s < traj.dim(); ++s) os << ",site_" << s;
    os << ",trace\n";
    for (std::size_t i = 0; i < traj.points(); ++i) {
        os << format_double(traj.times[i]);
        for (int s = 0; s < traj.dim(); ++s)
            os << ',' << format_double(traj.occupancies(static_cast<Eigen::Index>(i), s));
        os << ',' << format_double(traj.trace[i]) << '\n';
    }
}

inline json trajectory_to_json(const Trajectory& traj) {
    json sites = json::array();
    for (int s = 0; s < traj.dim(); ++s) {
        json col = json::array();
        for (std::size_t i = 0; i < traj.points(); ++i)
            col.push_back(traj.occupancies(static_cast<Eigen::Index>(i), s));
        sites.push_back(std::move(col));
    }
    return json{{"times", traj.times}, {"site_occupancies", std::move(sites)}, {"trace", traj.trace}};
}

/// Write a trajectory as "csv" or "json" to `path`.
inline void write_trajectory_file(const std::string& path, const Trajectory& traj,
                                  const std::string& format) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    if (format == "csv")
        write_trajectory_csv(os, traj);
    else if (format == "json")
        os << trajectory_to_json(traj).dump(2) << '\n';
    else
        throw std::invalid_argument("unknown trajectory format: " + format);
}

// ---------------------------------------------------------------------------
// FMO Hamiltonian data file
// ---------------------------------------------------------------------------

/// Schema: {"units": "cm-1", "energies": [7], "couplings": [[7x7]]}.
/// Site energies live on the couplings diagonal after loading.
inline FmoHamiltonianData fmo_data_from_json(const json& j) {
    if (!j.contains("units") || j.at("units").get<std::string>() != "cm-1")
        throw std::invalid_argument("fmo data: units field must be \"cm-1\"");
    if (!j.contains("energies") || !j.contains("couplings"))
        throw std::invalid_argument("fmo data: missing energies or couplings");
    const auto& energies = j.at("energies");
    const auto& couplings = j.at("couplings");
    if (energies.size() != 7 || couplings.size() != 7)
        throw std::invalid_argument("fmo data: expected 7 sites");
    FmoHamiltonianData data;
    data.matrix_cm = Eigen::MatrixXd::Zero(7, 7);
    for (int i = 0; i < 7; ++i) {
        if (couplings.at(static_cast<std::size_t>(i)).size() != 7)
            throw std::invalid_argument("fmo data: couplings must be 7x7");
        for (int k = 0; k < 7; ++k)
            data.matrix_cm(i, k) =
                couplings.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
        data.matrix_cm(i, i) = energies.at(static_cast<std::size_t>(i)).get<double>();
    }
    data.validate();
    return data;
}

inline FmoHamiltonianData load_fmo_data(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open FMO data file: " + path);
    json j;
    is >> j;
    return fmo_data_from_json(j);
}

// ---------------------------------------------------------------------------
// Experiment descriptors
// ---------------------------------------------------------------------------

inline json experiment_to_json(const ExperimentSystem& sys) {
    json absorbers = json::array();
    for (const Absorber& a : sys.absorbers)
        absorbers.push_back({{"label", a.label}, {"rate", a.rate}, {"sources", a.sources}});
    return json{{"graph", graph_to_json(sys.graph)},
                {"onsite_energies", sys.onsite_energies},
                {"dephasing_rate", sys.dephasing_rate},
                {"absorbers", std::move(absorbers)},
                {"start_site", sys.start_site},
                {"target_site", sys.target_site},
                {"transport_absorber", sys.transport_absorber},
                {"default_horizon", sys.default_horizon},
                {"time_unit", sys.time_unit}};
}

inline ExperimentSystem experiment_from_json(const json& j) {
    ExperimentSystem sys;
    sys.graph = graph_from_json(j.at("graph"));
    sys.onsite_energies = j.at("onsite_energies").get<std::vector<double>>();
    sys.dephasing_rate = j.at("dephasing_rate").get<double>();
    for (const auto& a : j.at("absorbers"))
        sys.absorbers.push_back({a.at("label").get<std::string>(), a.at("rate").get<double>(),
                                 a.at("sources").get<std::vector<int>>()});
    sys.start_site = j.at("start_site").get<int>();
    sys.target_site = j.at("target_site").get<int>();
    sys.transport_absorber = j.at("transport_absorber").get<std::string>();
    sys.default_horizon = j.at("default_horizon").get<double>();
    sys.time_unit = j.at("time_unit").get<std::string>();
    sys.validate();
    return sys;
}

// ---------------------------------------------------------------------------
// Optimization report
// ---------------------------------------------------------------------------

inline json optimize_report_to_json(const OptimizeResult& result) {
    json edges = json::array();
    for (const auto& [n, m] : result.assignment.edges) edges.push_back({{"n", n}, {"m", m}});
    json restart_values = json::array();
    for (double v : result.restart_values)
        restart_values.push_back(std::isfinite(v) ? json(v) : json());
    return json{{"edges", std::move(edges)},
                {"phases", result.assignment.values},
                {"objective", result.value},
                {"baseline", result.baseline},
                {"restarts", result.restarts},
                {"seed", result.seed},
                {"restart_values", std::move(restart_values)}};
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << j.dump(2) << '\n';
}

}  // namespace cqw
