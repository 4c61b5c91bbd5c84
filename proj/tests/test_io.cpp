#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "cqw/io.hpp"
#include "helpers.hpp"

using namespace cqw;
using Catch::Approx;

TEST_CASE("graph json round trip is exact") {
    Rng rng(71);
    for (int rep = 0; rep < 10; ++rep) {
        PhasedGraph g = test::random_connected_graph(6 + static_cast<int>(rng.integer(5)), 4, rng);
        PhasedGraph back = graph_from_json(json::parse(graph_to_json(g).dump()));
        REQUIRE(back.site_count() == g.site_count());
        REQUIRE(back.edge_count() == g.edge_count());
        for (int i = 0; i < g.edge_count(); ++i) {
            REQUIRE(back.edges()[i].n == g.edges()[i].n);
            REQUIRE(back.edges()[i].m == g.edges()[i].m);
            // bit-exact doubles through the serialization
            REQUIRE(back.edges()[i].coupling == g.edges()[i].coupling);
            REQUIRE(back.edges()[i].phase == g.edges()[i].phase);
        }
    }
    REQUIRE_THROWS_AS(graph_from_json(json{{"edges", json::array()}}), std::invalid_argument);
}

TEST_CASE("trajectory csv layout") {
    Trajectory traj;
    traj.times = {0.0, 0.5};
    traj.occupancies.resize(2, 2);
    traj.occupancies << 1.0, 0.0, 0.25, 0.75;
    traj.trace = {1.0, 1.0};
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    REQUIRE(line == "t,site_0,site_1,trace");
    std::getline(is, line);
    REQUIRE(line == "0,1,0,1");
    std::getline(is, line);
    REQUIRE(line == "0.5,0.25,0.75,1");
}

TEST_CASE("trajectory json layout") {
    Trajectory traj;
    traj.times = {0.0, 1.0};
    traj.occupancies.resize(2, 1);
    traj.occupancies << 1.0, 0.875;
    traj.trace = {1.0, 0.875};
    json j = trajectory_to_json(traj);
    REQUIRE(j.at("times").size() == 2);
    REQUIRE(j.at("site_occupancies").size() == 1);
    REQUIRE(j.at("site_occupancies")[0][1].get<double>() == 0.875);
    REQUIRE(j.at("trace")[1].get<double>() == 0.875);
}

TEST_CASE("full precision formatting round trips") {
    const double v = 0.1234567890123456789;
    REQUIRE(std::stod(format_double(v)) == v);
    REQUIRE(format_double(1.0) == "1");
}

TEST_CASE("fmo data loading") {
    FmoHamiltonianData data = load_fmo_data(CQW_DEFAULT_FMO_DATA);
    REQUIRE(data.matrix_cm(0, 0) == Approx(280.0));
    REQUIRE(data.matrix_cm(0, 1) == Approx(-106.0));
    REQUIRE(data.matrix_cm(2, 2) == Approx(0.0));

    SECTION("schema violations are rejected") {
        json good = json{{"units", "cm-1"},
                         {"energies", std::vector<double>(7, 0.0)},
                         {"couplings", std::vector<std::vector<double>>(7, std::vector<double>(7, 0.0))}};
        REQUIRE_NOTHROW(fmo_data_from_json(good));

        json bad_units = good;
        bad_units["units"] = "eV";
        REQUIRE_THROWS_AS(fmo_data_from_json(bad_units), std::invalid_argument);

        json bad_size = good;
        bad_size["energies"] = std::vector<double>(6, 0.0);
        REQUIRE_THROWS_AS(fmo_data_from_json(bad_size), std::invalid_argument);

        json asym = good;
        asym["couplings"][0][1] = 5.0;
        REQUIRE_THROWS_AS(fmo_data_from_json(asym), std::invalid_argument);

        REQUIRE_THROWS_AS(load_fmo_data("/nonexistent/file.json"), std::invalid_argument);
    }
}

TEST_CASE("experiment descriptor round trip") {
    FmoExperiment fmo = build_fmo(load_fmo_data(CQW_DEFAULT_FMO_DATA));
    ExperimentSystem back =
        experiment_from_json(json::parse(experiment_to_json(fmo.system).dump()));
    REQUIRE(back.system_dim() == fmo.system.system_dim());
    REQUIRE(back.dephasing_rate == fmo.system.dephasing_rate);
    REQUIRE(back.absorbers.size() == fmo.system.absorbers.size());
    REQUIRE(back.transport_absorber == "sink");
    REQUIRE(back.tracked_site() == fmo.system.tracked_site());
    for (std::size_t i = 0; i < back.onsite_energies.size(); ++i)
        REQUIRE(back.onsite_energies[i] == fmo.system.onsite_energies[i]);
    for (int i = 0; i < back.graph.edge_count(); ++i) {
        REQUIRE(back.graph.edges()[i].coupling == fmo.system.graph.edges()[i].coupling);
        REQUIRE(back.graph.edges()[i].phase == fmo.system.graph.edges()[i].phase);
    }
}

TEST_CASE("optimization report") {
    OptimizeResult res;
    res.assignment.edges = {{0, 1}, {2, 3}};
    res.assignment.values = {0.5, -1.2};
    res.value = 0.9;
    res.baseline = 0.4;
    res.restarts = 4;
    res.seed = 42;
    res.restart_values = {0.9, 0.7, std::numeric_limits<double>::infinity(), 0.8};
    json j = optimize_report_to_json(res);
    REQUIRE(j.at("edges").size() == 2);
    REQUIRE(j.at("phases")[1].get<double>() == -1.2);
    REQUIRE(j.at("objective").get<double>() == 0.9);
    REQUIRE(j.at("baseline").get<double>() == 0.4);
    REQUIRE(j.at("seed").get<std::uint64_t>() == 42);
    REQUIRE(j.at("restart_values")[2].is_null());  // unreachable metric
}
