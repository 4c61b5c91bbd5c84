#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cqw/analytic.hpp"
#include "cqw/phaseopt.hpp"
#include "cqw/systems.hpp"

using namespace cqw;
using Catch::Approx;

namespace {

ExperimentSystem triangle_system(double theta) {
    ExperimentSystem sys;
    PhasedGraph g(3);
    g.add_edge(0, 1, 1.0, theta);
    g.add_edge(1, 2, 1.0, 0.0);
    g.add_edge(0, 2, 1.0, 0.0);
    sys.graph = std::move(g);
    sys.start_site = 0;
    sys.target_site = 1;
    sys.default_horizon = 10.0;
    return sys;
}

}  // namespace

TEST_CASE("empty assignment evaluates the baseline system") {
    ExperimentSystem sys = triangle_system(0.4);
    Objective obj = Objective::first_max_value(1);
    const double with_empty = evaluate(sys, PhaseAssignment{}, obj);
    const double direct = triangle_analytic_peak(1.0, 1.0, 1.0, 0.4).second;
    REQUIRE(with_empty == Approx(direct).margin(1e-4));
}

TEST_CASE("assignments with equal loop sums give equal objectives") {
    ExperimentSystem sys = triangle_system(0.0);
    Objective obj = Objective::first_max_value(1);
    const double sum = 1.1;
    PhaseAssignment concentrated{{{0, 1}, {1, 2}, {0, 2}}, {sum, 0.0, 0.0}};
    // Same loop sum spread differently (the last value sits on the reversed
    // leg of the oriented loop, hence the sign).
    PhaseAssignment spread{{{0, 1}, {1, 2}, {0, 2}}, {0.3, 0.5, -(sum - 0.8)}};
    REQUIRE(evaluate(sys, concentrated, obj) ==
            Approx(evaluate(sys, spread, obj)).margin(1e-9));
}

TEST_CASE("assignment validation") {
    ExperimentSystem sys = triangle_system(0.0);
    PhaseAssignment missing{{{0, 1}, {1, 2}}, {0.1}};
    REQUIRE_THROWS_AS(evaluate(sys, missing, Objective::first_max_value(1)), dimension_error);
    PhaseAssignment absent{{{0, 1}, {2, 0}}, {0.1, 0.2}};
    REQUIRE_NOTHROW(evaluate(sys, absent, Objective::first_max_value(1)));
    PhaseAssignment bogus{{{0, 3}}, {0.1}};
    REQUIRE_THROWS_AS(evaluate(sys, bogus, Objective::first_max_value(1)),
                      std::invalid_argument);
}

TEST_CASE("switch control-edge enhancement factors") {
    SwitchExperiment sw = build_switch({0.0, 1, 2, 0.0});
    Objective obj = Objective::first_max_value(sw.pole_e);
    const double baseline = evaluate(sw.system, PhaseAssignment{}, obj);
    const auto edge = std::pair<int, int>{sw.junction + 1, sw.junction + 2};
    PhaseAssignment plus{{edge}, {pi / 2}};
    PhaseAssignment minus{{edge}, {-pi / 2}};
    const double enhanced = evaluate(sw.system, plus, obj) / baseline;
    const double suppressed = evaluate(sw.system, minus, obj) / baseline;
    REQUIRE(enhanced - 1.0 == Approx(1.34).epsilon(0.03));
    REQUIRE(1.0 - suppressed == Approx(0.91).epsilon(0.03));
}

TEST_CASE("zero-edge optimization returns the baseline") {
    ExperimentSystem sys = triangle_system(0.7);
    Objective obj = Objective::first_max_value(1);
    OptimizeResult res = optimize(sys, {}, obj, 3, 99);
    REQUIRE(res.value == Approx(res.baseline));
    REQUIRE(res.assignment.edges.empty());
}

TEST_CASE("switch control edge optimizes to |theta| = pi/2") {
    SwitchExperiment sw = build_switch({0.0, 1, 2, 0.0});
    Objective obj = Objective::first_max_value(sw.pole_e);
    obj.grid_points = 800;
    OptimizeResult res = optimize(
        sw.system, {{sw.junction + 1, sw.junction + 2}}, obj, 6, 2024);
    REQUIRE(std::abs(std::abs(res.assignment.values[0]) - pi / 2) < 0.02);
    REQUIRE(res.value > res.baseline);
}

TEST_CASE("optimization is deterministic and never loses to its baseline") {
    ChainExperiment chain = build_triangle_chain({2, 0.0, true, 1.0});
    Objective obj = Objective::occupancy(chain.system.tracked_site(), 8.0);
    std::vector<std::pair<int, int>> edges;
    for (int ei : chain.control_edges) {
        const Edge& e = chain.system.graph.edges()[static_cast<std::size_t>(ei)];
        edges.emplace_back(e.n, e.m);
    }
    OptimizeResult a = optimize(chain.system, edges, obj, 5, 31415);
    OptimizeResult b = optimize(chain.system, edges, obj, 5, 31415);
    REQUIRE(a.value == b.value);
    for (std::size_t i = 0; i < a.assignment.values.size(); ++i)
        REQUIRE(a.assignment.values[i] == b.assignment.values[i]);
    REQUIRE(a.value >= a.baseline);
    REQUIRE(a.restart_values.size() == 5);
    for (double v : a.restart_values) REQUIRE(v <= a.value + 1e-12);
    REQUIRE_THROWS_AS(optimize(chain.system, edges, obj, 0, 1), std::invalid_argument);
}

TEST_CASE("half-arrival objectives minimize") {
    ChainExperiment chain = build_triangle_chain({2, 0.0, true, 1.0});
    Objective obj = Objective::half_arrival(chain.system.tracked_site());
    std::vector<std::pair<int, int>> edges;
    for (int ei : chain.control_edges) {
        const Edge& e = chain.system.graph.edges()[static_cast<std::size_t>(ei)];
        edges.emplace_back(e.n, e.m);
    }
    OptimizeResult res = optimize(chain.system, edges, obj, 4, 7);
    REQUIRE(res.value <= res.baseline);
    REQUIRE(std::isfinite(res.value));
}

TEST_CASE("landscape scans") {
    SECTION("theta = 0 equals the achiral baseline") {
        ChainExperiment chain = build_triangle_chain({3, 0.0, true, 1.0});
        Objective obj = Objective::occupancy(chain.system.tracked_site(), 9.0);
        const Edge& e = chain.system.graph.edges()[static_cast<std::size_t>(chain.control_edges[0])];
        auto scan = landscape_scan(chain.system, {e.n, e.m}, {0.0, 0.5}, obj);
        REQUIRE(scan[0] == Approx(evaluate(chain.system, PhaseAssignment{}, obj)).margin(1e-12));
        REQUIRE(scan[1] != Approx(scan[0]).margin(1e-6));
    }
    SECTION("chain sweep is symmetric about -pi/2") {
        // Sweep all control edges together.
        ChainExperiment chain = build_triangle_chain({3, 0.0, true, 1.0});
        Objective obj = Objective::occupancy(chain.system.tracked_site(), 9.0);
        std::vector<std::pair<int, int>> edges;
        for (int ei : chain.control_edges) {
            const Edge& e = chain.system.graph.edges()[static_cast<std::size_t>(ei)];
            edges.emplace_back(e.n, e.m);
        }
        for (double x : {0.3, 0.6, 1.1}) {
            PhaseAssignment lo{edges, std::vector<double>(edges.size(), -pi / 2 - x)};
            PhaseAssignment hi{edges, std::vector<double>(edges.size(), -pi / 2 + x)};
            REQUIRE(evaluate(chain.system, lo, obj) ==
                    Approx(evaluate(chain.system, hi, obj)).margin(1e-9));
        }
    }
    SECTION("even cycle antipodal occupancy vanishes at theta = pi") {
        ExperimentSystem sys;
        sys.graph = generate_cycle(4, 1.0, 0.0);
        sys.start_site = 0;
        sys.target_site = 2;
        sys.default_horizon = 15.0;
        Objective obj = Objective::first_max_value(2);
        auto scan = landscape_scan(sys, {0, 1}, {pi}, obj);
        REQUIRE(scan[0] < 1e-10);
    }
}
