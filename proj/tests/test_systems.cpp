#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cqw/io.hpp"
#include "cqw/systems.hpp"

using namespace cqw;
using Catch::Approx;

namespace {
FmoHamiltonianData default_fmo_data() { return load_fmo_data(CQW_DEFAULT_FMO_DATA); }
}  // namespace

TEST_CASE("switch mirror symmetry at theta = 0") {
    SwitchExperiment sw = build_switch({0.0, 1, 2, 0.0});
    auto times = linspace(0.0, 20.0, 400);
    Trajectory traj = run_unitary(sw.system, times);
    auto pe = transfer_probability(traj, sw.pole_e);
    auto pf = transfer_probability(traj, sw.pole_f);
    for (std::size_t i = 0; i < pe.size(); ++i) REQUIRE(pe[i] == Approx(pf[i]).margin(1e-12));
}

TEST_CASE("switch reflection maps theta to -theta") {
    const double theta = 0.8;
    SwitchExperiment plus = build_switch({theta, 1, 2, 0.0});
    SwitchExperiment minus = build_switch({-theta, 1, 2, 0.0});
    auto times = linspace(0.0, 15.0, 300);
    auto pe_plus = transfer_probability(run_unitary(plus.system, times), plus.pole_e);
    auto pf_minus = transfer_probability(run_unitary(minus.system, times), minus.pole_f);
    for (std::size_t i = 0; i < pe_plus.size(); ++i)
        REQUIRE(pe_plus[i] == Approx(pf_minus[i]).margin(1e-9));
}

TEST_CASE("trapped switch structure") {
    SwitchExperiment sw = build_switch({pi / 2, 1, 2, 1.0});
    REQUIRE(sw.system.absorbers.size() == 2);
    REQUIRE(sw.system.tracked_site() == sw.system.system_dim());  // first sink
    REQUIRE(pure_trapping(sw.system));
    // Absorbed probabilities from both poles approach a full split.
    TrappedPropagator prop = trapped_propagator(sw.system);
    const double inf = std::numeric_limits<double>::infinity();
    const double at_e = absorbed_in(sw.system, prop, sw.system.absorbers[0], inf);
    const double at_f = absorbed_in(sw.system, prop, sw.system.absorbers[1], inf);
    REQUIRE(at_e + at_f == Approx(1.0).margin(1e-9));
    REQUIRE(at_e > at_f);  // positive control phase routes to E
    REQUIRE_THROWS_AS(build_switch({0.0, 0, 2, 0.0}), std::invalid_argument);
}

TEST_CASE("triangle chain structure and enhancing sign") {
    ChainExperiment chain = build_triangle_chain({4, -pi / 2, true, 1.0});
    REQUIRE(chain.system.graph.site_count() == 2 * 4 + 2);  // lead + core
    REQUIRE(chain.control_edges.size() == 4);
    REQUIRE(chain.system.start_site == 0);
    REQUIRE(chain.system.target_site == 9);
    REQUIRE(pure_trapping(chain.system));

    TrappedPropagator fast = trapped_propagator(build_triangle_chain({4, -pi / 2, true, 1.0}).system);
    TrappedPropagator slow = trapped_propagator(build_triangle_chain({4, 0.0, true, 1.0}).system);
    auto tau_fast = fast.absorption_half_time(0);
    auto tau_slow = slow.absorption_half_time(0);
    REQUIRE(tau_fast.has_value());
    REQUIRE(tau_slow.has_value());
    REQUIRE(*tau_fast < *tau_slow);
    REQUIRE_THROWS_AS(build_triangle_chain({0, 0.0, true, 1.0}), std::invalid_argument);
}

TEST_CASE("trapped chain agrees with the explicit lindblad model") {
    ChainExperiment chain = build_triangle_chain({3, -pi / 2, true, 1.0});
    auto times = linspace(0.0, 12.0, 120);
    Trajectory traj = run_open(chain.system, times);
    TrappedPropagator prop = trapped_propagator(chain.system);
    const int sink = chain.system.tracked_site();
    for (std::size_t i = 0; i < times.size(); ++i)
        REQUIRE(traj.occupancies(static_cast<Eigen::Index>(i), sink) ==
                Approx(prop.absorbed(0, times[i])).margin(1e-7));
    for (double tr : traj.trace) REQUIRE(tr == Approx(1.0).margin(1e-7));
}

TEST_CASE("wavenumber conversion constant") {
    REQUIRE(cm_inverse_to_rad_per_ps == Approx(0.188365).margin(1e-6));
}

TEST_CASE("fmo construction") {
    FmoExperiment fmo = build_fmo(default_fmo_data());
    REQUIRE(fmo.system.system_dim() == 7);
    REQUIRE(fmo.system.model_dim() == 9);  // drain + sink
    REQUIRE(fmo.system.dephasing_rate == Approx(9.0));
    REQUIRE(fmo.system.start_site == 0);
    REQUIRE(fmo.system.absorbers[1].sources == std::vector<int>{2});
    // Negative couplings are carried as phase pi.
    auto idx = fmo.system.graph.edge_index(0, 1);
    REQUIRE(idx.has_value());
    REQUIRE(fmo.system.graph.edges()[*idx].phase == Approx(pi));
    REQUIRE(fmo.system.graph.edges()[*idx].coupling ==
            Approx(106.0 * cm_inverse_to_rad_per_ps));
}

TEST_CASE("fmo trace conservation and monotone sinks") {
    FmoExperiment fmo = build_fmo(default_fmo_data());
    auto times = linspace(0.0, 10.0, 200);
    Trajectory traj = run_open(fmo.system, times);
    const int drain = fmo.system.absorber_site("drain");
    const int sink = fmo.system.absorber_site("sink");
    double prev_drain = -1.0, prev_sink = -1.0;
    for (std::size_t i = 0; i < traj.points(); ++i) {
        REQUIRE(traj.trace[i] == Approx(1.0).margin(1e-7));
        const double d = traj.occupancies(static_cast<Eigen::Index>(i), drain);
        const double s = traj.occupancies(static_cast<Eigen::Index>(i), sink);
        REQUIRE(d >= prev_drain - 1e-10);
        REQUIRE(s >= prev_sink - 1e-10);
        prev_drain = d;
        prev_sink = s;
    }
    REQUIRE(prev_sink > 0.5);  // the sink really collects within 10 ps
}

TEST_CASE("fmo with all rates zero is unitary") {
    FmoExperiment fmo = build_fmo(default_fmo_data(), {0.0, 0.0, 0.0});
    REQUIRE(fmo.system.absorbers.empty());
    auto times = linspace(0.0, 2.0, 50);
    Trajectory open = run_open(fmo.system, times);
    Trajectory closed = run_unitary(fmo.system, times);
    REQUIRE((open.occupancies.leftCols(7) - closed.occupancies).cwiseAbs().maxCoeff() < 1e-7);
    for (double tr : open.trace) REQUIRE(tr == Approx(1.0).margin(1e-9));
}

TEST_CASE("fmo phase tables shift the stored couplings") {
    FmoExperiment fmo = build_fmo(default_fmo_data());
    FmoExperiment dressed = fmo;
    apply_fmo_phase_table(dressed, fmo_phase_set_a1());
    // Edge 1-3 (positive coupling, base phase 0) picks up the listed phase.
    auto idx13 = dressed.system.graph.edge_index(0, 2);
    REQUIRE(dressed.system.graph.edges()[*idx13].phase == Approx(0.04222214 * pi));
    // Edge 3-4 (negative coupling, base phase pi) shifts on top of pi.
    auto idx34 = dressed.system.graph.edge_index(2, 3);
    REQUIRE(dressed.system.graph.edges()[*idx34].phase ==
            Approx(wrap_phase(pi + 1.31484899 * pi)));
    // Magnitudes untouched.
    for (int i = 0; i < fmo.system.graph.edge_count(); ++i)
        REQUIRE(dressed.system.graph.edges()[i].coupling ==
                Approx(fmo.system.graph.edges()[i].coupling));
    REQUIRE(fmo_phase_set_a1().size() == 7);
    REQUIRE(fmo_phase_set_a2().size() == 3);
}

TEST_CASE("watts-strogatz experiment") {
    WsExperiment ws = build_ws_experiment({32, 4, 0.2, 11, 1.0});
    REQUIRE(ws.system.graph.edge_count() == 64);
    REQUIRE(ws.system.target_site == 16);
    REQUIRE(ws.system.tracked_site() == 32);
    REQUIRE(pure_trapping(ws.system));
    // Same seed, same graph and same trajectory.
    WsExperiment again = build_ws_experiment({32, 4, 0.2, 11, 1.0});
    for (int i = 0; i < 64; ++i) {
        REQUIRE(ws.system.graph.edges()[i].n == again.system.graph.edges()[i].n);
        REQUIRE(ws.system.graph.edges()[i].m == again.system.graph.edges()[i].m);
    }
    TrappedPropagator a = trapped_propagator(ws.system);
    TrappedPropagator b = trapped_propagator(again.system);
    REQUIRE(a.absorbed(0, 25.0) == b.absorbed(0, 25.0));
}

TEST_CASE("experiment validation") {
    ExperimentSystem sys;
    sys.graph = generate_cycle(4, 1.0, 0.0);
    sys.start_site = 9;
    REQUIRE_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.start_site = 0;
    sys.absorbers.push_back({"sink", -1.0, {2}});
    REQUIRE_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.absorbers[0].rate = 1.0;
    sys.absorbers[0].sources = {7};
    REQUIRE_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.absorbers[0].sources = {2};
    sys.onsite_energies = {1.0, 2.0};
    REQUIRE_THROWS_AS(sys.validate(), dimension_error);
}
