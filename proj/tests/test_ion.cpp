#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cqw/dynamics.hpp"
#include "cqw/ion.hpp"

using namespace cqw;
using Catch::Approx;

TEST_CASE("mode-mediated coupling formula") {
    // J = Omega^2 eta^2 omega / (Delta^2 - omega^2)
    REQUIRE(ion::ion_coupling(2.0, 0.1, 1.0, 2.0) == Approx(4.0 * 0.01 * 1.0 / 3.0));
    SECTION("far detuning suppresses the coupling") {
        const double j_near = std::abs(ion::ion_coupling(1.0, 0.1, 1.0, 1.2));
        const double j_far = std::abs(ion::ion_coupling(1.0, 0.1, 1.0, 1e6));
        REQUIRE(j_far < 1e-10 * j_near);
    }
    SECTION("inside the mode the sign flips") {
        REQUIRE(ion::ion_coupling(1.0, 0.1, 1.0, 0.5) < 0.0);
        REQUIRE(ion::ion_coupling(1.0, 0.1, 1.0, 1.5) > 0.0);
    }
    SECTION("the motional resonance is a pole") {
        REQUIRE_THROWS_AS(ion::ion_coupling(1.0, 0.1, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("axial spectrum adiabaticity margins") {
    const auto spec = ion::IonSpectrumDefaults{};
    REQUIRE(std::round(ion::adiabaticity_ratio(spec.com_frequency, spec.com_drive,
                                               spec.com_lamb_dicke)) == 21.0);
    REQUIRE(std::round(ion::adiabaticity_ratio(spec.br_frequency, spec.br_drive,
                                               spec.br_lamb_dicke)) == 14.0);
}

TEST_CASE("walk subspace is invariant for all parameter rows") {
    for (const auto& row : {ion::IonModel::cqw1(), ion::IonModel::cqw2(), ion::IonModel::qw()}) {
        REQUIRE(ion::subspace_commutator_norm(row) < 1e-12);
    }
}

TEST_CASE("effective four-site walk matrices") {
    const ComplexMatrix h1 = ion::build_ion_walk(ion::IonModel::cqw1()).matrix();
    const ComplexMatrix h2 = ion::build_ion_walk(ion::IonModel::cqw2()).matrix();
    const ComplexMatrix hq = ion::build_ion_walk(ion::IonModel::qw()).matrix();

    SECTION("exchange couplings carry the mode strengths") {
        REQUIRE(h1(0, 1).real() == Approx(2.0));              // COM only
        REQUIRE(std::abs(h1(0, 1).imag()) < 1e-12);
        REQUIRE(h1(1, 2).real() == Approx(2.0));
        REQUIRE(h1(0, 2).real() == Approx(2.0 - 3.0));        // COM + breathing
        REQUIRE(std::abs(h1(0, 2).imag()) < 1e-12);
        // Couplings into the top state pick up e^{-2 i phi}.
        REQUIRE(h1(0, 3).real() == Approx(-2.0).margin(1e-12));
        REQUIRE(std::abs(h1(1, 3) - Complex(-1.0015, -2.8290)) < 2e-3);
    }
    SECTION("the two chiral rows are elementwise conjugates") {
        REQUIRE((h1 - h2.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("the reference row is real") {
        REQUIRE(hq.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("reference row equals chiral magnitudes after swapping sites 2 and 4") {
        Eigen::Vector4i perm(0, 3, 2, 1);
        ComplexMatrix relabeled(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) relabeled(i, j) = hq(perm(i), perm(j));
        // phi2 = 0.304 pi is a rounded tabulation of cos(2 phi2) = -1/3, so
        // the magnitudes agree to about 1e-3 only.
        REQUIRE((relabeled.cwiseAbs() - h1.cwiseAbs()).cwiseAbs().maxCoeff() < 2e-3);
    }
    SECTION("zero breathing phase gives an achiral walk") {
        ion::IonModel flat = ion::IonModel::cqw1();
        flat.phi2 = 0.0;
        const ComplexMatrix h = ion::build_ion_walk(flat).matrix();
        REQUIRE(h.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("chiral pair dynamics") {
    const HermitianOperator h1 = ion::build_ion_walk(ion::IonModel::cqw1());
    const HermitianOperator h2 = ion::build_ion_walk(ion::IonModel::cqw2());
    const HermitianOperator hq = ion::build_ion_walk(ion::IonModel::qw());
    SpectralPropagator p1(h1), p2(h2), pq(hq);

    SECTION("forward walk of one equals backward walk of the other") {
        for (double t : linspace(0.0, 3.0, 40))
            REQUIRE(p1.site_to_site(0, 1, t) == Approx(p2.site_to_site(1, 0, t)).margin(1e-9));
    }
    SECTION("first peaks are split by more than 0.05 with the reference between") {
        auto times = linspace(0.0, 3.0, 1500);
        auto peak = [&](SpectralPropagator& p, int target) {
            std::vector<double> series(times.size());
            for (std::size_t i = 0; i < times.size(); ++i)
                series[i] = p.site_to_site(0, target, times[i]);
            return first_maximum(series, times).value;
        };
        const double peak1 = peak(p1, 1);
        const double peak2 = peak(p2, 1);
        const double peak_ref = peak(pq, 3);  // relabeled target
        REQUIRE(std::abs(peak1 - peak2) > 0.05);
        REQUIRE(peak_ref > std::min(peak1, peak2));
        REQUIRE(peak_ref < std::max(peak1, peak2));
    }
    SECTION("swapping start and end exchanges the chiral walkers") {
        for (double t : linspace(0.0, 3.0, 40))
            REQUIRE(p1.site_to_site(1, 0, t) == Approx(p2.site_to_site(0, 1, t)).margin(1e-9));
    }
}
