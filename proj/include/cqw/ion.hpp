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

#include <array>
#include <cmath>
#include <string>

#include "cqw/dynamics.hpp"

namespace cqw::ion {

/// Spin-spin coupling mediated by one vibrational mode of the string:
/// J = Omega^2 eta^2 omega / (Delta^2 - omega^2). The sign follows the
/// detuning side; Delta == omega is the motional resonance pole.
inline double ion_coupling(double laser_coupling, double lamb_dicke, double mode_frequency,
                           double detuning) {
    const double denom = detuning * detuning - mode_frequency * mode_frequency;
    if (denom == 0.0)
        throw std::invalid_argument("ion_coupling: detuning equals the mode frequency (pole)");
    return laser_coupling * laser_coupling * lamb_dicke * lamb_dicke * mode_frequency / denom;
}

/// Adiabaticity margin of a bichromatic drive near one motional mode:
/// |omega - mu| / (eta * omega). Values well above 1 keep phonon generation
/// negligible.
inline double adiabaticity_ratio(double mode_frequency, double drive_frequency,
                                 double lamb_dicke) {
    if (lamb_dicke <= 0.0 || mode_frequency <= 0.0)
        throw std::invalid_argument("adiabaticity_ratio: eta and omega must be positive");
    return std::abs(mode_frequency - drive_frequency) / (lamb_dicke * mode_frequency);
}

/// Three-ion axial spectrum defaults (angular MHz): COM mode at 2 pi x 1 MHz
/// driven 100 kHz off resonance, breathing mode at sqrt(3) x COM driven
/// 50 kHz off, with Lamb-Dicke factors sized for adiabaticity margins of
/// 21 and 14.
struct IonSpectrumDefaults {
    double com_frequency = 2.0 * pi * 1.0;
    double com_drive = 2.0 * pi * 1.1;
    double com_lamb_dicke = 0.1 / 21.0;
    double br_frequency = 2.0 * pi * 1.7320508075688772;
    double br_drive = 2.0 * pi * (1.7320508075688772 + 0.05);
    double br_lamb_dicke = 0.05 / (14.0 * 1.7320508075688772);
};

/// Effective walk parameters for the two axial modes: the centre-of-mass mode
/// couples all three ion pairs, the breathing mode only the outer pair. Each
/// bichromatic field carries its own phase.
struct IonModel {
    double j_com = 0.0;
    double j_br = 0.0;
    double phi1 = 0.0;  // COM field phase
    double phi2 = 0.0;  // breathing field phase

    /// Experiment parameter rows.
    static IonModel cqw1() { return {2.0, -3.0, pi / 2.0, 0.304 * pi}; }
    static IonModel cqw2() { return {2.0, -3.0, pi / 2.0, -0.304 * pi}; }
    static IonModel qw() { return {-2.0, 1.0, pi / 2.0, 0.0}; }
};

namespace detail {

inline ComplexMatrix pauli_x() {
    ComplexMatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix s(2, 2);
    s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return s;
}

/// sigma_phi = cos(phi) sigma_x + sin(phi) sigma_y on one of three spins
/// (spin-up = index 0), embedded in the 8-dimensional product space.
inline ComplexMatrix sigma_phi_on(int spin, double phi) {
    const ComplexMatrix op = std::cos(phi) * pauli_x() + std::sin(phi) * pauli_y();
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    ComplexMatrix out = spin == 0 ? op : id;
    out = cqw::detail::kron(out, spin == 1 ? op : id);
    out = cqw::detail::kron(out, spin == 2 ? op : id);
    return out;
}

}  // namespace detail

/// Full three-spin Hamiltonian H_COM(phi1) + H_Br(phi2) on the 8-dimensional
/// product space (ordering spin1 x spin2 x spin3, up = index 0).
inline HermitianOperator three_spin_hamiltonian(const IonModel& p) {
    auto pair_term = [&](int a, int b, double phi) -> ComplexMatrix {
        return detail::sigma_phi_on(a, phi) * detail::sigma_phi_on(b, phi);
    };
    ComplexMatrix h = p.j_com * (pair_term(0, 1, p.phi1) + pair_term(1, 2, p.phi1) +
                                 pair_term(0, 2, p.phi1)) +
                      p.j_br * pair_term(0, 2, p.phi2);
    return HermitianOperator(std::move(h));
}

/// The four walk states |1..4> = up-down-down, down-up-down, down-down-up,
/// up-up-up as product-space indices.
inline std::array<int, 4> walk_state_indices() { return {3, 5, 6, 0}; }

/// 8x4 isometry whose columns are the walk states.
inline ComplexMatrix walk_subspace_isometry() {
    ComplexMatrix v = ComplexMatrix::Zero(8, 4);
    const auto idx = walk_state_indices();
    for (int j = 0; j < 4; ++j) v(idx[static_cast<std::size_t>(j)], j) = 1.0;
    return v;
}

/// Orthogonal projector onto the walk subspace.
inline ComplexMatrix walk_subspace_projector() {
    const ComplexMatrix v = walk_subspace_isometry();
    return v * v.adjoint();
}

/// Effective 4-site chiral walk: the three-spin Hamiltonian leaves the walk
/// subspace invariant, and the compression carries real exchange couplings
/// between |1>,|2>,|3> plus couplings into |4> dressed with e^{-2 i phi}.
inline HermitianOperator build_ion_walk(const IonModel& p) {
    const ComplexMatrix v = walk_subspace_isometry();
    return HermitianOperator(v.adjoint() * three_spin_hamiltonian(p).matrix() * v);
}

/// Residual of the invariance property: max element of [H, P] for the walk
/// subspace projector P. Zero (to rounding) for every parameter row.
inline double subspace_commutator_norm(const IonModel& p) {
    const ComplexMatrix h = three_spin_hamiltonian(p).matrix();
    const ComplexMatrix proj = walk_subspace_projector();
    return (h * proj - proj * h).cwiseAbs().maxCoeff();
}

}  // namespace cqw::ion
