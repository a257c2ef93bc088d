#pragma once

#include <array>
#include <complex>

namespace tpa {

// Probability amplitudes of the three-level ladder driven by two photons,
// with the ground amplitude held at one (undepleted source).
struct LadderAmplitudeState {
    std::complex<double> alpha1{0.0, 0.0};  // doubly excited level
    std::complex<double> alpha2{0.0, 0.0};  // intermediate level
    double t = 0.0;
};

// 3x3 density matrix in the basis {doubly excited, intermediate, ground}.
struct DensityMatrixState {
    std::array<std::array<std::complex<double>, 3>, 3> rho{};
    double t = 0.0;
};

// Integrate the driven-decaying amplitude equations from rest with an
// adaptive embedded Runge-Kutta pair at local tolerance dt_tol.
LadderAmplitudeState integrate_amplitudes(std::complex<double> m1,
                                          std::complex<double> m2,
                                          double delta,
                                          double gamma1, double gamma2,
                                          double t_final, double dt_tol);

// Integrate d(rho)/dt = (-i/hbar)[V, rho] - (1/2){Gamma, rho} from the pure
// ground state. Decay only removes population; nothing is refilled.
DensityMatrixState evolve_density_matrix(std::complex<double> m1,
                                         std::complex<double> m2,
                                         double delta,
                                         double gamma1, double gamma2,
                                         double t_final, double dt_tol);

// Largest element-wise deviation between rho and the outer product of the
// amplitude vector (alpha1, alpha2, 1).
double check_factorization(const DensityMatrixState& rho,
                           const LadderAmplitudeState& amps);

}  // namespace tpa
