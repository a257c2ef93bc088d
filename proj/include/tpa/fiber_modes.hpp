#pragma once

#include <complex>
#include <functional>

namespace tpa {

// Step-index cylindrical waveguide: sub-wavelength core in vacuum cladding.
struct FiberSpec {
    double diameter_D = 0.0;  // core diameter, m
    double length_L = 0.0;    // quantization length, m
    std::function<double(double)> core_index;  // omega -> refractive index
    double cladding_index = 1.0;

    double core_radius() const { return 0.5 * diameter_D; }
};

// Convenience constructor with a frequency-independent core index.
FiberSpec make_fiber(double diameter, double length, double n_core);

struct FieldVector {
    std::complex<double> E_r{0.0, 0.0};
    std::complex<double> E_phi{0.0, 0.0};
    std::complex<double> E_z{0.0, 0.0};

    double magnitude() const;  // sqrt(|E_r|^2 + |E_phi|^2 + |E_z|^2)
};

// One solved fundamental mode, immutable after construction. The cached
// cross-section parameters make field evaluation self-contained.
struct GuidedMode {
    double omega = 0.0;              // rad/s
    double beta = 0.0;               // rad/m
    double norm_factor_Nbeta = 0.0;  // V/m scale for one photon in length L
    double group_velocity_u = 0.0;   // m/s
    double energy_fraction_outside = 0.0;

    double core_radius = 0.0;
    double n_core = 0.0;
    double n_clad = 1.0;
    double kappa = 0.0;        // transverse wavenumber inside the core, 1/m
    double gamma = 0.0;        // evanescent decay constant outside, 1/m
    double s_hybrid = 0.0;     // hybrid-mode polarization parameter
    double clad_match = 0.0;   // transverse amplitude ratio across the boundary
    double axial_scale = 0.0;  // longitudinal component scale 2 kappa / beta
    double axial_clad = 0.0;   // cladding longitudinal amplitude ratio

    // Normalized field at (r, phi) for the horizontal linear orientation.
    FieldVector field_profile(double r, double phi) const;
};

// Eigenvalue condition of the fundamental hybrid mode as a function of beta;
// zero at a guided mode. Throws InvalidEigenvalue outside the guided bound.
double dispersion_function(const FiberSpec& fiber, double omega, double beta);

// Fundamental-mode propagation constant: 512-point bracket scan over the
// guided range followed by bisection/secant refinement to relative 1e-12.
double solve_propagation_constant(const FiberSpec& fiber, double omega);

// Unnormalized exact vector field of the fundamental mode at (r, phi).
FieldVector mode_field(const FiberSpec& fiber, double omega, double beta,
                       double r, double phi);

// Solve, normalize to one photon of energy in length L (time-averaged
// electric energy hbar*omega/2), and attach the group velocity.
GuidedMode normalize_mode(const FiberSpec& fiber, double omega);

// u = d(omega)/d(beta) via Richardson-extrapolated central difference.
double group_velocity(const FiberSpec& fiber, double omega);

// True when the normalized frequency V stays below the second-mode cutoff.
bool single_mode_check(const FiberSpec& fiber, double omega);

}  // namespace tpa
