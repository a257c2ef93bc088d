#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpa/fiber_modes.hpp"

namespace tpa {

// Three-level ladder: ground -> intermediate (omega1, d1, decay gamma1)
// -> upper (omega2, d2, decay gamma2). Dipole moments are orientation
// averaged scalars in C m.
struct AtomicLadder {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

enum class PairKind { Entangled, Monochromatic };

// Signal/idler center frequencies and the Gaussian half-width sigma of the
// anticorrelated frequency offset. sigma is ignored for monochromatic pairs.
struct PhotonPairSpec {
    double omega_s0 = 0.0;
    double omega_i0 = 0.0;
    double sigma = 0.0;
    PairKind kind = PairKind::Entangled;
};

struct VaporSpec {
    double density_rhoA = 0.0;
};

// Ring resonator treated as a bent fiber of diameter minor_diameter_dt and
// quantization length equal to the ring circumference.
struct ToroidSpec {
    double principal_diameter_Dt = 0.0;
    double minor_diameter_dt = 0.0;
};

struct PerAtomSample {
    double r = 0.0;
    double phi = 0.0;
    double rate = 0.0;
};

struct TpaReport {
    double rate_R2 = 0.0;
    std::complex<double> amplitude_at_surface{0.0, 0.0};
    std::vector<PerAtomSample> per_atom_rate_map;
    std::optional<double> enhancement_factor;
    std::optional<double> enhancement_rate_ratio;
    std::optional<double> separation_s;
    std::map<std::string, double> inputs_echo;
};

// Interaction matrix elements (m1, m2) for an atom at (r, phi, z) outside
// the core, built from the analytic-signal field amplitudes of the two
// normalized modes.
std::pair<std::complex<double>, std::complex<double>> matrix_elements(
    const GuidedMode& mode_s, const GuidedMode& mode_i,
    const AtomicLadder& atom, double r, double phi, double z);

// Steady-state upper-level amplitude for one monochromatic photon pair with
// intermediate-state detuning delta.
std::complex<double> amplitude_monochromatic(std::complex<double> m1,
                                             std::complex<double> m2,
                                             double delta,
                                             const AtomicLadder& atom);

// Upper-level amplitude for a frequency-entangled pair in the continuum
// limit of the frequency superposition.
std::complex<double> amplitude_entangled_continuum(const GuidedMode& mode_s0,
                                                   const GuidedMode& mode_i0,
                                                   const AtomicLadder& atom,
                                                   const PhotonPairSpec& pair,
                                                   const FiberSpec& fiber,
                                                   double r, double phi,
                                                   double z);

// Midpoint-grid evaluation of the discrete frequency superposition over
// nu in [-span_sigmas*sigma, +span_sigmas*sigma].
std::complex<double> entangled_discrete_sum(const GuidedMode& mode_s0,
                                            const GuidedMode& mode_i0,
                                            const AtomicLadder& atom,
                                            const PhotonPairSpec& pair,
                                            const FiberSpec& fiber, double r,
                                            double phi, double z,
                                            std::size_t n_points,
                                            double span_sigmas);

// Discrete-sum amplitude with a grid-doubling convergence check.
std::complex<double> amplitude_entangled_discrete(
    const GuidedMode& mode_s0, const GuidedMode& mode_i0,
    const AtomicLadder& atom, const PhotonPairSpec& pair,
    const FiberSpec& fiber, double r, double phi, double z,
    std::size_t n_points = 32768, double span_sigmas = 8.0,
    double rel_tol = 1e-5);

// Two-photon excitation rate of a single atom from its upper-level
// amplitude.
double rate_per_atom(std::complex<double> amplitude, const AtomicLadder& atom);

// Vapor-integrated rate over the evanescent region outside the core.
TpaReport total_rate(const GuidedMode& mode_s0, const GuidedMode& mode_i0,
                     const AtomicLadder& atom, const PhotonPairSpec& pair,
                     const FiberSpec& fiber, const VaporSpec& vapor);

// Narrow-bandwidth closed form of the entangled rate, valid for
// sigma well below the mean detuning.
double rate_asymptotic(const GuidedMode& mode_s0, const GuidedMode& mode_i0,
                       const AtomicLadder& atom, const PhotonPairSpec& pair,
                       const FiberSpec& fiber, const VaporSpec& vapor);

// Typical longitudinal separation of the two photons of an entangled pair.
double pair_separation(double u, double sigma);

// Relative coincidence probability density at a given longitudinal
// separation, normalized to one at zero separation.
double coincidence_profile(double z_separation, double u, double sigma);

// Pair-confinement enhancement factor sqrt(2)*L*sigma/u.
double enhancement_factor(const FiberSpec& fiber, double u, double sigma);

// Monochromatic rate for a thin ring resonator via the bent-fiber
// approximation.
TpaReport microtoroid_rate(const ToroidSpec& toroid, const AtomicLadder& atom,
                           const VaporSpec& vapor, double wavelength,
                           double core_index = 1.4537);

}  // namespace tpa
