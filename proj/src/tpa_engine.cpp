#include "tpa/tpa_engine.hpp"

#include <cmath>
#include <complex>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"
#include "tpa/numerics.hpp"

namespace tpa {

namespace {

using cplx = std::complex<double>;

constexpr cplx kImag{0.0, 1.0};
constexpr double kRoot2 = 1.4142135623730951;

// Relative tolerance of the exterior cross-section integrals. The value is
// converged to twelve digits already at this setting, while tighter targets
// only inflate the subdivision depth.
constexpr double kRateQuadTol = 1e-7;

double mean_detuning(const PhotonPairSpec& pair, const AtomicLadder& atom) {
    return pair.omega_s0 - atom.omega1;
}

void require_resonance(const PhotonPairSpec& pair, const AtomicLadder& atom) {
    const double sum_atom = atom.omega1 + atom.omega2;
    const double sum_pair = pair.omega_s0 + pair.omega_i0;
    if (std::abs(sum_pair - sum_atom) > 1e-9 * std::abs(sum_atom)) {
        throw ConfigError(
            "photon center frequencies violate the two-photon resonance "
            "condition omega_s0 + omega_i0 = omega1 + omega2");
    }
}

double quartic_kernel(const GuidedMode& mode_s, const GuidedMode& mode_i,
                      double r, double phi) {
    const double es = mode_s.field_profile(r, phi).magnitude();
    const double ei = mode_i.field_profile(r, phi).magnitude();
    return es * es * ei * ei;
}

// Outer integration radius: extend until the quartic kernel has fallen to
// 1e-12 of its value at the core surface.
double exterior_cutoff_radius(const GuidedMode& mode_s,
                              const GuidedMode& mode_i,
                              const FiberSpec& fiber) {
    const double a = fiber.core_radius();
    const double boundary = quartic_kernel(mode_s, mode_i, a, 0.0);
    double r_max = 5.0 * fiber.diameter_D;
    for (int attempt = 0; attempt < 64; ++attempt) {
        if (quartic_kernel(mode_s, mode_i, r_max, 0.0) <= 1e-12 * boundary) {
            return r_max;
        }
        r_max *= 2.0;
    }
    throw NonConvergence(
        "evanescent kernel never fell below the boundary cutoff while "
        "extending the integration radius");
}

cplx zeta_argument(double delta_mean, double gamma1, double sigma) {
    return cplx{2.0 * delta_mean, gamma1} / (2.0 * kRoot2 * sigma);
}

}  // namespace

std::pair<cplx, cplx> matrix_elements(const GuidedMode& mode_s,
                                      const GuidedMode& mode_i,
                                      const AtomicLadder& atom, double r,
                                      double phi, double z) {
    if (r < mode_s.core_radius) {
        throw PointInsideCore(
            "matrix elements are defined only for atoms outside the core");
    }
    // The stored profile is rms normalized; the analytic-signal amplitude
    // seen by the transition carries sqrt(2) per photon.
    const double es = mode_s.field_profile(r, phi).magnitude();
    const double ei = mode_i.field_profile(r, phi).magnitude();
    const cplx m1 =
        -kRoot2 * std::exp(-kImag * (mode_s.beta * z)) * atom.d1 * es;
    const cplx m2 =
        -kRoot2 * std::exp(-kImag * (mode_i.beta * z)) * atom.d2 * ei;
    return {m1, m2};
}

cplx amplitude_monochromatic(cplx m1, cplx m2, double delta,
                             const AtomicLadder& atom) {
    const cplx lorentz{2.0 * delta, atom.gamma1};
    return -4.0 * kImag * std::conj(m1) * std::conj(m2) /
           (constants::hbar * constants::hbar * lorentz * atom.gamma2);
}

cplx amplitude_entangled_continuum(const GuidedMode& mode_s0,
                                   const GuidedMode& mode_i0,
                                   const AtomicLadder& atom,
                                   const PhotonPairSpec& pair,
                                   const FiberSpec& fiber, double r,
                                   double phi, double z) {
    const cplx zeta =
        zeta_argument(mean_detuning(pair, atom), atom.gamma1, pair.sigma);
    if (std::abs(zeta) > 50.0) {
        throw AccuracyDomainExceeded(
            "detuning-to-bandwidth ratio places the line-shape argument "
            "outside the validated accuracy region |z| <= 50");
    }
    const auto [m1, m2] = matrix_elements(mode_s0, mode_i0, atom, r, phi, z);
    const double u = mode_s0.group_velocity_u;
    const double prefactor = std::sqrt(
        2.0 * std::sqrt(constants::pi) * fiber.length_L / (pair.sigma * u));
    return -prefactor * std::conj(m1) * std::conj(m2) *
           numerics::faddeeva_w(zeta) /
           (constants::hbar * constants::hbar * atom.gamma2);
}

cplx entangled_discrete_sum(const GuidedMode& mode_s0,
                            const GuidedMode& mode_i0,
                            const AtomicLadder& atom,
                            const PhotonPairSpec& pair, const FiberSpec& fiber,
                            double r, double phi, double z,
                            std::size_t n_points, double span_sigmas) {
    const auto [m1, m2] = matrix_elements(mode_s0, mode_i0, atom, r, phi, z);
    const double delta_mean = mean_detuning(pair, atom);
    const double u = mode_s0.group_velocity_u;
    const double sigma = pair.sigma;
    const double half_span = span_sigmas * sigma;
    const double dnu = 2.0 * half_span / static_cast<double>(n_points);

    const double comb_norm =
        std::sqrt(2.0 * std::sqrt(constants::pi) * u / (fiber.length_L * sigma));
    const double measure = fiber.length_L * dnu / (2.0 * constants::pi * u);

    cplx sum{0.0, 0.0};
    for (std::size_t k = 0; k < n_points; ++k) {
        const double nu =
            -half_span + (static_cast<double>(k) + 0.5) * dnu;
        const double weight = std::exp(-nu * nu / (2.0 * sigma * sigma));
        sum += weight * amplitude_monochromatic(m1, m2, delta_mean + nu, atom);
    }
    return comb_norm * measure * sum;
}

cplx amplitude_entangled_discrete(const GuidedMode& mode_s0,
                                  const GuidedMode& mode_i0,
                                  const AtomicLadder& atom,
                                  const PhotonPairSpec& pair,
                                  const FiberSpec& fiber, double r, double phi,
                                  double z, std::size_t n_points,
                                  double span_sigmas, double rel_tol) {
    const cplx coarse = entangled_discrete_sum(mode_s0, mode_i0, atom, pair,
                                               fiber, r, phi, z, n_points,
                                               span_sigmas);
    const cplx fine = entangled_discrete_sum(mode_s0, mode_i0, atom, pair,
                                             fiber, r, phi, z, 2 * n_points,
                                             span_sigmas);
    if (std::abs(fine - coarse) > 10.0 * rel_tol * std::abs(fine)) {
        throw GridTooCoarse(
            "frequency grid did not converge under doubling to the requested "
            "tolerance");
    }
    return fine;
}

double rate_per_atom(cplx amplitude, const AtomicLadder& atom) {
    return std::norm(amplitude) * atom.gamma2;
}

TpaReport total_rate(const GuidedMode& mode_s0, const GuidedMode& mode_i0,
                     const AtomicLadder& atom, const PhotonPairSpec& pair,
                     const FiberSpec& fiber, const VaporSpec& vapor) {
    require_resonance(pair, atom);
    const double a = fiber.core_radius();
    const double delta_mean = mean_detuning(pair, atom);

    const auto amplitude_at = [&](double r, double phi) -> cplx {
        if (pair.kind == PairKind::Monochromatic) {
            const auto [m1, m2] =
                matrix_elements(mode_s0, mode_i0, atom, r, phi, 0.0);
            return amplitude_monochromatic(m1, m2, delta_mean, atom);
        }
        return amplitude_entangled_continuum(mode_s0, mode_i0, atom, pair,
                                             fiber, r, phi, 0.0);
    };
    const auto per_atom = [&](double r, double phi) {
        return rate_per_atom(amplitude_at(r, phi), atom);
    };

    const double r_max = exterior_cutoff_radius(mode_s0, mode_i0, fiber);
    const numerics::QuadratureResult cross_section =
        numerics::integrate_adaptive_2d(
            [&](double r, double phi) { return per_atom(r, phi) * r; }, a,
            r_max, 0.0, 2.0 * constants::pi, kRateQuadTol);

    TpaReport report;
    report.rate_R2 = vapor.density_rhoA * fiber.length_L * cross_section.value;
    report.amplitude_at_surface = amplitude_at(a, 0.0);

    for (const double scale : {1.0, 1.25, 1.5, 2.0, 3.0}) {
        for (const double sample_phi : {0.0, 0.5 * constants::pi}) {
            report.per_atom_rate_map.push_back(PerAtomSample{
                scale * a, sample_phi, per_atom(scale * a, sample_phi)});
        }
    }

    if (pair.kind == PairKind::Entangled) {
        const double u = mode_s0.group_velocity_u;
        report.enhancement_factor = enhancement_factor(fiber, u, pair.sigma);
        report.enhancement_rate_ratio =
            fiber.length_L * pair.sigma / (u * std::sqrt(constants::pi));
        report.separation_s = pair_separation(u, pair.sigma);
    }

    report.inputs_echo = {
        {"fiber.diameter_m", fiber.diameter_D},
        {"fiber.length_m", fiber.length_L},
        {"fiber.core_index", fiber.core_index(pair.omega_s0)},
        {"fiber.cladding_index", fiber.cladding_index},
        {"atom.omega1_rad_s", atom.omega1},
        {"atom.omega2_rad_s", atom.omega2},
        {"atom.d1_C_m", atom.d1},
        {"atom.d2_C_m", atom.d2},
        {"atom.gamma1_per_s", atom.gamma1},
        {"atom.gamma2_per_s", atom.gamma2},
        {"pair.omega_s0_rad_s", pair.omega_s0},
        {"pair.omega_i0_rad_s", pair.omega_i0},
        {"pair.sigma_rad_s", pair.sigma},
        {"pair.entangled",
         pair.kind == PairKind::Entangled ? 1.0 : 0.0},
        {"vapor.density_per_m3", vapor.density_rhoA},
        {"mode.beta_s_rad_m", mode_s0.beta},
        {"mode.beta_i_rad_m", mode_i0.beta},
        {"mode.group_velocity_m_s", mode_s0.group_velocity_u},
        {"integral.r_max_m", r_max},
    };
    return report;
}

double rate_asymptotic(const GuidedMode& mode_s0, const GuidedMode& mode_i0,
                       const AtomicLadder& atom, const PhotonPairSpec& pair,
                       const FiberSpec& fiber, const VaporSpec& vapor) {
    const double a = fiber.core_radius();
    const double r_max = exterior_cutoff_radius(mode_s0, mode_i0, fiber);
    const numerics::QuadratureResult cross_section =
        numerics::integrate_adaptive_2d(
            [&](double r, double phi) {
                return quartic_kernel(mode_s0, mode_i0, r, phi) * r;
            },
            a, r_max, 0.0, 2.0 * constants::pi, kRateQuadTol);

    const double delta_mean = mean_detuning(pair, atom);
    const double u = mode_s0.group_velocity_u;
    const double length = fiber.length_L;
    const double dipole_product = atom.d1 * atom.d2;
    const double lorentz =
        4.0 * delta_mean * delta_mean + atom.gamma1 * atom.gamma1;
    const double hbar4 = std::pow(constants::hbar, 4);
    return 64.0 * length * length * pair.sigma * dipole_product *
           dipole_product * vapor.density_rhoA * cross_section.value /
           (std::sqrt(constants::pi) * u * hbar4 * lorentz * atom.gamma2);
}

double pair_separation(double u, double sigma) {
    return u / (kRoot2 * sigma);
}

double coincidence_profile(double z_separation, double u, double sigma) {
    const double x = sigma * z_separation / u;
    return std::exp(-x * x);
}

double enhancement_factor(const FiberSpec& fiber, double u, double sigma) {
    return kRoot2 * fiber.length_L * sigma / u;
}

TpaReport microtoroid_rate(const ToroidSpec& toroid, const AtomicLadder& atom,
                           const VaporSpec& vapor, double wavelength,
                           double core_index) {
    if (!(toroid.principal_diameter_Dt > 0.0) ||
        !(toroid.minor_diameter_dt > 0.0) ||
        toroid.minor_diameter_dt >= 0.1 * toroid.principal_diameter_Dt) {
        throw AspectRatioViolation(
            "ring approximation requires the minor diameter below one tenth "
            "of the principal diameter");
    }
    const double circumference = constants::pi * toroid.principal_diameter_Dt;
    const FiberSpec fiber =
        make_fiber(toroid.minor_diameter_dt, circumference, core_index);
    const double omega = 2.0 * constants::pi * constants::c0 / wavelength;
    const GuidedMode mode = normalize_mode(fiber, omega);

    PhotonPairSpec pair;
    pair.omega_s0 = omega;
    pair.omega_i0 = atom.omega1 + atom.omega2 - omega;
    pair.sigma = 0.0;
    pair.kind = PairKind::Monochromatic;

    TpaReport report = total_rate(mode, mode, atom, pair, fiber, vapor);
    report.inputs_echo["toroid.principal_diameter_m"] =
        toroid.principal_diameter_Dt;
    report.inputs_echo["toroid.minor_diameter_m"] = toroid.minor_diameter_dt;
    return report;
}

}  // namespace tpa
