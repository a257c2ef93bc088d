#include "tpa/fiber_modes.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"
#include "tpa/numerics.hpp"

namespace tpa {

namespace {

using constants::c0;
using constants::eps0;
using constants::hbar;
using constants::pi;

// Small-argument-safe Bessel J of orders 0..2.
void bessel_j012(double x, double& j0, double& j1, double& j2) {
    j0 = std::cyl_bessel_j(0, x);
    j1 = std::cyl_bessel_j(1, x);
    // Upward recurrence loses accuracy only below x ~ 1e-5 where the true
    // value x^2/8 is negligible against the order-0 component.
    j2 = (x > 1e-5) ? (2.0 / x) * j1 - j0 : x * x / 8.0;
}

void bessel_k012(double x, double& k0, double& k1, double& k2) {
    k0 = std::cyl_bessel_k(0, x);
    k1 = std::cyl_bessel_k(1, x);
    k2 = (k1 > 0.0 && x > 0.0) ? k0 + (2.0 / x) * k1 : 0.0;
}

struct ModeGeometry {
    double a, k0, n1, n2;
    double neff, beta;
    double U, W;           // transverse arguments at the boundary
    double kappa, gamma;   // 1/m
    double s;              // hybrid polarization parameter
    double j1U, k1W;
    double clad_match;     // (kappa/gamma) * J1(U)/K1(W)
    double axial_scale;    // 2 kappa / beta
    double axial_clad;     // J1(U)/K1(W)
};

ModeGeometry mode_geometry(const FiberSpec& fiber, double omega, double beta) {
    ModeGeometry g;
    g.a = fiber.core_radius();
    g.k0 = omega / c0;
    g.n1 = fiber.core_index(omega);
    g.n2 = fiber.cladding_index;
    g.neff = beta / g.k0;
    g.beta = beta;
    if (!(g.neff > g.n2) || !(g.neff < g.n1)) {
        std::ostringstream msg;
        msg << "effective index " << g.neff << " outside the guided bound ("
            << g.n2 << ", " << g.n1 << ")";
        throw InvalidEigenvalue(msg.str());
    }
    g.kappa = g.k0 * std::sqrt(g.n1 * g.n1 - g.neff * g.neff);
    g.gamma = g.k0 * std::sqrt(g.neff * g.neff - g.n2 * g.n2);
    g.U = g.a * g.kappa;
    g.W = g.a * g.gamma;

    double j0U, j1U, j2U, k0W, k1W, k2W;
    bessel_j012(g.U, j0U, j1U, j2U);
    bessel_k012(g.W, k0W, k1W, k2W);
    g.j1U = j1U;
    g.k1W = k1W;

    double Jq = (j0U - j1U / g.U) / (g.U * j1U);          // J1'(U) / (U J1(U))
    double Kq = -(k0W + k1W / g.W) / (g.W * k1W);         // K1'(W) / (W K1(W))
    double inv2 = 1.0 / (g.U * g.U) + 1.0 / (g.W * g.W);
    g.s = inv2 / (Jq + Kq);
    g.clad_match = (g.kappa / g.gamma) * (j1U / k1W);
    g.axial_scale = 2.0 * g.kappa / beta;
    g.axial_clad = j1U / k1W;
    return g;
}

// Real radial envelopes (E_r, E_phi, E_z magnitudes before the cos/sin
// azimuthal factors and the -i axial phase).
void field_envelopes(const ModeGeometry& g, double r,
                     double& er, double& ep, double& ez) {
    if (r < g.a) {
        double x = g.kappa * r;
        double j0, j1, j2;
        bessel_j012(x, j0, j1, j2);
        er = (1.0 - g.s) * j0 - (1.0 + g.s) * j2;
        ep = -((1.0 - g.s) * j0 + (1.0 + g.s) * j2);
        ez = g.axial_scale * j1;
    } else {
        double y = g.gamma * r;
        double k0, k1, k2;
        bessel_k012(y, k0, k1, k2);
        er = g.clad_match * ((1.0 - g.s) * k0 + (1.0 + g.s) * k2);
        ep = -g.clad_match * ((1.0 - g.s) * k0 - (1.0 + g.s) * k2);
        ez = g.axial_scale * g.axial_clad * k1;
    }
}

FieldVector assemble_field(double er, double ep, double ez, double phi) {
    FieldVector f;
    double c = std::cos(phi), s = std::sin(phi);
    f.E_r = std::complex<double>(er * c, 0.0);
    f.E_phi = std::complex<double>(ep * s, 0.0);
    f.E_z = std::complex<double>(0.0, -ez * c);  // axial component in quadrature
    return f;
}

double dispersion_at_neff(const FiberSpec& fiber, double omega, double neff) {
    double k0 = omega / c0;
    return dispersion_function(fiber, omega, neff * k0);
}

// Scan the guided range top-down and refine the first true root; spurious
// sign changes at pole crossings are rejected by a residual check.
double solve_neff(const FiberSpec& fiber, double omega) {
    double n1 = fiber.core_index(omega);
    double n2 = fiber.cladding_index;
    if (!(n1 > n2))
        throw NoGuidedMode("core index does not exceed the cladding index");

    const int n_scan = 512;
    double lo = n2 * (1.0 + 1e-9);
    double hi = n1 * (1.0 - 1e-9);
    std::vector<double> xs(n_scan), fs(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n_scan - 1);
        fs[i] = dispersion_at_neff(fiber, omega, xs[i]);
    }

    auto f = [&](double x) { return dispersion_at_neff(fiber, omega, x); };
    for (int i = n_scan - 2; i >= 0; --i) {
        if (!(fs[i] * fs[i + 1] < 0.0)) continue;
        double mid_scale = std::abs(f(0.5 * (xs[i] + xs[i + 1])));
        double root = numerics::find_root_bracketed(f, xs[i], xs[i + 1], 1e-14, 200);

        // Secant polish drives the residual toward the roundoff floor.
        double x0 = root * (1.0 - 1e-11), x1 = root;
        double f0 = f(x0), f1 = f(x1);
        for (int k = 0; k < 4 && f1 != f0; ++k) {
            double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if (!(x2 > xs[i] && x2 < xs[i + 1])) break;
            double f2 = f(x2);
            if (std::abs(f2) >= std::abs(f1)) break;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f2;
        }
        if (std::abs(f1) < 1e-8 * mid_scale) return x1;  // true root, not a pole
    }
    throw NoGuidedMode("no fundamental-mode root in the guided range");
}

}  // namespace

FiberSpec make_fiber(double diameter, double length, double n_core) {
    FiberSpec fiber;
    fiber.diameter_D = diameter;
    fiber.length_L = length;
    fiber.core_index = [n_core](double) { return n_core; };
    fiber.cladding_index = 1.0;
    return fiber;
}

double FieldVector::magnitude() const {
    return std::sqrt(std::norm(E_r) + std::norm(E_phi) + std::norm(E_z));
}

FieldVector GuidedMode::field_profile(double r, double phi) const {
    double er, ep, ez;
    if (r < core_radius) {
        double x = kappa * r;
        double j0, j1, j2;
        bessel_j012(x, j0, j1, j2);
        er = (1.0 - s_hybrid) * j0 - (1.0 + s_hybrid) * j2;
        ep = -((1.0 - s_hybrid) * j0 + (1.0 + s_hybrid) * j2);
        ez = axial_scale * j1;
    } else {
        double y = gamma * r;
        double k0, k1, k2;
        bessel_k012(y, k0, k1, k2);
        er = clad_match * ((1.0 - s_hybrid) * k0 + (1.0 + s_hybrid) * k2);
        ep = -clad_match * ((1.0 - s_hybrid) * k0 - (1.0 + s_hybrid) * k2);
        ez = axial_scale * axial_clad * k1;
    }
    FieldVector f = assemble_field(er, ep, ez, phi);
    f.E_r *= norm_factor_Nbeta;
    f.E_phi *= norm_factor_Nbeta;
    f.E_z *= norm_factor_Nbeta;
    return f;
}

double dispersion_function(const FiberSpec& fiber, double omega, double beta) {
    double a = fiber.core_radius();
    double k0 = omega / c0;
    double n1 = fiber.core_index(omega);
    double n2 = fiber.cladding_index;
    double neff = beta / k0;
    if (!(neff > n2) || !(neff < n1)) {
        std::ostringstream msg;
        msg << "dispersion_function: effective index " << neff
            << " outside the guided bound (" << n2 << ", " << n1 << ")";
        throw InvalidEigenvalue(msg.str());
    }
    double U = a * k0 * std::sqrt(n1 * n1 - neff * neff);
    double W = a * k0 * std::sqrt(neff * neff - n2 * n2);
    double j0U, j1U, j2U, k0W, k1W, k2W;
    bessel_j012(U, j0U, j1U, j2U);
    bessel_k012(W, k0W, k1W, k2W);
    double Jq = (j0U - j1U / U) / (U * j1U);
    double Kq = -(k0W + k1W / W) / (W * k1W);
    double inv2 = 1.0 / (U * U) + 1.0 / (W * W);
    return (Jq + Kq) * (n1 * n1 * Jq + n2 * n2 * Kq) - neff * neff * inv2 * inv2;
}

double solve_propagation_constant(const FiberSpec& fiber, double omega) {
    return solve_neff(fiber, omega) * omega / c0;
}

FieldVector mode_field(const FiberSpec& fiber, double omega, double beta,
                       double r, double phi) {
    ModeGeometry g = mode_geometry(fiber, omega, beta);
    double er, ep, ez;
    field_envelopes(g, r, er, ep, ez);
    return assemble_field(er, ep, ez, phi);
}

GuidedMode normalize_mode(const FiberSpec& fiber, double omega) {
    double beta = solve_propagation_constant(fiber, omega);
    ModeGeometry g = mode_geometry(fiber, omega, beta);

    // Azimuthal integration of |E|^2 gives a factor pi for each component,
    // leaving one radial integral per region.
    auto envelope_sq = [&](double r) {
        double er, ep, ez;
        field_envelopes(g, r, er, ep, ez);
        return (er * er + ep * ep + ez * ez) * r;
    };
    double r_tail = g.a + 40.0 / g.gamma;
    auto core_part = numerics::integrate_adaptive(envelope_sq, 0.0, g.a, 1e-10);
    auto clad_part = numerics::integrate_adaptive(envelope_sq, g.a, r_tail, 1e-10);
    double weighted = g.n1 * g.n1 * core_part.value +
                      g.n2 * g.n2 * clad_part.value;

    GuidedMode mode;
    mode.omega = omega;
    mode.beta = beta;
    mode.norm_factor_Nbeta =
        std::sqrt(hbar * omega / (fiber.length_L * eps0 * pi * weighted));
    mode.group_velocity_u = group_velocity(fiber, omega);
    mode.energy_fraction_outside =
        g.n2 * g.n2 * clad_part.value / weighted;
    mode.core_radius = g.a;
    mode.n_core = g.n1;
    mode.n_clad = g.n2;
    mode.kappa = g.kappa;
    mode.gamma = g.gamma;
    mode.s_hybrid = g.s;
    mode.clad_match = g.clad_match;
    mode.axial_scale = g.axial_scale;
    mode.axial_clad = g.axial_clad;
    return mode;
}

double group_velocity(const FiberSpec& fiber, double omega) {
    auto beta_of_omega = [&](double w) {
        return solve_propagation_constant(fiber, w);
    };
    double dbeta_domega =
        numerics::differentiate_central(beta_of_omega, omega, 1e-3 * omega);
    double u = 1.0 / dbeta_domega;
    if (!(u > 0.0) || !(u < c0))
        throw NonConvergence("group_velocity: derivative outside (0, c)");
    return u;
}

bool single_mode_check(const FiberSpec& fiber, double omega) {
    double n1 = fiber.core_index(omega);
    double n2 = fiber.cladding_index;
    double V = fiber.core_radius() * (omega / c0) *
               std::sqrt(n1 * n1 - n2 * n2);
    return V < 2.405;
}

}  // namespace tpa
