#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"
#include "tpa/fiber_modes.hpp"

using tpa::constants::c0;
using tpa::constants::eps0;
using tpa::constants::hbar;
using tpa::constants::pi;

namespace {

constexpr double kCoreIndex = 1.4537;
constexpr double kDiameter = 350e-9;
constexpr double kLength = 5e-3;
constexpr double kLambda = 778e-9;

double omega_of(double lambda) { return 2.0 * pi * c0 / lambda; }

tpa::FiberSpec bench_fiber() {
    return tpa::make_fiber(kDiameter, kLength, kCoreIndex);
}

// Brute-force scan of the dispersion function over the full guided range.
// Every sign change is bisected; brackets that sharpen toward a divergence
// instead of a zero are discarded. Returns the largest surviving root.
double scan_for_fundamental(const tpa::FiberSpec& fiber, double omega,
                            int n_points) {
    double k0 = omega / c0;
    double lo = fiber.cladding_index * k0 * (1.0 + 1e-9);
    double hi = kCoreIndex * k0 * (1.0 - 1e-9);
    double best = 0.0;
    double prev_x = lo;
    double prev_f = tpa::dispersion_function(fiber, omega, prev_x);
    for (int i = 1; i <= n_points; ++i) {
        double x = lo + (hi - lo) * i / n_points;
        double f = tpa::dispersion_function(fiber, omega, x);
        if ((f > 0.0) != (prev_f > 0.0)) {
            double a = prev_x, b = x;
            double fa = prev_f;
            for (int it = 0; it < 100; ++it) {
                double m = 0.5 * (a + b);
                double fm = tpa::dispersion_function(fiber, omega, m);
                if ((fm > 0.0) == (fa > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            double mid = 0.5 * (a + b);
            double fmid = std::abs(tpa::dispersion_function(fiber, omega, mid));
            double edge = std::min(std::abs(prev_f), std::abs(f));
            if (fmid < edge) best = std::max(best, mid);
        }
        prev_x = x;
        prev_f = f;
    }
    return best;
}

struct RadialIntegrals {
    double core = 0.0;
    double clad = 0.0;
};

// Simpson integration of (|E(r,0)|^2 + |E(r,pi/2)|^2) r dr, which equals
// the azimuthal average of |E|^2 times 2/pi, with the core boundary kept on
// a panel edge. The radial field is discontinuous at the core surface and
// the profile reports the cladding branch at exactly r == a, so the core
// integral samples its upper endpoint just inside the boundary.
RadialIntegrals squared_field_integrals(const tpa::GuidedMode& mode) {
    auto ring = [&](double r) {
        double a = mode.field_profile(r, 0.0).magnitude();
        double b = mode.field_profile(r, 0.5 * pi).magnitude();
        return (a * a + b * b) * r;
    };
    auto simpson = [&](double lo, double hi, int n, double hi_eval) {
        double h = (hi - lo) / n;
        double acc = ring(lo) + ring(hi_eval);
        for (int i = 1; i < n; ++i) {
            acc += ring(lo + h * i) * ((i % 2) ? 4.0 : 2.0);
        }
        return acc * h / 3.0;
    };
    RadialIntegrals out;
    double a = mode.core_radius;
    double tail = a + 45.0 / mode.gamma;
    out.core = simpson(0.0, a, 4000, a * (1.0 - 1e-12));
    out.clad = simpson(a, tail, 6000, tail);
    return out;
}

}  // namespace

TEST_CASE("fundamental mode matches an exhaustive dispersion scan") {
    tpa::FiberSpec fiber = bench_fiber();
    double omega = omega_of(kLambda);
    double beta = tpa::solve_propagation_constant(fiber, omega);
    double scanned = scan_for_fundamental(fiber, omega, 200000);
    REQUIRE(scanned > 0.0);
    CHECK(beta == doctest::Approx(scanned).epsilon(1e-9));
}

TEST_CASE("propagation constant stays within the guided bound") {
    for (double d : {300e-9, 350e-9, 500e-9}) {
        for (double lambda : {770e-9, 790e-9}) {
            tpa::FiberSpec fiber = tpa::make_fiber(d, kLength, kCoreIndex);
            double omega = omega_of(lambda);
            double k0 = omega / c0;
            double beta = tpa::solve_propagation_constant(fiber, omega);
            CHECK(beta > fiber.cladding_index * k0);
            CHECK(beta < kCoreIndex * k0);
        }
    }
}

TEST_CASE("large-core limit approaches the bulk core medium") {
    tpa::FiberSpec fiber = tpa::make_fiber(20e-6, kLength, kCoreIndex);
    double omega = omega_of(kLambda);
    tpa::GuidedMode mode = tpa::normalize_mode(fiber, omega);
    double n_eff = mode.beta * c0 / omega;
    CHECK(std::abs(n_eff - kCoreIndex) / kCoreIndex < 5e-4);
    CHECK(std::abs(mode.group_velocity_u - c0 / kCoreIndex) /
              (c0 / kCoreIndex) <
          5e-3);
}

TEST_CASE("eigenvalue residual is tiny against the scan-cell scale") {
    for (double d : {300e-9, 350e-9, 400e-9, 500e-9}) {
        for (double lambda : {770e-9, 778e-9, 790e-9}) {
            tpa::FiberSpec fiber = tpa::make_fiber(d, kLength, kCoreIndex);
            double omega = omega_of(lambda);
            double k0 = omega / c0;
            double beta = tpa::solve_propagation_constant(fiber, omega);
            double h = (kCoreIndex - fiber.cladding_index) * k0 / 512.0;
            double res = std::abs(tpa::dispersion_function(fiber, omega, beta));
            double scale = std::max(
                std::abs(tpa::dispersion_function(fiber, omega, beta - h)),
                std::abs(tpa::dispersion_function(fiber, omega, beta + h)));
            CHECK(res < 1e-10 * scale);
        }
    }
}

TEST_CASE("field components match across the core boundary") {
    for (double d : {300e-9, 350e-9, 400e-9, 500e-9}) {
        for (double lambda : {770e-9, 778e-9, 790e-9}) {
            tpa::FiberSpec fiber = tpa::make_fiber(d, kLength, kCoreIndex);
            double omega = omega_of(lambda);
            double beta = tpa::solve_propagation_constant(fiber, omega);
            double a = fiber.core_radius();
            double phi = 0.9;
            tpa::FieldVector in =
                tpa::mode_field(fiber, omega, beta, a * (1.0 - 1e-8), phi);
            tpa::FieldVector out =
                tpa::mode_field(fiber, omega, beta, a * (1.0 + 1e-8), phi);
            double scale = out.magnitude();
            double n1sq = kCoreIndex * kCoreIndex;
            double n2sq = fiber.cladding_index * fiber.cladding_index;
            CHECK(std::abs(in.E_phi - out.E_phi) / scale < 1e-6);
            CHECK(std::abs(in.E_z - out.E_z) / scale < 1e-6);
            CHECK(std::abs(n1sq * in.E_r - n2sq * out.E_r) / (n2sq * scale) <
                  1e-6);
        }
    }
}

TEST_CASE("normalized profile keeps the boundary match") {
    tpa::GuidedMode mode = tpa::normalize_mode(bench_fiber(), omega_of(kLambda));
    double a = mode.core_radius;
    tpa::FieldVector in = mode.field_profile(a * (1.0 - 1e-8), 0.9);
    tpa::FieldVector out = mode.field_profile(a * (1.0 + 1e-8), 0.9);
    double scale = out.magnitude();
    CHECK(std::abs(in.E_phi - out.E_phi) / scale < 1e-6);
    CHECK(std::abs(in.E_z - out.E_z) / scale < 1e-6);
}

TEST_CASE("evanescent tail decays monotonically to zero") {
    tpa::GuidedMode mode = tpa::normalize_mode(bench_fiber(), omega_of(kLambda));
    double a = mode.core_radius;
    double prev = mode.field_profile(1.01 * a, 0.7).magnitude();
    CHECK(prev > 0.0);
    for (double x : {1.3, 1.8, 2.5, 4.0, 7.0, 11.0}) {
        double cur = mode.field_profile(x * a, 0.7).magnitude();
        CHECK(cur < prev);
        prev = cur;
    }
    double far = mode.field_profile(a + 30.0 / mode.gamma, 0.7).magnitude();
    double surf = mode.field_profile(a, 0.7).magnitude();
    CHECK(far < 1e-9 * surf);
}

TEST_CASE("dispersion function rejects unguided trial values") {
    tpa::FiberSpec fiber = bench_fiber();
    double omega = omega_of(kLambda);
    double k0 = omega / c0;
    CHECK_THROWS_AS(
        tpa::dispersion_function(fiber, omega, 1.0001 * kCoreIndex * k0),
        tpa::InvalidEigenvalue&);
    CHECK_THROWS_AS(tpa::dispersion_function(fiber, omega, 0.9999 * k0),
                    tpa::InvalidEigenvalue&);
}

TEST_CASE("one photon of electric energy in the quantization length") {
    tpa::GuidedMode mode = tpa::normalize_mode(bench_fiber(), omega_of(kLambda));
    RadialIntegrals ri = squared_field_integrals(mode);
    double n1sq = kCoreIndex * kCoreIndex;
    double energy = 0.5 * eps0 * kLength * pi * (n1sq * ri.core + ri.clad);
    CHECK(energy == doctest::Approx(0.5 * hbar * mode.omega).epsilon(1e-6));
}

TEST_CASE("energy fraction outside the core matches direct integration") {
    tpa::GuidedMode mode = tpa::normalize_mode(bench_fiber(), omega_of(kLambda));
    RadialIntegrals ri = squared_field_integrals(mode);
    double n1sq = kCoreIndex * kCoreIndex;
    double frac = ri.clad / (n1sq * ri.core + ri.clad);
    CHECK(mode.energy_fraction_outside == doctest::Approx(frac).epsilon(1e-6));
    CHECK(mode.energy_fraction_outside > 0.3);
    CHECK(mode.energy_fraction_outside < 0.9);
}

TEST_CASE("doubling the quantization length rescales the field") {
    double omega = omega_of(kLambda);
    tpa::GuidedMode one = tpa::normalize_mode(bench_fiber(), omega);
    tpa::GuidedMode two = tpa::normalize_mode(
        tpa::make_fiber(kDiameter, 2.0 * kLength, kCoreIndex), omega);
    CHECK(one.beta == doctest::Approx(two.beta).epsilon(1e-12));
    CHECK(one.norm_factor_Nbeta ==
          doctest::Approx(std::sqrt(2.0) * two.norm_factor_Nbeta).epsilon(1e-10));
    CHECK(one.energy_fraction_outside ==
          doctest::Approx(two.energy_fraction_outside).epsilon(1e-12));
}

TEST_CASE("group velocity obeys the guided-mode bounds") {
    tpa::FiberSpec fiber = bench_fiber();
    double omega = omega_of(kLambda);
    tpa::GuidedMode mode = tpa::normalize_mode(fiber, omega);
    double n_eff = mode.beta * c0 / omega;
    CHECK(mode.group_velocity_u > 0.0);
    CHECK(mode.group_velocity_u < c0);
    CHECK(mode.group_velocity_u < c0 / n_eff);
    CHECK(mode.group_velocity_u ==
          doctest::Approx(tpa::group_velocity(fiber, omega)).epsilon(1e-12));
}

TEST_CASE("propagation constant grows with frequency") {
    tpa::FiberSpec fiber = bench_fiber();
    double omega0 = omega_of(kLambda);
    double prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        double omega = omega0 * (0.9 + 0.2 * i / 19.0);
        double beta = tpa::solve_propagation_constant(fiber, omega);
        CHECK(beta > prev);
        prev = beta;
    }
}

TEST_CASE("single-mode condition flips with diameter") {
    double omega = omega_of(kLambda);
    CHECK(tpa::single_mode_check(bench_fiber(), omega));
    CHECK(tpa::single_mode_check(tpa::make_fiber(100e-9, kLength, kCoreIndex),
                                 omega));
    CHECK_FALSE(
        tpa::single_mode_check(tpa::make_fiber(2e-6, kLength, kCoreIndex), omega));
}
