#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "tpa/constants.hpp"
#include "tpa/dynamics_oracle.hpp"
#include "tpa/tpa_engine.hpp"

using cplx = std::complex<double>;
using tpa::constants::hbar;
using tpa::constants::pi;

namespace {

double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::abs(want);
}

double hermiticity_defect(const tpa::DensityMatrixState& st) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            worst = std::max(worst,
                             std::abs(st.rho[i][j] - std::conj(st.rho[j][i])));
        }
    }
    return worst;
}

double trace_re(const tpa::DensityMatrixState& st) {
    return (st.rho[0][0] + st.rho[1][1] + st.rho[2][2]).real();
}

}  // namespace

TEST_CASE("uncoupled amplitudes stay at rest") {
    tpa::LadderAmplitudeState st =
        tpa::integrate_amplitudes({0.0, 0.0}, {0.0, 0.0}, 3e11, 1e9, 1e9, 2e-8,
                                  1e-10);
    CHECK(std::abs(st.alpha1) == 0.0);
    CHECK(std::abs(st.alpha2) == 0.0);

    tpa::DensityMatrixState rho =
        tpa::evolve_density_matrix({0.0, 0.0}, {0.0, 0.0}, 3e11, 1e9, 1e9, 2e-8,
                                   1e-10);
    CHECK(std::abs(rho.rho[2][2] - 1.0) < 1e-14);
    CHECK(std::abs(rho.rho[0][0]) < 1e-14);
    CHECK(std::abs(rho.rho[1][0]) < 1e-14);
}

TEST_CASE("resonant intermediate amplitude saturates at the decay balance") {
    cplx m1{2e-26, 1.3e-26};
    cplx m2{1e-26, 0.0};
    double g1 = 1e9, g2 = 0.7e9;
    tpa::LadderAmplitudeState st =
        tpa::integrate_amplitudes(m1, m2, 0.0, g1, g2, 40.0 / g2, 1e-10);
    cplx want = cplx{0.0, -2.0} * std::conj(m1) / (hbar * g1);
    CHECK(rel_err(st.alpha2, want) < 1e-6);
}

TEST_CASE("detuned steady state matches the closed-form amplitudes") {
    cplx m1{5e-25, 2e-25};
    cplx m2{4e-25, -3e-25};
    double delta = 3e11, g1 = 1.3e9, g2 = 0.8e9;
    double tf = 40.0 / g2;
    tpa::LadderAmplitudeState st =
        tpa::integrate_amplitudes(m1, m2, delta, g1, g2, tf, 1e-10);

    tpa::AtomicLadder atom;
    atom.gamma1 = g1;
    atom.gamma2 = g2;
    cplx upper = tpa::amplitude_monochromatic(m1, m2, delta, atom);
    CHECK(rel_err(st.alpha1, upper) < 1e-6);

    cplx inter = cplx{0.0, -2.0} * std::conj(m1) /
                 (hbar * (cplx{g1, 0.0} - cplx{0.0, 2.0 * delta})) *
                 std::exp(cplx{0.0, -delta * st.t});
    CHECK(rel_err(st.alpha2, inter) < 1e-6);
}

TEST_CASE("steady state holds at large detuning") {
    cplx m1{2.3e-25, 0.9e-25};
    cplx m2{1.8e-25, -1.1e-25};
    double delta = 6.54e12, g1 = 1e9, g2 = 1e9;
    tpa::LadderAmplitudeState st =
        tpa::integrate_amplitudes(m1, m2, delta, g1, g2, 36.0 / g1, 1e-10);
    tpa::AtomicLadder atom;
    atom.gamma1 = g1;
    atom.gamma2 = g2;
    cplx upper = tpa::amplitude_monochromatic(m1, m2, delta, atom);
    CHECK(rel_err(st.alpha1, upper) < 1e-6);
}

TEST_CASE("step tolerance controls the integration error") {
    cplx m1{4e-25, 1e-25};
    cplx m2{3e-25, 2e-25};
    double delta = 5e11, g1 = 1e9, g2 = 1e9, tf = 36.0 / g1;
    cplx ref = tpa::integrate_amplitudes(m1, m2, delta, g1, g2, tf, 1e-12).alpha1;
    double dev_loose =
        rel_err(tpa::integrate_amplitudes(m1, m2, delta, g1, g2, tf, 1e-8).alpha1,
                ref);
    double dev_tight =
        rel_err(tpa::integrate_amplitudes(m1, m2, delta, g1, g2, tf, 1e-10).alpha1,
                ref);
    CHECK(dev_loose < 1e-4);
    CHECK(dev_tight < 1e-6);
    CHECK(dev_tight < dev_loose + 1e-9);
}

TEST_CASE("density matrix stays hermitian with bounded populations") {
    cplx m1{3e-26, -1e-26};
    cplx m2{2e-26, 2e-26};
    double delta = 4e11, g1 = 2e9, g2 = 1.5e9;
    tpa::DensityMatrixState st =
        tpa::evolve_density_matrix(m1, m2, delta, g1, g2, 20.0 / g2, 1e-10);
    CHECK(hermiticity_defect(st) < 1e-12);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(st.rho[i][i].imag()) < 1e-12);
        CHECK(st.rho[i][i].real() > -1e-12);
        CHECK(st.rho[i][i].real() < 1.0 + 1e-12);
    }
    CHECK(trace_re(st) < 1.0 + 1e-12);

    tpa::DensityMatrixState later =
        tpa::evolve_density_matrix(m1, m2, delta, g1, g2, 40.0 / g2, 1e-10);
    CHECK(trace_re(later) < trace_re(st) + 1e-12);
}

TEST_CASE("density matrix factorizes into amplitudes under weak driving") {
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < 8; ++k) {
        double delta = 3e11 + 3e11 * uni(rng);
        double g1 = 1e9 + 2e9 * uni(rng);
        double g2 = 1e9 + 2e9 * uni(rng);
        double mmag = 2e-28 + 3e-28 * uni(rng);
        cplx m1 = std::polar(mmag, 2.0 * pi * uni(rng));
        cplx m2 = std::polar(0.7 * mmag, 2.0 * pi * uni(rng));
        double tf = 25.0 / std::min(g1, g2);
        tpa::LadderAmplitudeState amps =
            tpa::integrate_amplitudes(m1, m2, delta, g1, g2, tf, 1e-10);
        tpa::DensityMatrixState rho =
            tpa::evolve_density_matrix(m1, m2, delta, g1, g2, tf, 1e-10);
        CHECK(tpa::check_factorization(rho, amps) < 1e-7);
    }
}

TEST_CASE("factorization is exact without driving") {
    tpa::LadderAmplitudeState amps =
        tpa::integrate_amplitudes({0.0, 0.0}, {0.0, 0.0}, 2e11, 1e9, 1e9, 1e-8,
                                  1e-10);
    tpa::DensityMatrixState rho =
        tpa::evolve_density_matrix({0.0, 0.0}, {0.0, 0.0}, 2e11, 1e9, 1e9, 1e-8,
                                   1e-10);
    CHECK(tpa::check_factorization(rho, amps) == 0.0);
}

TEST_CASE("upper amplitude settles once transients decay") {
    cplx m1{4e-25, 1e-25};
    cplx m2{3e-25, 2e-25};
    double delta = 3e11, g = 1e9;
    cplx early = tpa::integrate_amplitudes(m1, m2, delta, g, g, 30.0 / g,
                                           1e-10).alpha1;
    cplx late = tpa::integrate_amplitudes(m1, m2, delta, g, g, 36.0 / g,
                                          1e-10).alpha1;
    CHECK(std::abs(early - late) / std::abs(late) < 1e-5);
}
