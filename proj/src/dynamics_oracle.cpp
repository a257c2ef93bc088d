#include "tpa/dynamics_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "tpa/constants.hpp"
#include "tpa/errors.hpp"

namespace tpa {

namespace {

using cplx = std::complex<double>;

constexpr cplx kImag{0.0, 1.0};

// Cash-Karp embedded Runge-Kutta 4(5) tableau.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 3.0 / 5.0,
                 kC5 = 1.0, kC6 = 7.0 / 8.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 3.0 / 10.0, kA42 = -9.0 / 10.0, kA43 = 6.0 / 5.0;
constexpr double kA51 = -11.0 / 54.0, kA52 = 5.0 / 2.0, kA53 = -70.0 / 27.0,
                 kA54 = 35.0 / 27.0;
constexpr double kA61 = 1631.0 / 55296.0, kA62 = 175.0 / 512.0,
                 kA63 = 575.0 / 13824.0, kA64 = 44275.0 / 110592.0,
                 kA65 = 253.0 / 4096.0;
constexpr double kB1 = 37.0 / 378.0, kB3 = 250.0 / 621.0,
                 kB4 = 125.0 / 594.0, kB6 = 512.0 / 1771.0;
constexpr double kE1 = kB1 - 2825.0 / 27648.0, kE3 = kB3 - 18575.0 / 48384.0,
                 kE4 = kB4 - 13525.0 / 55296.0, kE5 = -277.0 / 14336.0,
                 kE6 = kB6 - 1.0 / 4.0;

template <std::size_t N>
using State = std::array<cplx, N>;

template <std::size_t N, typename Rhs>
State<N> rhs_at(const Rhs& rhs, double t, const State<N>& y) {
    State<N> dy{};
    rhs(t, y, dy);
    return dy;
}

template <std::size_t N>
State<N> axpy(const State<N>& y, double dt,
              std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [coeff, k] : terms) {
        for (std::size_t i = 0; i < N; ++i) {
            out[i] += dt * coeff * (*k)[i];
        }
    }
    return out;
}

// Advance y from t = 0 to t_final with step-doubling error control. The local
// tolerance dt_tol is applied per component, mixed absolute and relative.
template <std::size_t N, typename Rhs>
State<N> integrate_rk45(const Rhs& rhs, State<N> y, double t_final,
                        double dt_tol, double rate_scale) {
    if (t_final <= 0.0) {
        return y;
    }
    double t = 0.0;
    double dt = std::min(t_final, 0.1 / rate_scale);
    const double dt_floor = t_final * 1e-15;
    std::size_t steps = 0;

    while (t < t_final) {
        if (++steps > 50'000'000) {
            throw StepFailure("step budget exhausted before reaching t_final");
        }
        dt = std::min(dt, t_final - t);
        if (dt < dt_floor) {
            throw StepFailure("step size underflow in adaptive integration");
        }

        const State<N> k1 = rhs_at(rhs, t, y);
        const State<N> k2 =
            rhs_at(rhs, t + kC2 * dt, axpy(y, dt, {{kA21, &k1}}));
        const State<N> k3 =
            rhs_at(rhs, t + kC3 * dt, axpy(y, dt, {{kA31, &k1}, {kA32, &k2}}));
        const State<N> k4 = rhs_at(
            rhs, t + kC4 * dt,
            axpy(y, dt, {{kA41, &k1}, {kA42, &k2}, {kA43, &k3}}));
        const State<N> k5 = rhs_at(
            rhs, t + kC5 * dt,
            axpy(y, dt, {{kA51, &k1}, {kA52, &k2}, {kA53, &k3}, {kA54, &k4}}));
        const State<N> k6 =
            rhs_at(rhs, t + kC6 * dt,
                   axpy(y, dt,
                        {{kA61, &k1},
                         {kA62, &k2},
                         {kA63, &k3},
                         {kA64, &k4},
                         {kA65, &k5}}));

        double err_ratio = 0.0;
        State<N> y_next = y;
        for (std::size_t i = 0; i < N; ++i) {
            const cplx advance = kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                                 kB6 * k6[i];
            const cplx err = kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                             kE5 * k5[i] + kE6 * k6[i];
            y_next[i] += dt * advance;
            const double scale =
                dt_tol + dt_tol * std::max(std::abs(y[i]), std::abs(y_next[i]));
            err_ratio = std::max(err_ratio, std::abs(dt * err) / scale);
        }

        if (err_ratio <= 1.0) {
            t += dt;
            y = y_next;
        }
        const double grow =
            0.9 * std::pow(std::max(err_ratio, 1e-12), -0.2);
        dt *= std::clamp(grow, 0.2, 5.0);
    }
    return y;
}

}  // namespace

LadderAmplitudeState integrate_amplitudes(cplx m1, cplx m2, double delta,
                                          double gamma1, double gamma2,
                                          double t_final, double dt_tol) {
    const cplx m1c = std::conj(m1);
    const cplx m2c = std::conj(m2);
    const auto rhs = [&](double t, const State<2>& y, State<2>& dy) {
        const cplx up = std::exp(kImag * (delta * t));
        dy[0] = m2c * up * y[1] / (kImag * constants::hbar) -
                0.5 * gamma2 * y[0];
        dy[1] = m1c * std::conj(up) / (kImag * constants::hbar) -
                0.5 * gamma1 * y[1];
    };
    const double rate_scale = std::abs(delta) + gamma1 + gamma2 +
                              (std::abs(m1) + std::abs(m2)) / constants::hbar +
                              1.0 / t_final;
    const State<2> y =
        integrate_rk45<2>(rhs, State<2>{}, t_final, dt_tol, rate_scale);
    return LadderAmplitudeState{y[0], y[1], t_final};
}

DensityMatrixState evolve_density_matrix(cplx m1, cplx m2, double delta,
                                         double gamma1, double gamma2,
                                         double t_final, double dt_tol) {
    const cplx m1c = std::conj(m1);
    const cplx m2c = std::conj(m2);
    const std::array<double, 3> decay{gamma2, gamma1, 0.0};

    const auto rhs = [&](double t, const State<9>& y, State<9>& dy) {
        const cplx v12 = m2c * std::exp(kImag * (delta * t));
        const cplx v23 = m1c * std::exp(-kImag * (delta * t));

        std::array<std::array<cplx, 3>, 3> v{};
        v[0][1] = v12;
        v[1][0] = std::conj(v12);
        v[1][2] = v23;
        v[2][1] = std::conj(v23);

        const auto rho = [&y](int i, int j) { return y[3 * i + j]; };
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                cplx comm{0.0, 0.0};
                for (int k = 0; k < 3; ++k) {
                    comm += v[i][k] * rho(k, j) - rho(i, k) * v[k][j];
                }
                dy[3 * i + j] =
                    -kImag / constants::hbar * comm -
                    0.5 * (decay[static_cast<std::size_t>(i)] +
                           decay[static_cast<std::size_t>(j)]) *
                        rho(i, j);
            }
        }
    };

    State<9> y{};
    y[8] = 1.0;  // pure ground state
    const double rate_scale = std::abs(delta) + gamma1 + gamma2 +
                              (std::abs(m1) + std::abs(m2)) / constants::hbar +
                              1.0 / t_final;
    y = integrate_rk45<9>(rhs, y, t_final, dt_tol, rate_scale);

    DensityMatrixState out;
    out.t = t_final;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                y[static_cast<std::size_t>(3 * i + j)];
        }
    }
    return out;
}

double check_factorization(const DensityMatrixState& rho,
                           const LadderAmplitudeState& amps) {
    const std::array<cplx, 3> c{amps.alpha1, amps.alpha2, cplx{1.0, 0.0}};
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            worst = std::max(worst,
                             std::abs(rho.rho[i][j] - c[i] * std::conj(c[j])));
        }
    }
    return worst;
}

}  // namespace tpa
