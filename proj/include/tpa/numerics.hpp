#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace tpa::numerics {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct ScalarMaximum {
    double x = 0.0;
    double value = 0.0;
};

// Imaginary error function erf(iz)/i of a complex argument.
// Relative accuracy ~1e-10 for |z| <= 10 and ~1e-8 for 10 < |z| <= 50;
// throws AccuracyDomainExceeded for |z| > 50. Real arguments return an
// exactly real result. Values beyond double range come back as infinity.
std::complex<double> erfi_complex(std::complex<double> z);

// Scaled complementary error function w(z) = exp(-z^2) erfc(-iz).
// Accurate in the closed upper half-plane; the lower half-plane is reached
// through the reflection formula and may overflow for large |Im z|.
std::complex<double> faddeeva_w(std::complex<double> z);

// Adaptive Gauss-Kronrod quadrature on [lo, hi]. Throws NonConvergence if
// the subdivision budget is exhausted before the error estimate meets
// rel_tol relative to the integral value.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lo, double hi,
                                    double rel_tol = 1e-8,
                                    unsigned max_depth = 15);

// Iterated adaptive quadrature over the product domain
// [x_lo, x_hi] x [y_lo, y_hi].
QuadratureResult integrate_adaptive_2d(const std::function<double(double, double)>& f,
                                       double x_lo, double x_hi,
                                       double y_lo, double y_hi,
                                       double rel_tol = 1e-8);

// Bracketed root refinement, bisection interleaved with secant steps.
// Requires f(lo) and f(hi) to differ in sign.
double find_root_bracketed(const std::function<double(double)>& f,
                           double lo, double hi,
                           double rel_tol = 1e-12,
                           int max_iter = 200);

// Golden-section search with a final parabolic refinement on a unimodal
// bracket; returns the argmax and the value there.
ScalarMaximum maximize_scalar(const std::function<double(double)>& f,
                              double lo, double hi, double x_tol);

// Central difference with one Richardson extrapolation level (steps h, h/2).
double differentiate_central(const std::function<double(double)>& f,
                             double x, double h);

}  // namespace tpa::numerics
