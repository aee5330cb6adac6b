#pragma once

#include <complex>

namespace palzone {

/// Radius |z| at which the zeroth-order Bessel/Hankel routines switch from the
/// ascending power series to the Hankel asymptotic expansion. At this radius
/// the optimally truncated asymptotic series is accurate to ~1e-11 and the
/// power series loses about four digits to cancellation.
inline constexpr double kHankelSwitchRadius = 12.0;

/// Bessel function of the first kind, order zero, for real x >= 0.
/// Throws std::domain_error for negative or non-finite x.
double bessel_j0(double x);

/// Bessel function of the second kind, order zero, for real x > 0.
/// Throws std::domain_error for x <= 0 or non-finite x.
double bessel_y0(double x);

/// Hankel function of the first kind, order zero, H0(z) = J0(z) + i Y0(z),
/// on the closed upper half-plane minus the origin.
///
/// Complex arguments arise from absorbing media, where the wavenumber is
/// omega / c0 + i alpha. Throws std::domain_error for z == 0, Im(z) < 0 or
/// non-finite components.
std::complex<double> hankel1_0(std::complex<double> z);

namespace detail {

// Unchecked branch evaluators. Exposed so tests can probe the overlap window
// around kHankelSwitchRadius.
std::complex<double> hankel1_0_series(std::complex<double> z);
std::complex<double> hankel1_0_asymptotic(std::complex<double> z);

}  // namespace detail

}  // namespace palzone
