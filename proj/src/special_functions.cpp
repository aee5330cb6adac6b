#include "palzone/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace palzone {

namespace {

using cd = std::complex<double>;

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

bool finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

namespace detail {

// J0(z)  = sum_k (-z^2/4)^k / (k!)^2
// Y0(z)  = (2/pi) [ln(z/2) + gamma] J0(z) + (2/pi) sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2
// with H_k the k-th harmonic number.
cd hankel1_0_series(cd z) {
  const cd q = 0.25 * z * z;
  cd term = 1.0;  // (-q)^k / (k!)^2
  cd j0 = 1.0;
  cd tail = 0.0;  // sum_{k>=1} H_k (-q)^k / (k!)^2, sign folded in below
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    harmonic += 1.0 / k;
    j0 += term;
    tail += harmonic * term;
    if (std::abs(term) * harmonic < 1e-17 * std::abs(j0) && std::abs(term) < 1e-17) break;
  }
  // (-1)^{k+1} q^k = -(-q)^k
  const cd y0 = (2.0 / std::numbers::pi) * ((std::log(0.5 * z) + kEulerGamma) * j0 - tail);
  return j0 + cd(0.0, 1.0) * y0;
}

// H0(z) ~ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k i^k a_k / z^k,
// a_k = (-1)^k [1^2 3^2 ... (2k-1)^2] / (k! 8^k). Truncated at the smallest term.
cd hankel1_0_asymptotic(cd z) {
  const cd iz = cd(0.0, 1.0) / z;
  cd term = 1.0;
  cd sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -iz * (odd * odd) / (8.0 * k);
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag < 1e-17) break;
  }
  const cd phase = std::exp(cd(0.0, 1.0) * (z - 0.25 * std::numbers::pi));
  return std::sqrt(2.0 / (std::numbers::pi * z)) * phase * sum;
}

}  // namespace detail

cd hankel1_0(cd z) {
  if (!finite(z)) throw std::domain_error("hankel1_0: non-finite argument");
  if (z.imag() < 0.0) throw std::domain_error("hankel1_0: Im(z) < 0 is outside the supported half-plane");
  if (z == cd(0.0, 0.0)) throw std::domain_error("hankel1_0: singular at z = 0");
  return std::abs(z) <= kHankelSwitchRadius ? detail::hankel1_0_series(z) : detail::hankel1_0_asymptotic(z);
}

double bessel_j0(double x) {
  if (!std::isfinite(x) || x < 0.0) throw std::domain_error("bessel_j0: argument must be finite and >= 0");
  if (x == 0.0) return 1.0;
  return hankel1_0(cd(x, 0.0)).real();
}

double bessel_y0(double x) {
  if (!std::isfinite(x) || x <= 0.0) throw std::domain_error("bessel_y0: argument must be finite and > 0");
  return hankel1_0(cd(x, 0.0)).imag();
}

}  // namespace palzone
