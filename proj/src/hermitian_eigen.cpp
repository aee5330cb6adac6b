#include "palzone/hermitian_eigen.hpp"

#include <cmath>
#include <complex>

namespace palzone {

using cd = std::complex<double>;

Eigen::MatrixXcd cholesky_lower(const Eigen::MatrixXcd& b) {
  const Eigen::Index n = b.rows();
  if (b.cols() != n) throw std::invalid_argument("cholesky_lower: matrix must be square");
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = b(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0) || !std::isfinite(diag)) throw CholeskyError("cholesky_lower: matrix is not positive definite");
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cd acc = b(i, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  return l;
}

HermitianEigen jacobi_eigen(const Eigen::MatrixXcd& input, double tol, int max_sweeps) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  Eigen::MatrixXcd a = 0.5 * (input + input.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = a.norm();
  HermitianEigen out;

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  while (sweep < max_sweeps && off_norm() > tol * scale) {
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cd apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Phase-rotate q so the pivot is real, then apply a real symmetric Jacobi rotation.
        const cd phase = apq / mag;  // e^{i phi}
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q); A <- G^H A G.
        const cd gpp = c;
        const cd gpq = s;
        const cd gqp = -s * std::conj(phase);
        const cd gqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd akp = a(k, p);
          const cd akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const cd vkp = v(k, p);
          const cd vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd apk = a(p, k);
          const cd aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }
  if (off_norm() > tol * scale) throw NumericalError("jacobi_eigen: no convergence within the sweep limit");

  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = a(i, i).real();
  out.vectors = std::move(v);
  out.sweeps = sweep;
  return out;
}

}  // namespace palzone
