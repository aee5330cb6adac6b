#include "palzone/acc_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "palzone/counter_rng.hpp"
#include "palzone/hermitian_eigen.hpp"

namespace palzone {

namespace {

using cd = std::complex<double>;

constexpr int kRidgeRetries = 3;
constexpr double kDegenerateRel = 1e-12;
constexpr std::uint64_t kInitStream = 0x5A11;

void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  const double mag = std::abs(v[best]);
  if (mag > 0.0) v *= std::conj(v[best]) / mag;
  v[best] = std::abs(v[best]);
}

}  // namespace

double zone_energy(const TransferTensor& zone, const SourcePair& drives) {
  double e = 0.0;
  for (std::size_t m = 0; m < zone.points(); ++m) e += std::norm(audio_pressure(zone, drives, m));
  return e;
}

double acoustic_contrast(const ZonedTensor& tensor, const SourcePair& drives) {
  const double eb = zone_energy(tensor.bright, drives);
  const double ed = zone_energy(tensor.dark, drives);
  if (eb == 0.0 && ed == 0.0) throw std::domain_error("acoustic_contrast: both zone energies are zero");
  if (ed == 0.0) return kContrastClampDb;
  if (eb == 0.0) return -kContrastClampDb;
  return std::clamp(10.0 * std::log10(eb / ed), -kContrastClampDb, kContrastClampDb);
}

Eigen::MatrixXcd build_g_matrix(const TransferTensor& zone, const Eigen::VectorXcd& fixed, FixedVector which) {
  if (zone.kind() != ArrayKind::pal) throw std::invalid_argument("build_g_matrix: PAL tensor required");
  const auto n = static_cast<Eigen::Index>(zone.elements());
  if (fixed.size() != n) throw std::invalid_argument("build_g_matrix: fixed vector length mismatch");
  if (fixed.squaredNorm() == 0.0) throw std::invalid_argument("build_g_matrix: fixed vector is zero");
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd u(n);
  for (const auto& h : zone.matrices()) {
    if (which == FixedVector::s1)
      u.noalias() = h.adjoint() * fixed;
    else
      u.noalias() = h * fixed;
    g.selfadjointView<Eigen::Lower>().rankUpdate(u);
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.adjoint();
  return g;
}

Eigen::MatrixXcd edl_energy_matrix(const TransferTensor& zone) {
  if (zone.kind() != ArrayKind::edl) throw std::invalid_argument("edl_energy_matrix: EDL tensor required");
  const Eigen::MatrixXcd& h = zone.rows();
  // Rows of H are h_m^T, so (H^H H)_ij = sum_m conj(h_mi) h_mj.
  Eigen::MatrixXcd a = h.adjoint() * h;
  return 0.5 * (a + a.adjoint());
}

EigenPairResult max_generalized_eigenpair(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double ridge) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw std::invalid_argument("max_generalized_eigenpair: A and B must be square and equally sized");
  if (!(ridge >= 0.0)) throw std::invalid_argument("max_generalized_eigenpair: ridge must be >= 0");

  Eigen::MatrixXcd breg = 0.5 * (b + b.adjoint());
  breg.diagonal().array() += ridge;
  const Eigen::MatrixXcd l = cholesky_lower(breg);
  const auto lower = l.triangularView<Eigen::Lower>();

  // C = L^{-1} A L^{-H}
  Eigen::MatrixXcd x = lower.solve(0.5 * (a + a.adjoint()));
  Eigen::MatrixXcd c = lower.solve(x.adjoint());
  c = 0.5 * (c + c.adjoint()).eval();

  const HermitianEigen eig = jacobi_eigen(c);
  double top = eig.values.maxCoeff();
  const double tol = kDegenerateRel * std::max(std::abs(top), std::numeric_limits<double>::min());
  Eigen::Index pick = -1;
  int near_top = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] >= top - tol) {
      ++near_top;
      if (pick < 0) pick = i;
    }

  EigenPairResult r;
  r.ridge = ridge;
  r.degenerate = near_top > 1;
  r.eigenvalue = eig.values[pick];
  Eigen::VectorXcd v = l.adjoint().triangularView<Eigen::Upper>().solve(eig.vectors.col(pick));
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("max_generalized_eigenpair: degenerate eigenvector");
  v /= norm;
  fix_phase(v);
  r.eigenvector = std::move(v);
  return r;
}

EigenPairResult max_generalized_eigenpair_regularized(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                      double ridge_scale) {
  const double n = static_cast<double>(b.rows());
  double base = b.trace().real() / n;
  if (!(base > 0.0)) base = a.trace().real() / n;
  if (!(base > 0.0)) throw NumericalError("max_generalized_eigenpair: both matrices vanish");
  double ridge = ridge_scale * base;
  for (int attempt = 0;; ++attempt) {
    try {
      return max_generalized_eigenpair(a, b, ridge);
    } catch (const CholeskyError&) {
      if (attempt >= kRidgeRetries) throw NumericalError("max_generalized_eigenpair: factorisation failed after ridge escalation");
      ridge = ridge > 0.0 ? ridge * 10.0 : 1e-16 * base;
    }
  }
}

Eigen::VectorXcd random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = rng.complex_normal(i);
  return v / v.norm();
}

namespace {

ContrastResult acc_pal_single(const ZonedTensor& tensor, const AccOptions& options, std::uint64_t start) {
  const std::size_t n = tensor.elements();
  ContrastResult result;
  Eigen::VectorXcd s1 = random_unit_vector(n, options.seed, kInitStream + start);
  Eigen::VectorXcd s2;
  result.history.reserve(static_cast<std::size_t>(options.n_itr));
  for (int it = 0; it < options.n_itr; ++it) {
    const auto half2 = max_generalized_eigenpair_regularized(build_g_matrix(tensor.bright, s1, FixedVector::s1),
                                                             build_g_matrix(tensor.dark, s1, FixedVector::s1),
                                                             options.ridge_scale);
    s2 = half2.eigenvector;
    const auto half1 = max_generalized_eigenpair_regularized(build_g_matrix(tensor.bright, s2, FixedVector::s2),
                                                             build_g_matrix(tensor.dark, s2, FixedVector::s2),
                                                             options.ridge_scale);
    s1 = half1.eigenvector;
    result.degenerate_eigenpair = result.degenerate_eigenpair || half1.degenerate || half2.degenerate;
    result.history.push_back(acoustic_contrast(tensor, SourcePair::pal(s1, s2)));
  }
  s1.normalize();
  s2.normalize();
  result.drives = SourcePair::pal(std::move(s1), std::move(s2));
  result.iterations_run = options.n_itr;
  result.contrast_db = result.history.back();
  return result;
}

}  // namespace

ContrastResult acc_pal(const ZonedTensor& tensor, const AccOptions& options) {
  if (tensor.bright.kind() != ArrayKind::pal || tensor.dark.kind() != ArrayKind::pal)
    throw std::invalid_argument("acc_pal: PAL tensors required");
  if (options.n_itr < 1) throw std::invalid_argument("acc_pal: n_itr must be >= 1");
  if (options.multi_start < 1) throw std::invalid_argument("acc_pal: multi_start must be >= 1");
  if (tensor.bright.elements() != tensor.dark.elements())
    throw std::invalid_argument("acc_pal: bright and dark tensors disagree on element count");
  ContrastResult best = acc_pal_single(tensor, options, 0);
  for (int s = 1; s < options.multi_start; ++s) {
    ContrastResult r = acc_pal_single(tensor, options, static_cast<std::uint64_t>(s));
    if (r.contrast_db > best.contrast_db) best = std::move(r);
  }
  return best;
}

ContrastResult acc_edl(const ZonedTensor& tensor, double ridge_scale) {
  if (tensor.bright.kind() != ArrayKind::edl || tensor.dark.kind() != ArrayKind::edl)
    throw std::invalid_argument("acc_edl: EDL tensors required");
  const auto pair = max_generalized_eigenpair_regularized(edl_energy_matrix(tensor.bright),
                                                          edl_energy_matrix(tensor.dark), ridge_scale);
  ContrastResult r;
  r.drives = SourcePair::edl(pair.eigenvector);
  r.contrast_db = acoustic_contrast(tensor, r.drives);
  r.history = {r.contrast_db};
  r.iterations_run = 1;
  r.degenerate_eigenpair = pair.degenerate;
  return r;
}

}  // namespace palzone
