#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "palzone/field_solver.hpp"

namespace palzone {

/// Transfer data for the bright and dark control points of one array at one frequency.
struct ZonedTensor {
  TransferTensor bright;
  TransferTensor dark;

  ArrayKind kind() const { return bright.kind(); }
  std::size_t elements() const { return bright.elements(); }
};

inline constexpr double kContrastClampDb = 300.0;

/// 10 log10(E_bright / E_dark) with E the summed |p|^2 over each zone's control
/// points. Clamped to +/-kContrastClampDb when one energy vanishes; throws
/// std::domain_error when both do.
double acoustic_contrast(const ZonedTensor& tensor, const SourcePair& drives);

/// Zone energy sum_m |p_m|^2.
double zone_energy(const TransferTensor& zone, const SourcePair& drives);

enum class FixedVector { s1, s2 };

/// fix s1: sum_m H_m^H s1 s1^H H_m  (quadratic form in s2)
/// fix s2: sum_m H_m s2 s2^H H_m^H  (quadratic form in s1)
/// Throws std::invalid_argument for a zero fixed vector or an EDL tensor.
Eigen::MatrixXcd build_g_matrix(const TransferTensor& zone, const Eigen::VectorXcd& fixed, FixedVector which);

/// sum_m conj(h_m) h_m^T, so that s^H A s = sum_m |h_m^T s|^2.
Eigen::MatrixXcd edl_energy_matrix(const TransferTensor& zone);

struct EigenPairResult {
  double eigenvalue = 0.0;
  Eigen::VectorXcd eigenvector;  // unit norm, largest-magnitude entry real-positive
  double ridge = 0.0;            // ridge actually added to B
  bool degenerate = false;       // top two eigenvalues agree within 1e-12 relative
};

/// Maximiser of v^H A v / v^H (B + ridge I) v via Cholesky reduction and Jacobi.
/// Throws CholeskyError when B + ridge I is not positive definite.
EigenPairResult max_generalized_eigenpair(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double ridge);

/// As above with ridge = ridge_scale * trace(B) / N, escalated x10 up to three
/// times when the factorisation fails. Throws NumericalError after that.
EigenPairResult max_generalized_eigenpair_regularized(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                      double ridge_scale);

struct AccOptions {
  int n_itr = 200;
  std::uint64_t seed = 1;
  double ridge_scale = 1e-10;
  int multi_start = 1;
};

struct ContrastResult {
  SourcePair drives;
  double contrast_db = 0.0;
  std::vector<double> history;
  int iterations_run = 0;
  bool degenerate_eigenpair = false;
};

/// Alternating generalized-eigenvector ascent for a PAL array: starting from a
/// seeded random s1, each iteration sets s2 to the top eigenvector of the
/// (bright, dark) pair built with s1 fixed, then s1 likewise with s2 fixed.
/// history[i] is the contrast after iteration i + 1. With multi_start > 1 the
/// best final contrast over independent starts is returned.
ContrastResult acc_pal(const ZonedTensor& tensor, const AccOptions& options);

/// One-shot ACC for a linear array.
ContrastResult acc_edl(const ZonedTensor& tensor, double ridge_scale = 1e-10);

/// Seeded complex-Gaussian unit vector used to start acc_pal.
Eigen::VectorXcd random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream);

}  // namespace palzone
