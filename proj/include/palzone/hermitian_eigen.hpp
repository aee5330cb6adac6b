#pragma once

#include <Eigen/Dense>

#include "palzone/core_model.hpp"

namespace palzone {

class CholeskyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Lower-triangular L with B = L L^H. Throws CholeskyError when B is not
/// numerically positive definite.
Eigen::MatrixXcd cholesky_lower(const Eigen::MatrixXcd& b);

struct HermitianEigen {
  Eigen::VectorXd values;   // unsorted, in Jacobi order
  Eigen::MatrixXcd vectors; // columns, orthonormal
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalisation of a Hermitian matrix, iterated until the
/// off-diagonal Frobenius norm is at most `tol` times the matrix norm.
HermitianEigen jacobi_eigen(const Eigen::MatrixXcd& a, double tol = 1e-12, int max_sweeps = 100);

}  // namespace palzone
