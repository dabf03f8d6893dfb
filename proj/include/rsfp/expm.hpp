#pragma once

#include <Eigen/Dense>

namespace rsfp {

/// exp(A) by scaling and squaring with the degree-13 Pade approximant.
/// Throws NumericalError if the result is not finite.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A);

/// exp(A t) through an eigendecomposition when A is diagonalizable with an
/// eigenvector condition number below `max_condition`; falls back to expm
/// otherwise.
Eigen::MatrixXd expm_eigen(const Eigen::MatrixXd& A, double t, double max_condition = 1e6);

}  // namespace rsfp
