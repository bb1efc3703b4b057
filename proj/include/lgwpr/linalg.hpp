#pragma once

#include <Eigen/Dense>
#include <optional>

namespace lgwpr::linalg {

/// Inverse of a symmetric positive semi-definite normal matrix, or nullopt
/// when it is numerically rank deficient: smallest singular value at or
/// below scale * eps * largest singular value. `scale` is the sample count
/// the matrix was accumulated over.
std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& normal,
                                           double scale);

/// Inverse of normal + ridge * I. With ridge > 0 the system is always
/// solvable; with ridge == 0 this is spd_inverse.
std::optional<Eigen::MatrixXd> ridge_inverse(const Eigen::MatrixXd& normal,
                                             double ridge, double scale);

/// Numerical rank with threshold rows * eps * largest singular value.
Eigen::Index rank(const Eigen::MatrixXd& a);

/// X' diag(c) X.
inline Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& c) {
  Eigen::MatrixXd cx = X.array().colwise() * c.array();
  return X.transpose() * cx;
}

}  // namespace lgwpr::linalg
