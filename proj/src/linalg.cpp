#include "lgwpr/linalg.hpp"

#include <cmath>
#include <limits>

namespace lgwpr::linalg {

namespace {
constexpr double eps = std::numeric_limits<double>::epsilon();

Eigen::MatrixXd inverse_from_eigen(
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
  const auto& v = es.eigenvectors();
  return v * es.eigenvalues().cwiseInverse().asDiagonal() * v.transpose();
}
}  // namespace

std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& normal,
                                           double scale) {
  if (!normal.allFinite()) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal);
  if (es.info() != Eigen::Success) return std::nullopt;
  const auto& ev = es.eigenvalues();  // ascending
  const double top = ev(ev.size() - 1);
  if (!(top > 0) || ev(0) <= std::max(scale, 1.0) * eps * top)
    return std::nullopt;
  return inverse_from_eigen(es);
}

std::optional<Eigen::MatrixXd> ridge_inverse(const Eigen::MatrixXd& normal,
                                             double ridge, double scale) {
  if (ridge == 0.0) return spd_inverse(normal, scale);
  if (!normal.allFinite()) return std::nullopt;
  Eigen::MatrixXd m = normal;
  m.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0))
    return std::nullopt;
  return inverse_from_eigen(es);
}

Eigen::Index rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0)) return 0;
  const double tol = static_cast<double>(a.rows()) * eps * s(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

}  // namespace lgwpr::linalg
