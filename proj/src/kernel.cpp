#include "lgwpr/kernel.hpp"

#include <cmath>
#include <limits>

#include "lgwpr/error.hpp"

namespace lgwpr {

void KernelSpec::check() const {
  if (!(bandwidth > 0) || !std::isfinite(bandwidth))
    throw InvalidArgument("bandwidth must be positive and finite");
}

double KernelSpec::weight(double d) const {
  const double u = d / bandwidth;
  switch (family) {
    case KernelFamily::gaussian:
      // exp underflows to exactly 0 here; skipping its slow path
      return u * u > 746.0 ? 0.0 : std::exp(-u * u);
    case KernelFamily::bisquare:
      if (u >= 1.0) return 0.0;
      if (literal_bisquare) return (1.0 - u) * (1.0 - u);
      return (1.0 - u * u) * (1.0 - u * u);
  }
  return 0.0;
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "bisquare";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "bisquare") return KernelFamily::bisquare;
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

Eigen::MatrixXd distance_matrix(const Eigen::MatrixX2d& coords) {
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::hypot(coords(i, 0) - coords(j, 0),
                                  coords(i, 1) - coords(j, 1));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::VectorXd weights(const KernelSpec& spec,
                        const Eigen::Ref<const Eigen::VectorXd>& distances,
                        Eigen::Index focal, bool exclude_self) {
  spec.check();
  Eigen::VectorXd w(distances.size());
  for (Eigen::Index j = 0; j < distances.size(); ++j)
    w(j) = spec.weight(distances(j));
  if (exclude_self) w(focal) = 0.0;
  return w;
}

double effective_bandwidth(const KernelSpec& spec) {
  spec.check();
  if (spec.family == KernelFamily::bisquare) return spec.bandwidth;
  return std::sqrt(3.0) * spec.bandwidth;
}

double data_diameter(const Eigen::MatrixXd& distances) {
  return distances.size() == 0 ? 0.0 : distances.maxCoeff();
}

double min_nonzero_distance(const Eigen::MatrixXd& distances) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < distances.cols(); ++j)
    for (Eigen::Index i = j + 1; i < distances.rows(); ++i)
      if (distances(i, j) > 0 && distances(i, j) < best) best = distances(i, j);
  return std::isinf(best) ? 0.0 : best;
}

Geometry Geometry::of(const Eigen::MatrixX2d& coords) {
  Geometry g;
  g.distances = distance_matrix(coords);
  g.diameter = data_diameter(g.distances);
  g.min_nonzero = min_nonzero_distance(g.distances);
  return g;
}

}  // namespace lgwpr
