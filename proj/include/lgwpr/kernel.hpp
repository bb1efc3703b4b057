#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace lgwpr {

enum class KernelFamily { gaussian, bisquare };

/// Geographic weighting kernel.
///
///   gaussian:  w = exp(-(d/b)^2)
///   bisquare:  w = (1 - (d/b)^2)^2 for d < b, else 0
///
/// `literal_bisquare` switches the bisquare to the contracted form
/// (1 - d/b)^2.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double bandwidth = 1.0;
  bool literal_bisquare = false;

  /// Throws InvalidArgument unless bandwidth > 0 and finite.
  void check() const;
  double weight(double distance) const;
};

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Dense symmetric Euclidean distance matrix.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixX2d& coords);

/// Weights of one focal row. With exclude_self the entry at `focal` is zero.
Eigen::VectorXd weights(const KernelSpec& spec,
                        const Eigen::Ref<const Eigen::VectorXd>& distances,
                        Eigen::Index focal, bool exclude_self = false);

/// Radius carrying ~95% of the kernel mass: sqrt(3) b for gaussian, where
/// exp(-3) < 0.05. The bisquare has compact support and returns b.
double effective_bandwidth(const KernelSpec& spec);

/// Largest pairwise distance.
double data_diameter(const Eigen::MatrixXd& distances);
/// Smallest strictly positive pairwise distance (0 if all points coincide).
double min_nonzero_distance(const Eigen::MatrixXd& distances);

/// Distance matrix plus the summaries bandwidth searches need.
struct Geometry {
  Eigen::MatrixXd distances;
  double diameter = 0.0;
  double min_nonzero = 0.0;

  static Geometry of(const Eigen::MatrixX2d& coords);
};

}  // namespace lgwpr
