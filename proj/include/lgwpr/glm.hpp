#pragma once

#include <Eigen/Dense>

#include "lgwpr/dataset.hpp"
#include "lgwpr/error.hpp"

namespace lgwpr {

/// |x'beta| above this on the weighted support is treated as divergence.
/// Near the range of exp: well-posed fits on heavy-tailed counts reach
/// |x'beta| of 60 and more, while separation drifts further and also trips
/// the iteration cap.
inline constexpr double kOverflowGuard = 700.0;
/// Samples whose weight is below this fraction of the largest weight are
/// outside the support used by the divergence guard.
inline constexpr double kSupportFloor = 1e-10;

struct IrlsOptions {
  int max_iter = 100;
  double tol = 1e-8;
  /// Run check_identification first and refuse unidentifiable designs.
  bool check_identification = true;
};

struct GlmFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda;  // o_i exp(x_i' beta)
  /// (X' diag(w lambda) X)^{-1}, the unscaled coefficient covariance.
  Eigen::MatrixXd covariance;
  double dispersion = 1.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  /// Residual variance of the log-linear stage; only set by
  /// fit_poisson_linearized and not used downstream.
  double working_variance = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Transformed response of the log-linear approximation:
///   z_i = log((y_i + 0.5) / o_i) - (1 + 0.5 psi) / (y_i + 0.5)
/// with WLS weights y_i + 0.5.
struct LinearizedResponse {
  Eigen::VectorXd z;
  Eigen::VectorXd weights;
  double psi = 0.0;
};

/// Share of zero counts.
double zero_ratio(const Eigen::VectorXd& y);

IdentificationReport check_identification(const Dataset& data,
                                          const Eigen::VectorXd& weights = {});

/// Result of a weighted IRLS run from an arbitrary start; the engine shared by
/// the global and the local Poisson fits.
struct IrlsResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd normal_inverse;  // at the returned beta
  int iterations = 0;
  bool converged = false;
};

/// Iterates beta <- (X'ÂWX)^{-1} X'ÂW z until the max-norm step is below
/// tol. Throws SingularSystemError or DivergenceError. Does not run the
/// identification check.
IrlsResult weighted_irls(const Dataset& data, const Eigen::VectorXd& w,
                         Eigen::VectorXd beta, const IrlsOptions& options);

/// One Poisson scoring step from `beta`, with optional ridge:
///   (X'ÂWX + ridge I)^{-1} X'ÂW z,  z_j = x_j'beta + (y_j - λ_j)/λ_j.
Eigen::VectorXd irls_update(const Dataset& data, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& beta, double ridge = 0.0);

GlmFit fit_poisson_irls(const Dataset& data,
                        const Eigen::VectorXd& weights = {},
                        const IrlsOptions& options = {});

LinearizedResponse linearized_response(const Dataset& data, double psi);

/// Two-step estimator: WLS of z on X with weights y + 0.5 (psi = global
/// zero ratio), then a single scoring update from that solution.
GlmFit fit_poisson_linearized(const Dataset& data);

/// Pearson dispersion sum((y - λ)^2 / λ) / (n - n_enp).
double dispersion(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda,
                  double n_enp);

/// Â W z for the working response z = eta + (y - λ)/λ, evaluated as
/// λ w eta + w (y - λ) so that underflowed means stay finite.
inline Eigen::VectorXd scored_response(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& eta,
                                       const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& w) {
  return (w.array() * (lambda.array() * eta.array() + y.array() - lambda.array()))
      .matrix();
}

/// IRLS starting point: intercept log((mean y + 0.5) / mean o), slopes 0.
Eigen::VectorXd irls_start(const Dataset& data);

}  // namespace lgwpr
