#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr {

/// 2 [y log(y/λ) - (y - λ)], with y log(y/λ) = 0 at y = 0.
double deviance_term(double y, double lambda);

/// Poisson residual deviance, summed in index order.
double deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda);

/// Deviance of the intercept-only Poisson fit with offsets retained, whose
/// closed form is λ_i = o_i sum(y) / sum(o).
double null_deviance(const Dataset& data);

/// McFadden pseudo-R², 1 - D/D0. Throws DegenerateNullError when D0 == 0.
double pseudo_r2(double deviance, double null_deviance);

double normal_cdf(double z);
/// P(|Z| >= |z|) for standard normal Z.
double two_sided_p(double z);

struct SignificanceTable {
  double alpha = 0.05;
  double corrected_alpha = 0.05;
  double n_enp = 0.0;
  std::string method;
  /// rows = local fits, cols = coefficients.
  Eigen::MatrixXd se;
  Eigen::MatrixXd z;
  Eigen::MatrixXd p;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> significant;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;
};

/// z-tests on every local coefficient. The threshold is adjusted for the
/// effective number of tests, alpha* = alpha (k+1) / n_enp, then clamped to
/// [alpha / n, alpha].
SignificanceTable significance(const ModelFit& fit, double alpha = 0.05);

/// R type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double prob);

struct CoefficientSummary {
  /// p x 5: min, Q1, median, Q3, max of each coefficient across locations.
  Eigen::MatrixXd table;
};

CoefficientSummary coefficient_summary(const ModelFit& fit);

}  // namespace lgwpr
