#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "lgwpr/kernel.hpp"

namespace lgwpr {

/// One row of a geographically weighted fit.
struct LocalFit {
  Eigen::Index focal = 0;
  Eigen::VectorXd beta;
  Eigen::MatrixXd variance;
  /// Focal diagonal entry of the hat matrix mapping working responses to
  /// fitted linear predictors.
  double hat_diag = 0.0;
  bool converged = true;
  /// o_i exp(x_i' beta_i).
  double lambda = 0.0;
};

/// One evaluated candidate of a bandwidth (and ridge) search.
struct TraceEntry {
  double bandwidth = 0.0;
  double delta = 0.0;
  double criterion = 0.0;  // +inf when infeasible
  double n_enp = std::numeric_limits<double>::quiet_NaN();
  double deviance = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  std::string note;
};

struct ModelFit {
  std::string tag;
  KernelSpec kernel;
  /// True for the non-geographic model: `locals` then holds a single row.
  bool global = false;
  std::vector<LocalFit> locals;
  double bandwidth = std::numeric_limits<double>::quiet_NaN();
  double delta = 0.0;
  bool quasi = false;
  double dispersion = std::numeric_limits<double>::quiet_NaN();
  double n_enp = 0.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  double pseudo_r2 = 0.0;
  /// "AICc", "squared_error", "deviance", or empty when nothing was searched.
  std::string criterion;
  std::vector<TraceEntry> trace;
  double seconds = 0.0;
  Eigen::Index sample_count = 0;
  /// Focal points whose local zero ratio fell back to the global one.
  std::size_t psi_fallbacks = 0;

  /// rows x p coefficient matrix, one row per LocalFit.
  Eigen::MatrixXd coefficients() const;
  /// Per-sample coefficient rows; a global fit is broadcast to n rows.
  Eigen::MatrixXd coefficients_per_sample() const;
};

}  // namespace lgwpr
