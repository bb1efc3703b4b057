#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr {

/// Per-location coefficients as written by write_fit.
///
/// Columns: id, cx, cy, then beta_<name>, se_<name>, z_<name> for every
/// coefficient, then pflag. pflag holds one character per coefficient, 'T'
/// when the coefficient is significant at the corrected level. A global fit
/// writes one row with id "global" and NA coordinates.
struct FitTable {
  std::vector<std::string> ids;
  Eigen::MatrixX2d coords;
  std::vector<std::string> names;
  Eigen::MatrixXd beta;
  Eigen::MatrixXd se;
  Eigen::MatrixXd z;
  std::vector<std::string> pflag;
};

/// Values are written with 10 significant digits.
void write_fit(const ModelFit& fit, const Dataset& data,
               const SignificanceTable& sig, const std::filesystem::path& path);
FitTable read_fit(const std::filesystem::path& path);

/// One-row global summary: model, kernel, bandwidth, delta, dispersion,
/// n_enp, deviance, null_deviance, pseudo_r2, criterion, n, standardized,
/// quasi, psi_fallbacks, corrected_alpha, seconds.
void write_summary(const ModelFit& fit, const Dataset& data,
                   const SignificanceTable& sig,
                   const std::filesystem::path& path);

/// Long format: id, coefficient, estimate, se, z, p, alpha, corrected_alpha,
/// significant, degenerate, method.
void write_significance(const ModelFit& fit, const Dataset& data,
                        const SignificanceTable& sig,
                        const std::filesystem::path& path);

/// One row per coefficient: min, q1, median, q3, max.
void write_coefficient_summary(const ModelFit& fit, const Dataset& data,
                               const std::filesystem::path& path);

/// delta, bandwidth, criterion, feasible, n_enp, deviance, note.
void write_trace(const ModelFit& fit, const std::filesystem::path& path);

}  // namespace lgwpr
