#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/glm.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr {

enum class BandwidthSearch {
  /// AICc at every candidate of `bandwidth_grid`.
  grid,
  /// Log-spaced scan plus golden-section refinement of AICc over the same
  /// bracket the LOOCV search uses.
  golden,
};

struct GwprOptions {
  KernelFamily family = KernelFamily::gaussian;
  bool literal_bisquare = false;
  /// Candidate bandwidths; empty means default_bandwidth_grid().
  std::vector<double> bandwidth_grid;
  BandwidthSearch search = BandwidthSearch::grid;
  /// Golden-section bracket and tolerance; 0 selects the defaults
  /// (0.5 x min nonzero distance, diameter, 1e-3 x diameter).
  double search_lo = 0.0;
  double search_hi = 0.0;
  double search_tol = 0.0;
  /// Quasi-Poisson: scale variances by the Pearson dispersion.
  bool quasi = false;
  IrlsOptions irls;
  unsigned threads = 1;
};

/// 0.1, 0.2, ..., 4.0.
std::vector<double> default_bandwidth_grid();
/// `points` candidates evenly spaced over [0.02, 1.0] x diameter.
std::vector<double> scaled_bandwidth_grid(double diameter, int points = 50);

/// Local Poisson IRLS at one focal point. hat_diag and variance (unscaled,
/// dispersion 1) are evaluated at the fixpoint. Throws SingularSystemError
/// (with the local identification report) or DivergenceError.
LocalFit fit_local_irls(const Dataset& data, const KernelSpec& kernel,
                        Eigen::Index focal, Eigen::VectorXd init,
                        const IrlsOptions& options = {});

/// Same, reusing a precomputed distance row.
LocalFit fit_local_irls(const Dataset& data, const KernelSpec& kernel,
                        const Eigen::Ref<const Eigen::VectorXd>& distances,
                        Eigen::Index focal, Eigen::VectorXd init,
                        const IrlsOptions& options = {});

/// Sum of hat diagonals, in index order.
double effective_parameters(const std::vector<LocalFit>& locals);

/// D + 2 n_enp + 2 n_enp (n_enp + 1) / (n - n_enp - 1); +inf when
/// n - n_enp - 1 <= 0.
double aicc(double deviance, double n_enp, double n);

/// Conventional (quasi-)GWPR with AICc bandwidth selection. Failing
/// candidates are kept in the trace as infeasible; if all fail, throws
/// FitFailureError.
ModelFit fit_gwpr(const Dataset& data, const GwprOptions& options = {});

/// Global Poisson regression as a ModelFit with a single coefficient row.
ModelFit fit_pr(const Dataset& data, bool quasi = false,
                const IrlsOptions& options = {});

}  // namespace lgwpr
