#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/glm.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr {

enum class CriterionKind { squared_error, deviance };
enum class RidgeMode { none, search };
enum class PsiMode { global, local };

/// How the stage-3 working response evaluates the approximate means.
enum class MeanEvaluation {
  /// λ*_j(i) = o_j exp(x_j' β*_i): every focal point linearises around its
  /// own stage-1 coefficients, so stage 3 is one exact scoring step.
  focal,
  /// λ*_j = o_j exp(x_j' β*_j): each sample uses its own local fit.
  own,
};

enum class SelectionStrategy {
  /// One bandwidth search (log-spaced scan, then golden section) on the
  /// minimum over δ of the criterion. Every (b, δ) pair evaluated is recorded.
  profile,
  /// An independent bandwidth search for every δ candidate.
  nested,
};

struct LgwprConfig {
  KernelFamily family = KernelFamily::gaussian;
  bool literal_bisquare = false;
  CriterionKind criterion = CriterionKind::squared_error;
  RidgeMode ridge = RidgeMode::none;
  PsiMode psi = PsiMode::global;
  MeanEvaluation mean_evaluation = MeanEvaluation::focal;
  SelectionStrategy strategy = SelectionStrategy::profile;
  /// Ridge candidates when ridge == search; empty means default_delta_grid().
  std::vector<double> delta_grid;
  /// Skip the bandwidth search.
  std::optional<double> fixed_bandwidth;
  /// Bandwidth bracket and tolerance; 0 selects 0.5 x min nonzero distance,
  /// the data diameter, and 1e-3 x diameter.
  double search_lo = 0.0;
  double search_hi = 0.0;
  double search_tol = 0.0;
  unsigned threads = 1;

  /// Throws InvalidArgument.
  void check() const;
  /// {0} without ridge; otherwise the grid, always containing 0.
  std::vector<double> deltas() const;
};

/// 0 followed by 10 log-spaced values from 1e-6 to 10.
std::vector<double> default_delta_grid();

/// "L-GWPR", "L-GWPRR", with "_dev" or "_loc" suffix.
std::string model_tag(const LgwprConfig& config);
/// Inverse of model_tag; throws InvalidArgument for unknown tags.
LgwprConfig config_for_tag(std::string_view tag);

/// Stage-1 coefficients for every location at a given (b, δ).
struct StageOneFit {
  Eigen::MatrixXd beta_star;    // n x p
  LinearizedResponse response;  // global-ψ response
  Eigen::VectorXd psi;          // per-focal ψ actually used
  double bandwidth = 0.0;
  double delta = 0.0;
};

/// Ridge-regularised kernel-weighted least squares of z on X with weights
/// (y + 0.5) w_i:
///   (X'A⁺W_iX + δI)^{-1} X'A⁺W_i z.
/// With exclude_self the focal weight is zeroed (leave-one-out).
/// Throws SingularSystemError when δ == 0 and the system is singular.
Eigen::VectorXd stage1_local_wls(const Dataset& data, const KernelSpec& kernel,
                                 Eigen::Index focal, double delta,
                                 const LinearizedResponse& response,
                                 bool exclude_self = false);

/// Zero-count share among samples within effective_bandwidth(kernel) of the
/// focal point. Falls back to the global share (and bumps *fallbacks) if the
/// neighbourhood is empty.
double local_psi(const Dataset& data, const KernelSpec& kernel,
                 Eigen::Index focal, std::size_t* fallbacks = nullptr);
double local_psi(const Dataset& data, const KernelSpec& kernel,
                 const Eigen::Ref<const Eigen::VectorXd>& distances,
                 std::size_t* fallbacks = nullptr);

/// Stage 1 for all locations (self included).
StageOneFit fit_stage_one(const Dataset& data, const LgwprConfig& config,
                          double bandwidth, double delta);

/// Stages 2 and 3 at a given (b, δ): one scoring step from the stage-1 fit
/// at each location, with Var = C Â^{-1} C', C = (X'ÂW_iX + δI)^{-1} X'ÂW_i.
ModelFit fit_lgwpr_at(const Dataset& data, const LgwprConfig& config,
                      double bandwidth, double delta);

/// Select (b, δ) by leave-one-out CV, then fit_lgwpr_at.
ModelFit fit_lgwpr(const Dataset& data, const LgwprConfig& config);

}  // namespace lgwpr
