#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/lgwpr.hpp"

namespace lgwpr {

struct SelectionEntry {
  double bandwidth = 0.0;
  double delta = 0.0;
  double criterion = 0.0;  // +inf when infeasible
  bool feasible = false;
};

struct SelectionResult {
  double bandwidth = 0.0;
  double delta = 0.0;
  double criterion = 0.0;
  std::vector<SelectionEntry> trace;
  /// Distinct bandwidths at which the LOOCV criterion was evaluated.
  int evaluations = 0;
};

/// Called once per held-out solve with the focal index and the weight vector
/// actually used. Testing hook; may be invoked concurrently.
using HoldoutHook =
    std::function<void(Eigen::Index focal, const Eigen::VectorXd& weights)>;

/// Leave-one-out criteria at bandwidth kernel.bandwidth for several ridge
/// values at once:
///   squared_error: sum_i (z_i - x_i' β*_{-i})^2
///   deviance:      sum_i 2[y_i log(y_i/λ_{-i}) - (y_i - λ_{-i})]
/// with λ_{-i} = o_i exp(x_i' β*_{-i}). A singular held-out system at δ = 0
/// makes that entry +inf. Sums run in index order.
std::vector<double> loocv_criteria(const Dataset& data, const Geometry& geometry,
                                   const KernelSpec& kernel,
                                   const std::vector<double>& deltas,
                                   CriterionKind kind, PsiMode psi,
                                   unsigned threads = 1,
                                   const HoldoutHook& hook = {});

double loocv_criterion(const Dataset& data, const KernelSpec& kernel,
                       double delta, CriterionKind kind, PsiMode psi,
                       unsigned threads = 1, const HoldoutHook& hook = {});

/// Searches (b, δ) per config. Ties go to the smaller δ, then the smaller b.
/// Throws SelectionFailureError when every candidate is infeasible.
SelectionResult select(const Dataset& data, const LgwprConfig& config);
SelectionResult select(const Dataset& data, const Geometry& geometry,
                       const LgwprConfig& config);

}  // namespace lgwpr
