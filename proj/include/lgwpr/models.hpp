#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/gwpr.hpp"
#include "lgwpr/lgwpr.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr {

/// Settings shared by every model in the menu. Fields a model does not use
/// are ignored.
struct ModelOptions {
  KernelFamily family = KernelFamily::gaussian;
  bool literal_bisquare = false;
  /// Skip bandwidth selection.
  std::optional<double> fixed_bandwidth;
  /// GWPR bandwidth search and candidates.
  BandwidthSearch gwpr_search = BandwidthSearch::grid;
  std::vector<double> bandwidth_grid;
  /// Quasi-Poisson variances for PR and GWPR.
  bool quasi = false;
  /// Ridge candidates for the L-GWPRR family.
  std::vector<double> delta_grid;
  MeanEvaluation mean_evaluation = MeanEvaluation::focal;
  SelectionStrategy strategy = SelectionStrategy::profile;
  double search_lo = 0.0;
  double search_hi = 0.0;
  double search_tol = 0.0;
  unsigned threads = 1;
};

/// "PR", "GWPR", then the six linearised tags.
const std::vector<std::string>& model_menu();

/// Case-insensitive lookup; returns the canonical tag or throws
/// InvalidArgument.
std::string canonical_tag(std::string_view tag);

/// Fits the model named by `tag`.
ModelFit run_model(const Dataset& data, std::string_view tag,
                   const ModelOptions& options = {});

}  // namespace lgwpr
