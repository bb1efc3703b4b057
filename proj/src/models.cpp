#include "lgwpr/models.hpp"

#include <algorithm>
#include <cctype>

#include "lgwpr/error.hpp"

namespace lgwpr {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

const std::vector<std::string>& model_menu() {
  static const std::vector<std::string> menu{
      "PR",      "GWPR",        "L-GWPR",     "L-GWPR_dev",
      "L-GWPRR", "L-GWPRR_dev", "L-GWPR_loc", "L-GWPRR_loc"};
  return menu;
}

std::string canonical_tag(std::string_view tag) {
  const std::string key = upper(tag);
  for (const auto& m : model_menu())
    if (upper(m) == key) return m;
  std::string msg = "unknown model '" + std::string(tag) + "'; expected one of";
  for (const auto& m : model_menu()) msg += " " + m;
  throw InvalidArgument(msg);
}

ModelFit run_model(const Dataset& data, std::string_view tag,
                   const ModelOptions& options) {
  const std::string name = canonical_tag(tag);
  if (name == "PR") return fit_pr(data, options.quasi);
  if (name == "GWPR") {
    GwprOptions g;
    g.family = options.family;
    g.literal_bisquare = options.literal_bisquare;
    g.quasi = options.quasi;
    g.threads = options.threads;
    g.search = options.gwpr_search;
    g.bandwidth_grid = options.bandwidth_grid;
    if (options.fixed_bandwidth) {
      g.search = BandwidthSearch::grid;
      g.bandwidth_grid = {*options.fixed_bandwidth};
    }
    g.search_lo = options.search_lo;
    g.search_hi = options.search_hi;
    g.search_tol = options.search_tol;
    return fit_gwpr(data, g);
  }
  LgwprConfig c = config_for_tag(name);
  c.family = options.family;
  c.literal_bisquare = options.literal_bisquare;
  c.delta_grid = options.delta_grid;
  c.mean_evaluation = options.mean_evaluation;
  c.strategy = options.strategy;
  c.fixed_bandwidth = options.fixed_bandwidth;
  c.search_lo = options.search_lo;
  c.search_hi = options.search_hi;
  c.search_tol = options.search_tol;
  c.threads = options.threads;
  return fit_lgwpr(data, c);
}

}  // namespace lgwpr
