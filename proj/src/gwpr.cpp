#include "lgwpr/gwpr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "lgwpr/diagnostics.hpp"
#include "lgwpr/error.hpp"
#include "lgwpr/parallel.hpp"
#include "lgwpr/search.hpp"

namespace lgwpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double bandwidth = 0.0;
  std::vector<LocalFit> locals;
  TraceEntry entry;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::vector<double> default_bandwidth_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> scaled_bandwidth_grid(double diameter, int points) {
  if (!(diameter > 0) || points < 1)
    throw InvalidArgument("scaled grid needs a positive diameter");
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    const double frac =
        points == 1 ? 1.0 : 0.02 + (1.0 - 0.02) * i / (points - 1);
    grid.push_back(frac * diameter);
  }
  return grid;
}

LocalFit fit_local_irls(const Dataset& data, const KernelSpec& kernel,
                        Eigen::Index focal, Eigen::VectorXd init,
                        const IrlsOptions& options) {
  Eigen::VectorXd d(data.n());
  for (Eigen::Index j = 0; j < data.n(); ++j)
    d(j) = std::hypot(data.coords(j, 0) - data.coords(focal, 0),
                      data.coords(j, 1) - data.coords(focal, 1));
  return fit_local_irls(data, kernel, d, focal, std::move(init), options);
}

LocalFit fit_local_irls(const Dataset& data, const KernelSpec& kernel,
                        const Eigen::Ref<const Eigen::VectorXd>& distances,
                        Eigen::Index focal, Eigen::VectorXd init,
                        const IrlsOptions& options) {
  if (focal < 0 || focal >= data.n())
    throw InvalidArgument("focal index out of range");
  const Eigen::VectorXd w = weights(kernel, distances, focal);
  if (options.check_identification) {
    auto report = check_identification(data, w);
    if (!report.identifiable_necessary)
      throw SingularSystemError("local Poisson fit at row " +
                                    std::to_string(focal + 1) +
                                    " is not identified",
                                report);
  }
  IrlsResult r = weighted_irls(data, w, std::move(init), options);
  LocalFit fit;
  fit.focal = focal;
  const auto xi = data.X.row(focal).transpose();
  fit.lambda = r.lambda(focal);
  fit.hat_diag = xi.dot(r.normal_inverse * xi) * fit.lambda * w(focal);
  fit.variance = std::move(r.normal_inverse);
  fit.beta = std::move(r.beta);
  fit.converged = r.converged;
  return fit;
}

double effective_parameters(const std::vector<LocalFit>& locals) {
  double s = 0.0;
  for (const auto& l : locals) s += l.hat_diag;
  return s;
}

double aicc(double dev, double n_enp, double n) {
  const double denom = n - n_enp - 1.0;
  if (!(denom > 0) || !std::isfinite(dev)) return kInf;
  return dev + 2.0 * n_enp + 2.0 * n_enp * (n_enp + 1.0) / denom;
}

ModelFit fit_gwpr(const Dataset& data, const GwprOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = data.n();
  const Geometry geo = Geometry::of(data.coords);

  Eigen::VectorXd global_start = irls_start(data);
  try {
    global_start = fit_poisson_irls(data, {}, options.irls).beta;
  } catch (const Error&) {
  }
  std::vector<std::optional<Eigen::VectorXd>> warm(static_cast<std::size_t>(n));

  auto evaluate = [&](double b) {
    Candidate cand;
    cand.bandwidth = b;
    cand.entry.bandwidth = b;
    KernelSpec kernel{options.family, b, options.literal_bisquare};
    kernel.check();
    cand.locals.resize(static_cast<std::size_t>(n));
    std::vector<std::string> failures(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      try {
        Eigen::VectorXd init = warm[i] ? *warm[i] : global_start;
        cand.locals[i] = fit_local_irls(data, kernel, geo.distances.col(ii), ii,
                                        std::move(init), options.irls);
        if (!cand.locals[i].converged)
          failures[i] = "IRLS did not converge";
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < failures.size(); ++i) {
      if (failures[i].empty()) {
        warm[i] = cand.locals[i].beta;
      } else {
        warm[i].reset();
        if (cand.entry.note.empty())
          cand.entry.note = "row " + data.id(static_cast<Eigen::Index>(i)) +
                            ": " + failures[i];
      }
    }
    if (!cand.entry.note.empty()) {
      cand.entry.criterion = kInf;
      cand.entry.feasible = false;
      cand.locals.clear();
      return cand;
    }
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i)
      lambda(i) = cand.locals[static_cast<std::size_t>(i)].lambda;
    cand.entry.n_enp = effective_parameters(cand.locals);
    cand.entry.deviance = deviance(data.y, lambda);
    cand.entry.criterion =
        aicc(cand.entry.deviance, cand.entry.n_enp, static_cast<double>(n));
    cand.entry.feasible = std::isfinite(cand.entry.criterion);
    if (!cand.entry.feasible) {
      cand.entry.note = "no residual degrees of freedom for AICc";
      cand.locals.clear();
    }
    return cand;
  };

  ModelFit fit;
  fit.tag = "GWPR";
  fit.criterion = "AICc";
  fit.quasi = options.quasi;
  fit.sample_count = n;
  Candidate best;
  best.entry.criterion = kInf;
  auto consider = [&](Candidate cand) {
    const double crit = cand.entry.criterion;
    fit.trace.push_back(cand.entry);
    if (!cand.entry.feasible) return crit;
    if (crit < best.entry.criterion ||
        (crit == best.entry.criterion && cand.bandwidth < best.bandwidth))
      best = std::move(cand);
    return crit;
  };

  if (options.search == BandwidthSearch::grid) {
    std::vector<double> grid = options.bandwidth_grid.empty()
                                   ? default_bandwidth_grid()
                                   : options.bandwidth_grid;
    if (grid.empty()) throw InvalidArgument("bandwidth grid is empty");
    for (double b : grid)
      if (!(b > 0)) throw InvalidArgument("bandwidth grid must be positive");
    std::sort(grid.begin(), grid.end());
    for (double b : grid) consider(evaluate(b));
  } else {
    const double lo = options.search_lo > 0 ? options.search_lo : 0.5 * geo.min_nonzero;
    const double hi = options.search_hi > 0 ? options.search_hi : geo.diameter;
    const double tol = options.search_tol > 0 ? options.search_tol : 1e-3 * geo.diameter;
    scan_then_golden([&](double b) { return consider(evaluate(b)); }, lo, hi, tol);
  }

  if (best.locals.empty()) {
    std::string msg = "GWPR failed at every candidate bandwidth";
    for (const auto& t : fit.trace)
      msg += "\n  b=" + std::to_string(t.bandwidth) + ": " + t.note;
    throw FitFailureError(msg);
  }

  fit.kernel = KernelSpec{options.family, best.bandwidth, options.literal_bisquare};
  fit.bandwidth = best.bandwidth;
  fit.locals = std::move(best.locals);
  fit.n_enp = best.entry.n_enp;
  fit.deviance = best.entry.deviance;
  Eigen::VectorXd lambda(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lambda(i) = fit.locals[static_cast<std::size_t>(i)].lambda;
  if (static_cast<double>(n) > fit.n_enp)
    fit.dispersion = dispersion(data.y, lambda, fit.n_enp);
  if (options.quasi) {
    if (!std::isfinite(fit.dispersion))
      throw DegreesOfFreedomError("no residual degrees of freedom for dispersion");
    for (auto& l : fit.locals) l.variance *= fit.dispersion;
  }
  fit.null_deviance = null_deviance(data);
  fit.pseudo_r2 = fit.null_deviance > 0 ? pseudo_r2(fit.deviance, fit.null_deviance)
                                        : std::numeric_limits<double>::quiet_NaN();
  fit.seconds = seconds_since(start);
  return fit;
}

ModelFit fit_pr(const Dataset& data, bool quasi, const IrlsOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  GlmFit g = fit_poisson_irls(data, {}, options);
  if (!g.converged) throw FitFailureError("global IRLS did not converge");
  ModelFit fit;
  fit.tag = "PR";
  fit.global = true;
  fit.quasi = quasi;
  fit.sample_count = data.n();
  LocalFit row;
  row.beta = g.beta;
  row.variance = quasi ? (g.covariance * g.dispersion).eval() : g.covariance;
  row.hat_diag = std::numeric_limits<double>::quiet_NaN();
  row.lambda = std::numeric_limits<double>::quiet_NaN();
  row.converged = g.converged;
  fit.locals.push_back(std::move(row));
  fit.n_enp = static_cast<double>(data.p());
  fit.dispersion = g.dispersion;
  fit.deviance = g.deviance;
  fit.null_deviance = g.null_deviance;
  fit.pseudo_r2 = g.null_deviance > 0 ? pseudo_r2(g.deviance, g.null_deviance)
                                      : std::numeric_limits<double>::quiet_NaN();
  fit.seconds = seconds_since(start);
  return fit;
}

}  // namespace lgwpr
