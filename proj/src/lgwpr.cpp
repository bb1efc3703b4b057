#include "lgwpr/lgwpr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "lgwpr/diagnostics.hpp"
#include "lgwpr/error.hpp"
#include "lgwpr/gwpr.hpp"
#include "lgwpr/linalg.hpp"
#include "lgwpr/parallel.hpp"
#include "lgwpr/selection.hpp"

namespace lgwpr {

void LgwprConfig::check() const {
  for (double d : delta_grid)
    if (!(d >= 0) || !std::isfinite(d))
      throw InvalidArgument("ridge candidates must be finite and >= 0");
  if (fixed_bandwidth && !(*fixed_bandwidth > 0 && std::isfinite(*fixed_bandwidth)))
    throw InvalidArgument("fixed bandwidth must be positive");
  if (search_lo < 0 || search_hi < 0 || search_tol < 0)
    throw InvalidArgument("search bracket must be non-negative");
}

std::vector<double> LgwprConfig::deltas() const {
  if (ridge == RidgeMode::none) return {0.0};
  std::vector<double> grid = delta_grid.empty() ? default_delta_grid() : delta_grid;
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid{0.0};
  const double lo = std::log10(1e-6), hi = std::log10(10.0);
  for (int i = 0; i < 10; ++i) grid.push_back(std::pow(10.0, lo + (hi - lo) * i / 9.0));
  return grid;
}

std::string model_tag(const LgwprConfig& config) {
  std::string tag = config.ridge == RidgeMode::search ? "L-GWPRR" : "L-GWPR";
  if (config.criterion == CriterionKind::deviance) tag += "_dev";
  if (config.psi == PsiMode::local) tag += "_loc";
  return tag;
}

LgwprConfig config_for_tag(std::string_view tag) {
  LgwprConfig c;
  std::string_view rest;
  if (tag.starts_with("L-GWPRR")) {
    c.ridge = RidgeMode::search;
    rest = tag.substr(7);
  } else if (tag.starts_with("L-GWPR")) {
    rest = tag.substr(6);
  } else {
    throw InvalidArgument("unknown model tag '" + std::string(tag) + "'");
  }
  if (rest.starts_with("_dev")) {
    c.criterion = CriterionKind::deviance;
    rest.remove_prefix(4);
  }
  if (rest.starts_with("_loc")) {
    c.psi = PsiMode::local;
    rest.remove_prefix(4);
  }
  if (!rest.empty())
    throw InvalidArgument("unknown model tag '" + std::string(tag) + "'");
  return c;
}

double local_psi(const Dataset& data, const KernelSpec& kernel,
                 const Eigen::Ref<const Eigen::VectorXd>& distances,
                 std::size_t* fallbacks) {
  const double radius = effective_bandwidth(kernel);
  std::size_t inside = 0, zeros = 0;
  for (Eigen::Index j = 0; j < distances.size(); ++j) {
    if (distances(j) <= radius) {
      ++inside;
      if (data.y(j) == 0) ++zeros;
    }
  }
  if (inside == 0) {
    if (fallbacks) ++*fallbacks;
    return zero_ratio(data.y);
  }
  return static_cast<double>(zeros) / static_cast<double>(inside);
}

namespace {

Eigen::VectorXd distance_row(const Dataset& data, Eigen::Index focal) {
  Eigen::VectorXd d(data.n());
  for (Eigen::Index j = 0; j < data.n(); ++j)
    d(j) = std::hypot(data.coords(j, 0) - data.coords(focal, 0),
                      data.coords(j, 1) - data.coords(focal, 1));
  return d;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Eigen::VectorXd solve_stage1(const Dataset& data, const Eigen::VectorXd& w,
                             Eigen::Index focal, double delta,
                             const Eigen::VectorXd& z,
                             const Eigen::VectorXd& a) {
  const Eigen::VectorXd c = (a.array() * w.array()).matrix();
  auto inv = linalg::ridge_inverse(linalg::weighted_cross(data.X, c), delta,
                                   static_cast<double>(data.n()));
  if (!inv)
    throw SingularSystemError("stage-1 system at row " +
                                  std::to_string(focal + 1) + " is singular",
                              check_identification(data, w));
  return *inv * (data.X.transpose() * (c.array() * z.array()).matrix());
}

}  // namespace

double local_psi(const Dataset& data, const KernelSpec& kernel,
                 Eigen::Index focal, std::size_t* fallbacks) {
  return local_psi(data, kernel, distance_row(data, focal), fallbacks);
}

Eigen::VectorXd stage1_local_wls(const Dataset& data, const KernelSpec& kernel,
                                 Eigen::Index focal, double delta,
                                 const LinearizedResponse& response,
                                 bool exclude_self) {
  if (focal < 0 || focal >= data.n())
    throw InvalidArgument("focal index out of range");
  if (!(delta >= 0)) throw InvalidArgument("ridge must be >= 0");
  const Eigen::VectorXd w =
      weights(kernel, distance_row(data, focal), focal, exclude_self);
  return solve_stage1(data, w, focal, delta, response.z, response.weights);
}

namespace {

StageOneFit stage_one(const Dataset& data, const Geometry& geo,
                      const LgwprConfig& config, double bandwidth,
                      double delta) {
  const KernelSpec kernel{config.family, bandwidth, config.literal_bisquare};
  kernel.check();
  const Eigen::Index n = data.n();
  StageOneFit s;
  s.bandwidth = bandwidth;
  s.delta = delta;
  s.response = linearized_response(data, zero_ratio(data.y));
  s.beta_star.resize(n, data.p());
  s.psi = Eigen::VectorXd::Constant(n, s.response.psi);
  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(n));
  std::vector<std::size_t> fallbacks(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd w = weights(kernel, geo.distances.col(ii), ii);
    if (config.psi == PsiMode::local) {
      const double psi = local_psi(data, kernel, geo.distances.col(ii), &fallbacks[i]);
      s.psi(ii) = psi;
      const Eigen::VectorXd z = linearized_response(data, psi).z;
      rows[i] = solve_stage1(data, w, ii, delta, z, s.response.weights);
    } else {
      rows[i] = solve_stage1(data, w, ii, delta, s.response.z, s.response.weights);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    s.beta_star.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  return s;
}

}  // namespace

StageOneFit fit_stage_one(const Dataset& data, const LgwprConfig& config,
                          double bandwidth, double delta) {
  return stage_one(data, Geometry::of(data.coords), config, bandwidth, delta);
}

ModelFit fit_lgwpr_at(const Dataset& data, const LgwprConfig& config,
                      double bandwidth, double delta) {
  const auto start = std::chrono::steady_clock::now();
  config.check();
  if (!(delta >= 0)) throw InvalidArgument("ridge must be >= 0");
  const Eigen::Index n = data.n();
  const Geometry geo = Geometry::of(data.coords);
  const KernelSpec kernel{config.family, bandwidth, config.literal_bisquare};
  kernel.check();

  const StageOneFit stage1 = stage_one(data, geo, config, bandwidth, delta);

  Eigen::VectorXd own_eta;
  if (config.mean_evaluation == MeanEvaluation::own)
    own_eta = (data.X.array() * stage1.beta_star.array()).rowwise().sum().matrix();

  std::vector<LocalFit> locals(static_cast<std::size_t>(n));
  const double scale = static_cast<double>(n);
  parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd w = weights(kernel, geo.distances.col(ii), ii);
    const Eigen::VectorXd eta =
        config.mean_evaluation == MeanEvaluation::focal
            ? (data.X * stage1.beta_star.row(ii).transpose()).eval()
            : own_eta;
    const Eigen::VectorXd lambda = (data.offset.array() * eta.array().exp()).matrix();
    Eigen::VectorXd c(n), s(n), c2(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (w(j) == 0.0) {
        c(j) = s(j) = c2(j) = 0.0;
        continue;
      }
      c(j) = lambda(j) * w(j);
      s(j) = w(j) * (lambda(j) * eta(j) + data.y(j) - lambda(j));
      c2(j) = c(j) * w(j);
    }
    if (!c.allFinite() || !s.allFinite())
      throw DivergenceError("approximate mean overflowed at row " +
                            std::to_string(ii + 1));
    auto inv = linalg::ridge_inverse(linalg::weighted_cross(data.X, c), delta, scale);
    if (!inv)
      throw SingularSystemError("stage-3 system at row " + std::to_string(ii + 1) +
                                    " is singular",
                                check_identification(data, w));
    LocalFit& lf = locals[i];
    lf.focal = ii;
    lf.beta = *inv * (data.X.transpose() * s);
    const Eigen::MatrixXd v = *inv * linalg::weighted_cross(data.X, c2) * *inv;
    lf.variance = 0.5 * (v + v.transpose());
    const auto xi = data.X.row(ii).transpose();
    lf.hat_diag = xi.dot(*inv * xi) * c(ii);
    lf.lambda = data.offset(ii) * std::exp(xi.dot(lf.beta));
    lf.converged = true;
  });

  ModelFit fit;
  fit.tag = model_tag(config);
  fit.kernel = kernel;
  fit.bandwidth = bandwidth;
  fit.delta = delta;
  fit.sample_count = n;
  fit.criterion = config.criterion == CriterionKind::deviance ? "deviance" : "squared_error";
  fit.locals = std::move(locals);
  fit.n_enp = effective_parameters(fit.locals);
  Eigen::VectorXd lambda(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lambda(i) = fit.locals[static_cast<std::size_t>(i)].lambda;
  fit.deviance = deviance(data.y, lambda);
  fit.null_deviance = null_deviance(data);
  fit.pseudo_r2 = fit.null_deviance > 0 ? pseudo_r2(fit.deviance, fit.null_deviance)
                                        : std::numeric_limits<double>::quiet_NaN();
  if (static_cast<double>(n) > fit.n_enp && lambda.allFinite())
    fit.dispersion = dispersion(data.y, lambda, fit.n_enp);
  fit.seconds = seconds_since(start);
  return fit;
}

ModelFit fit_lgwpr(const Dataset& data, const LgwprConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.check();
  const Geometry geo = Geometry::of(data.coords);
  SelectionResult sel = select(data, geo, config);
  ModelFit fit = fit_lgwpr_at(data, config, sel.bandwidth, sel.delta);
  fit.trace.reserve(sel.trace.size());
  for (const auto& e : sel.trace) {
    TraceEntry t;
    t.bandwidth = e.bandwidth;
    t.delta = e.delta;
    t.criterion = e.criterion;
    t.feasible = e.feasible;
    if (!e.feasible) t.note = "singular held-out system";
    fit.trace.push_back(std::move(t));
  }
  if (config.psi == PsiMode::local) {
    std::size_t fallbacks = 0;
    const KernelSpec kernel{config.family, sel.bandwidth, config.literal_bisquare};
    for (Eigen::Index i = 0; i < data.n(); ++i)
      local_psi(data, kernel, geo.distances.col(i), &fallbacks);
    fit.psi_fallbacks = fallbacks;
  }
  fit.seconds = seconds_since(start);
  return fit;
}

}  // namespace lgwpr
