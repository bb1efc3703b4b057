#include "lgwpr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lgwpr/diagnostics.hpp"
#include "lgwpr/error.hpp"
#include "lgwpr/glm.hpp"
#include "lgwpr/linalg.hpp"
#include "lgwpr/parallel.hpp"
#include "lgwpr/search.hpp"

namespace lgwpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool better(const SelectionEntry& a, const SelectionEntry& b) {
  if (a.criterion != b.criterion) return a.criterion < b.criterion;
  if (a.delta != b.delta) return a.delta < b.delta;
  return a.bandwidth < b.bandwidth;
}

}  // namespace

std::vector<double> loocv_criteria(const Dataset& data, const Geometry& geometry,
                                   const KernelSpec& kernel,
                                   const std::vector<double>& deltas,
                                   CriterionKind kind, PsiMode psi,
                                   unsigned threads, const HoldoutHook& hook) {
  kernel.check();
  for (double d : deltas)
    if (!(d >= 0)) throw InvalidArgument("ridge must be >= 0");
  const Eigen::Index n = data.n();
  const std::size_t m = deltas.size();
  const LinearizedResponse global = linearized_response(data, zero_ratio(data.y));
  const Eigen::ArrayXd inv_shift = (data.y.array() + 0.5).inverse();
  const double scale = static_cast<double>(n);

  const Eigen::MatrixXd xt = data.X.transpose();
  const Eigen::Index k = xt.rows();

  // contrib[i * m + d]: held-out loss of sample i at deltas[d]
  std::vector<double> contrib(static_cast<std::size_t>(n) * m, 0.0);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto dist = geometry.distances.col(ii);
    const Eigen::VectorXd w = weights(kernel, dist, ii, true);
    if (hook) hook(ii, w);
    double shift = 0.0;
    if (psi == PsiMode::local) shift = 0.5 * (global.psi - local_psi(data, kernel, dist));
    const double zi = global.z(ii) + shift * inv_shift(ii);

    // one pass accumulates the lower triangle of X'CX and X'Cz
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = global.weights(j) * w(j);
      const double* x = xt.col(j).data();
      const double cz = c * (global.z(j) + shift * inv_shift(j));
      for (Eigen::Index a = 0; a < k; ++a) {
        const double cxa = c * x[a];
        rhs(a) += cz * x[a];
        for (Eigen::Index b = 0; b <= a; ++b) normal(a, b) += cxa * x[b];
      }
    }
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = a + 1; b < k; ++b) normal(a, b) = normal(b, a);
    const auto xi = data.X.row(ii).transpose();
    for (std::size_t d = 0; d < m; ++d) {
      double& out = contrib[i * m + d];
      auto inv = linalg::ridge_inverse(normal, deltas[d], scale);
      if (!inv) {
        out = kInf;
        continue;
      }
      const double eta = xi.dot(*inv * rhs);
      if (kind == CriterionKind::squared_error) {
        const double r = zi - eta;
        out = r * r;
      } else {
        out = deviance_term(data.y(ii), data.offset(ii) * std::exp(eta));
      }
      if (!std::isfinite(out)) out = kInf;
    }
  });

  std::vector<double> totals(m, 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t d = 0; d < m; ++d)
      totals[d] += contrib[static_cast<std::size_t>(i) * m + d];
  return totals;
}

double loocv_criterion(const Dataset& data, const KernelSpec& kernel,
                       double delta, CriterionKind kind, PsiMode psi,
                       unsigned threads, const HoldoutHook& hook) {
  return loocv_criteria(data, Geometry::of(data.coords), kernel, {delta}, kind,
                        psi, threads, hook)
      .front();
}

SelectionResult select(const Dataset& data, const LgwprConfig& config) {
  return select(data, Geometry::of(data.coords), config);
}

SelectionResult select(const Dataset& data, const Geometry& geometry,
                       const LgwprConfig& config) {
  config.check();
  const std::vector<double> deltas = config.deltas();
  SelectionResult result;

  std::map<double, std::vector<double>> memo;
  auto evaluate = [&](double b) -> const std::vector<double>& {
    auto it = memo.find(b);
    if (it != memo.end()) return it->second;
    const KernelSpec kernel{config.family, b, config.literal_bisquare};
    std::vector<double> crit = loocv_criteria(data, geometry, kernel, deltas,
                                              config.criterion, config.psi,
                                              config.threads);
    for (std::size_t d = 0; d < deltas.size(); ++d)
      result.trace.push_back({b, deltas[d], crit[d], std::isfinite(crit[d])});
    ++result.evaluations;
    return memo.emplace(b, std::move(crit)).first->second;
  };

  if (config.fixed_bandwidth) {
    evaluate(*config.fixed_bandwidth);
  } else {
    const double lo = config.search_lo > 0 ? config.search_lo : 0.5 * geometry.min_nonzero;
    const double hi = config.search_hi > 0 ? config.search_hi : geometry.diameter;
    const double tol = config.search_tol > 0 ? config.search_tol : 1e-3 * geometry.diameter;
    if (!(lo > 0) || !(lo < hi))
      throw InvalidArgument("bandwidth bracket is empty; are all points coincident?");
    if (config.strategy == SelectionStrategy::profile || deltas.size() == 1) {
      scan_then_golden(
          [&](double b) {
            const auto& crit = evaluate(b);
            return *std::min_element(crit.begin(), crit.end());
          },
          lo, hi, tol);
    } else {
      for (std::size_t d = 0; d < deltas.size(); ++d)
        scan_then_golden([&](double b) { return evaluate(b)[d]; }, lo, hi, tol);
    }
  }

  const SelectionEntry* best = nullptr;
  for (const auto& e : result.trace)
    if (e.feasible && (!best || better(e, *best))) best = &e;
  if (!best) {
    std::string msg = "every (bandwidth, ridge) candidate was infeasible";
    for (const auto& e : result.trace)
      msg += "\n  b=" + std::to_string(e.bandwidth) +
             " delta=" + std::to_string(e.delta) + ": singular held-out system";
    throw SelectionFailureError(msg);
  }
  result.bandwidth = best->bandwidth;
  result.delta = best->delta;
  result.criterion = best->criterion;
  return result;
}

}  // namespace lgwpr
