#include "lgwpr/glm.hpp"

#include <cmath>

#include "lgwpr/diagnostics.hpp"
#include "lgwpr/linalg.hpp"

namespace lgwpr {

namespace {

Eigen::VectorXd ones_if_empty(const Eigen::VectorXd& w, Eigen::Index n) {
  if (w.size() == 0) return Eigen::VectorXd::Ones(n);
  if (w.size() != n) throw InvalidArgument("weight vector length mismatch");
  return w;
}

void guard_divergence(const Eigen::VectorXd& eta, const Eigen::VectorXd& w) {
  const double floor = kSupportFloor * w.maxCoeff();
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    if (w(j) > floor && !(std::abs(eta(j)) <= kOverflowGuard))
      throw DivergenceError("linear predictor " + std::to_string(eta(j)) +
                            " at row " + std::to_string(j + 1) +
                            " exceeds the overflow guard");
  }
}

}  // namespace

double zero_ratio(const Eigen::VectorXd& y) {
  if (y.size() == 0) return 0.0;
  return static_cast<double>((y.array() == 0.0).count()) /
         static_cast<double>(y.size());
}

IdentificationReport check_identification(const Dataset& data,
                                          const Eigen::VectorXd& weights) {
  const Eigen::VectorXd w = ones_if_empty(weights, data.n());
  IdentificationReport report;
  report.n_parameters = static_cast<std::size_t>(data.p());
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.y(i) > 0 && w(i) > 0) rows.push_back(i);
  report.n_positive = rows.size();
  if (!rows.empty()) {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), data.p());
    for (std::size_t r = 0; r < rows.size(); ++r)
      sub.row(static_cast<Eigen::Index>(r)) =
          std::sqrt(w(rows[r])) * data.X.row(rows[r]);
    report.design_rank_on_positive =
        static_cast<std::size_t>(linalg::rank(sub));
  }
  report.identifiable_necessary =
      report.n_positive >= report.n_parameters &&
      report.design_rank_on_positive == report.n_parameters;
  return report;
}

Eigen::VectorXd irls_start(const Dataset& data) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.p());
  beta(0) = std::log((data.y.mean() + 0.5) / data.offset.mean());
  return beta;
}

Eigen::VectorXd irls_update(const Dataset& data, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& beta, double ridge) {
  const Eigen::VectorXd eta = data.X * beta;
  const Eigen::VectorXd lambda =
      (data.offset.array() * eta.array().exp()).matrix();
  if (!lambda.allFinite()) throw DivergenceError("fitted mean overflowed");
  const Eigen::VectorXd c = (lambda.array() * w.array()).matrix();
  auto inv = linalg::ridge_inverse(linalg::weighted_cross(data.X, c), ridge,
                                   static_cast<double>(data.n()));
  if (!inv)
    throw SingularSystemError("weighted normal matrix is singular",
                              check_identification(data, w));
  return *inv * (data.X.transpose() * scored_response(data.y, eta, lambda, w));
}

IrlsResult weighted_irls(const Dataset& data, const Eigen::VectorXd& w,
                         Eigen::VectorXd beta, const IrlsOptions& options) {
  if (options.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(options.tol > 0)) throw InvalidArgument("tol must be positive");
  const double scale = static_cast<double>(data.n());
  IrlsResult result;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd eta = data.X * beta;
    guard_divergence(eta, w);
    const Eigen::VectorXd lambda =
        (data.offset.array() * eta.array().exp()).matrix();
    const Eigen::VectorXd c = (lambda.array() * w.array()).matrix();
    auto inv = linalg::spd_inverse(linalg::weighted_cross(data.X, c), scale);
    if (!inv)
      throw SingularSystemError("weighted normal matrix is singular",
                                check_identification(data, w));
    Eigen::VectorXd next =
        *inv * (data.X.transpose() * scored_response(data.y, eta, lambda, w));
    const double step = (next - beta).cwiseAbs().maxCoeff();
    beta = std::move(next);
    result.iterations = it;
    if (!(step == step)) throw DivergenceError("IRLS produced NaN");
    if (step < options.tol) {
      result.converged = true;
      break;
    }
  }
  const Eigen::VectorXd eta = data.X * beta;
  guard_divergence(eta, w);
  result.lambda = (data.offset.array() * eta.array().exp()).matrix();
  auto inv = linalg::spd_inverse(
      linalg::weighted_cross(data.X, (result.lambda.array() * w.array()).matrix()),
      scale);
  if (!inv)
    throw SingularSystemError("weighted normal matrix is singular",
                              check_identification(data, w));
  result.normal_inverse = std::move(*inv);
  result.beta = std::move(beta);
  return result;
}

GlmFit fit_poisson_irls(const Dataset& data, const Eigen::VectorXd& weights,
                        const IrlsOptions& options) {
  const Eigen::VectorXd w = ones_if_empty(weights, data.n());
  if (options.check_identification) {
    auto report = check_identification(data, w);
    if (!report.identifiable_necessary)
      throw SingularSystemError("Poisson ML estimator not identified",
                                report);
  }
  IrlsResult r = weighted_irls(data, w, irls_start(data), options);
  GlmFit fit;
  fit.beta = std::move(r.beta);
  fit.lambda = std::move(r.lambda);
  fit.covariance = std::move(r.normal_inverse);
  fit.iterations = r.iterations;
  fit.converged = r.converged;
  fit.deviance = deviance(data.y, fit.lambda);
  fit.null_deviance = null_deviance(data);
  const double n_enp = static_cast<double>(data.p());
  if (static_cast<double>(data.n()) > n_enp)
    fit.dispersion = dispersion(data.y, fit.lambda, n_enp);
  return fit;
}

LinearizedResponse linearized_response(const Dataset& data, double psi) {
  if (!(psi >= 0.0 && psi <= 1.0))
    throw InvalidArgument("zero ratio must lie in [0, 1]");
  LinearizedResponse r;
  r.psi = psi;
  r.weights = (data.y.array() + 0.5).matrix();
  r.z = ((r.weights.array() / data.offset.array()).log() -
         (1.0 + 0.5 * psi) / r.weights.array())
            .matrix();
  return r;
}

GlmFit fit_poisson_linearized(const Dataset& data) {
  const LinearizedResponse lr = linearized_response(data, zero_ratio(data.y));
  const double scale = static_cast<double>(data.n());
  auto inv = linalg::spd_inverse(linalg::weighted_cross(data.X, lr.weights),
                                 scale);
  if (!inv)
    throw SingularSystemError("log-linear normal matrix is singular",
                              check_identification(data));
  const Eigen::VectorXd beta_star =
      *inv * (data.X.transpose() *
              (lr.weights.array() * lr.z.array()).matrix());

  GlmFit fit;
  fit.beta = irls_update(data, Eigen::VectorXd::Ones(data.n()), beta_star);
  const Eigen::VectorXd eta = data.X * fit.beta;
  fit.lambda = (data.offset.array() * eta.array().exp()).matrix();
  if (!fit.lambda.allFinite()) throw DivergenceError("fitted mean overflowed");
  auto cov = linalg::spd_inverse(linalg::weighted_cross(data.X, fit.lambda),
                                 scale);
  fit.covariance = cov ? *cov : Eigen::MatrixXd::Constant(
                                    data.p(), data.p(), std::nan(""));
  const Eigen::VectorXd resid = lr.z - data.X * beta_star;
  if (data.n() > data.p())
    fit.working_variance =
        (lr.weights.array() * resid.array().square()).sum() /
        static_cast<double>(data.n() - data.p());
  fit.iterations = 1;
  fit.converged = true;
  fit.deviance = deviance(data.y, fit.lambda);
  fit.null_deviance = null_deviance(data);
  if (data.n() > data.p())
    fit.dispersion =
        dispersion(data.y, fit.lambda, static_cast<double>(data.p()));
  return fit;
}

double dispersion(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda,
                  double n_enp) {
  const double dof = static_cast<double>(y.size()) - n_enp;
  if (!(dof > 0))
    throw DegreesOfFreedomError("effective parameters (" +
                                std::to_string(n_enp) +
                                ") leave no residual degrees of freedom");
  return ((y - lambda).array().square() / lambda.array()).sum() / dof;
}

}  // namespace lgwpr
