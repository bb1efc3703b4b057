#include "lgwpr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgwpr/error.hpp"

namespace lgwpr {

Eigen::MatrixXd ModelFit::coefficients() const {
  if (locals.empty()) return {};
  Eigen::MatrixXd b(static_cast<Eigen::Index>(locals.size()),
                    locals.front().beta.size());
  for (std::size_t i = 0; i < locals.size(); ++i)
    b.row(static_cast<Eigen::Index>(i)) = locals[i].beta.transpose();
  return b;
}

Eigen::MatrixXd ModelFit::coefficients_per_sample() const {
  if (!global) return coefficients();
  return coefficients().row(0).replicate(sample_count, 1);
}

double deviance_term(double y, double lambda) {
  const double fit = y > 0 ? y * std::log(y / lambda) : 0.0;
  return 2.0 * (fit - (y - lambda));
}

double deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) d += deviance_term(y(i), lambda(i));
  return std::max(d, 0.0);
}

double null_deviance(const Dataset& data) {
  const double rate = data.y.sum() / data.offset.sum();
  return deviance(data.y, (rate * data.offset).eval());
}

double pseudo_r2(double dev, double null_dev) {
  if (!(null_dev > 0))
    throw DegenerateNullError("null deviance is zero; pseudo-R² undefined");
  return 1.0 - dev / null_dev;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided_p(double z) {
  if (std::isinf(z)) return 0.0;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

SignificanceTable significance(const ModelFit& fit, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must be in (0, 1)");
  SignificanceTable t;
  const auto rows = static_cast<Eigen::Index>(fit.locals.size());
  const Eigen::Index p = rows ? fit.locals.front().beta.size() : 0;
  t.alpha = alpha;
  t.n_enp = fit.n_enp;
  t.method = "alpha*(k+1)/n_enp, clamped to [alpha/n, alpha]";
  const double n = static_cast<double>(std::max<Eigen::Index>(fit.sample_count, 1));
  double corrected = fit.n_enp > 0 ? alpha * static_cast<double>(p) / fit.n_enp : alpha;
  t.corrected_alpha = std::clamp(corrected, alpha / n, alpha);

  t.se.resize(rows, p);
  t.z.resize(rows, p);
  t.p.resize(rows, p);
  t.significant.resize(rows, p);
  t.degenerate.resize(rows, p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const LocalFit& lf = fit.locals[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < p; ++c) {
      const double var = lf.variance(c, c);
      const double se = std::sqrt(std::max(var, 0.0));
      const double b = lf.beta(c);
      double z;
      bool degenerate = false;
      if (se > 0) {
        z = b / se;
      } else {
        degenerate = true;
        z = b == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
      }
      const double pv = b == 0 && se == 0 ? 1.0 : two_sided_p(z);
      t.se(i, c) = se;
      t.z(i, c) = z;
      t.p(i, c) = pv;
      t.degenerate(i, c) = degenerate;
      t.significant(i, c) = pv < t.corrected_alpha;
    }
  }
  return t;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CoefficientSummary coefficient_summary(const ModelFit& fit) {
  const Eigen::MatrixXd b = fit.coefficients();
  CoefficientSummary s;
  s.table.resize(b.cols(), 5);
  static constexpr double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    std::vector<double> col(b.col(c).data(), b.col(c).data() + b.rows());
    for (int q = 0; q < 5; ++q) s.table(c, q) = quantile(col, probs[q]);
  }
  return s;
}

}  // namespace lgwpr
