#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/gwpr.hpp"
#include "lgwpr/lgwpr.hpp"
#include "lgwpr/models.hpp"
#include "lgwpr/selection.hpp"
#include "support.hpp"

using namespace lgwpr;

namespace {

LgwprConfig fixed(std::string_view tag, double b, unsigned threads = 1) {
  LgwprConfig c = config_for_tag(tag);
  c.fixed_bandwidth = b;
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("stage-1 WLS matches dense normal equations") {
  const Dataset d = test::random_dataset(21, 40, 2);
  const LinearizedResponse r = linearized_response(d, zero_ratio(d.y));
  for (auto family : {KernelFamily::gaussian, KernelFamily::bisquare}) {
    const KernelSpec k{family, 0.5};
    for (double delta : {0.0, 1e-3, 0.7})
      for (Eigen::Index i : {0, 13, 39})
        for (bool loo : {false, true}) {
          const Eigen::VectorXd got = stage1_local_wls(d, k, i, delta, r, loo);
          const Eigen::VectorXd want = test::dense_stage1(d, k, i, delta, r, loo);
          CHECK(test::max_abs_diff(got, want) < 1e-10);
        }
  }
}

TEST_CASE("n_enp equals the trace of explicitly assembled hat matrices") {
  const Dataset d = test::random_dataset(22, 35, 2);
  SUBCASE("GWPR") {
    GwprOptions o;
    o.bandwidth_grid = {0.4};
    const ModelFit f = fit_gwpr(d, o);
    const double want = test::explicit_enp(d, f.kernel, test::local_means(d, f.coefficients()), 0.0);
    CHECK(std::abs(f.n_enp - want) < 1e-10);
  }
  SUBCASE("L-GWPRR at fixed (b, delta)") {
    const LgwprConfig c = fixed("L-GWPRR", 0.4);
    const ModelFit f = fit_lgwpr_at(d, c, 0.4, 0.05);
    const StageOneFit s1 = fit_stage_one(d, c, 0.4, 0.05);
    const double want = test::explicit_enp(d, f.kernel, test::local_means(d, s1.beta_star), 0.05);
    CHECK(std::abs(f.n_enp - want) < 1e-10);
  }
}

TEST_CASE("zero ridge path is the unregularized path") {
  const Dataset d = test::random_dataset(23, 60, 2);
  const ModelFit plain = fit_lgwpr_at(d, fixed("L-GWPR", 0.3), 0.3, 0.0);
  const ModelFit ridge0 = fit_lgwpr_at(d, fixed("L-GWPRR", 0.3), 0.3, 0.0);
  CHECK(test::max_abs_diff(plain.coefficients(), ridge0.coefficients()) < 1e-12);
  const Geometry g = Geometry::of(d.coords);
  const KernelSpec k{KernelFamily::gaussian, 0.3};
  const double one = loocv_criteria(d, g, k, {0.0}, CriterionKind::squared_error, PsiMode::global)[0];
  const double many = loocv_criteria(d, g, k, default_delta_grid(), CriterionKind::squared_error,
                                     PsiMode::global)[0];
  CHECK(one == many);
}

TEST_CASE("quasi GWPR keeps the coefficients and n_enp") {
  const Dataset d = test::random_dataset(24, 50, 2);
  GwprOptions o;
  const ModelFit a = fit_gwpr(d, o);
  o.quasi = true;
  const ModelFit b = fit_gwpr(d, o);
  CHECK(test::max_abs_diff(a.coefficients(), b.coefficients()) == 0.0);
  CHECK(a.n_enp == b.n_enp);
  CHECK(a.bandwidth == b.bandwidth);
  const double ratio = b.locals[0].variance(0, 0) / a.locals[0].variance(0, 0);
  CHECK(ratio == doctest::Approx(b.dispersion));
}

TEST_CASE("huge bandwidth recovers the global estimators") {
  const Dataset d = test::random_dataset(25, 50, 2);
  const double b = 1e6 * Geometry::of(d.coords).diameter;
  GwprOptions o;
  o.bandwidth_grid = {b};
  const ModelFit gw = fit_gwpr(d, o);
  const GlmFit pr = fit_poisson_irls(d);
  for (const auto& l : gw.locals) CHECK(test::max_abs_diff(l.beta, pr.beta) < 1e-4);
  const ModelFit lg = fit_lgwpr_at(d, fixed("L-GWPR", b), b, 0.0);
  const GlmFit lin = fit_poisson_linearized(d);
  for (const auto& l : lg.locals) CHECK(test::max_abs_diff(l.beta, lin.beta) < 1e-4);
}

TEST_CASE("variances are symmetric positive semi-definite") {
  const Dataset d = test::random_dataset(26, 50, 2);
  for (std::string tag : {"PR", "GWPR", "L-GWPR", "L-GWPRR", "L-GWPR_dev", "L-GWPRR_loc"}) {
    ModelOptions o;
    o.fixed_bandwidth = 0.4;
    const ModelFit f = run_model(d, tag, o);
    for (const auto& l : f.locals) CHECK(test::is_psd(l.variance));
  }
}

TEST_CASE("LOOCV never lets a sample predict itself") {
  const Dataset d = test::random_dataset(27, 30, 1);
  const Geometry g = Geometry::of(d.coords);
  std::vector<int> seen(30, 0);
  loocv_criteria(d, g, {KernelFamily::gaussian, 0.3}, {0.0, 0.1},
                 CriterionKind::squared_error, PsiMode::global, 1,
                 [&](Eigen::Index i, const Eigen::VectorXd& w) {
                   CHECK(w(i) == 0.0);
                   CHECK(w.sum() > 0.0);
                   ++seen[static_cast<std::size_t>(i)];
                 });
  for (int s : seen) CHECK(s == 1);

  // criterion equals the sum of explicit held-out residuals
  const LinearizedResponse r = linearized_response(d, zero_ratio(d.y));
  const KernelSpec k{KernelFamily::gaussian, 0.3};
  double sse = 0.0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const Eigen::VectorXd b = test::dense_stage1(d, k, i, 0.0, r, true);
    sse += std::pow(r.z(i) - d.X.row(i).dot(b), 2);
  }
  CHECK(loocv_criterion(d, k, 0.0, CriterionKind::squared_error, PsiMode::global) ==
        doctest::Approx(sse).epsilon(1e-10));
}

TEST_CASE("row permutations permute the output") {
  const Dataset d = test::random_dataset(28, 45, 2);
  std::vector<Eigen::Index> perm(45);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  const Dataset p = test::permuted(d, perm);
  for (std::string tag : {"GWPR", "L-GWPRR"}) {
    const ModelFit a = run_model(d, tag);
    const ModelFit b = run_model(p, tag);
    CHECK(a.bandwidth == doctest::Approx(b.bandwidth).epsilon(1e-3));
    CHECK(a.delta == b.delta);
    ModelOptions at;
    at.fixed_bandwidth = a.bandwidth;
    at.delta_grid = {a.delta};
    const Eigen::MatrixXd ca = run_model(d, tag, at).coefficients();
    const Eigen::MatrixXd cb = run_model(p, tag, at).coefficients();
    for (std::size_t i = 0; i < perm.size(); ++i)
      CHECK(test::max_abs_diff(cb.row(static_cast<Eigen::Index>(i)), ca.row(perm[i])) < 1e-10);
  }
}

TEST_CASE("thread count does not change results") {
  const Dataset d = test::random_dataset(29, 70, 2);
  for (std::string tag : {"GWPR", "L-GWPR", "L-GWPRR_dev", "L-GWPR_loc"}) {
    ModelOptions o;
    o.threads = 1;
    const ModelFit a = run_model(d, tag, o);
    o.threads = 3;
    const ModelFit b = run_model(d, tag, o);
    CHECK(a.bandwidth == b.bandwidth);
    CHECK(a.delta == b.delta);
    CHECK(a.deviance == b.deviance);
    CHECK(test::max_abs_diff(a.coefficients(), b.coefficients()) == 0.0);
  }
}

TEST_CASE("selection trace and tie rules") {
  const Dataset d = test::random_dataset(30, 50, 2);
  LgwprConfig c = config_for_tag("L-GWPRR");
  const SelectionResult s = select(d, c);
  CHECK(s.trace.size() == static_cast<std::size_t>(s.evaluations) * default_delta_grid().size());
  for (const auto& e : s.trace)
    if (e.feasible) CHECK(e.criterion >= s.criterion);
  c.strategy = SelectionStrategy::nested;
  const SelectionResult n = select(d, c);
  CHECK(n.criterion <= s.criterion * (1.0 + 1e-6));
}

TEST_CASE("model menu and tags") {
  CHECK(model_menu().size() == 8);
  CHECK(canonical_tag("l-gwprr_DEV") == "L-GWPRR_dev");
  CHECK_THROWS_AS(canonical_tag("GWR"), InvalidArgument);
  for (const auto& t : model_menu())
    if (t != "PR" && t != "GWPR") CHECK(model_tag(config_for_tag(t)) == t);
}

TEST_CASE("significance correction and summaries") {
  const Dataset d = test::random_dataset(31, 60, 2);
  ModelOptions o;
  o.fixed_bandwidth = 0.5;
  const ModelFit f = run_model(d, "L-GWPR", o);
  const SignificanceTable s = significance(f, 0.05);
  const double want = std::clamp(0.05 * 3.0 / f.n_enp, 0.05 / 60.0, 0.05);
  CHECK(s.corrected_alpha == doctest::Approx(want));
  CHECK(s.z.rows() == 60);
  for (Eigen::Index i = 0; i < s.p.rows(); ++i)
    for (Eigen::Index j = 0; j < s.p.cols(); ++j) {
      CHECK(s.p(i, j) >= 0.0);
      CHECK(s.p(i, j) <= 1.0);
      CHECK(s.significant(i, j) == (s.p(i, j) < s.corrected_alpha));
    }
  const CoefficientSummary cs = coefficient_summary(f);
  CHECK(cs.table.rows() == 3);
  CHECK(cs.table(1, 0) <= cs.table(1, 2));
  CHECK(cs.table(1, 2) <= cs.table(1, 4));
}
