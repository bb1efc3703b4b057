#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/glm.hpp"
#include "lgwpr/gwpr.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/linalg.hpp"
#include "lgwpr/search.hpp"
#include "support.hpp"

using namespace lgwpr;

TEST_CASE("kernels are bounded, unit at zero and non-increasing") {
  for (auto family : {KernelFamily::gaussian, KernelFamily::bisquare})
    for (bool literal : {false, true}) {
      const KernelSpec k{family, 0.7, literal};
      CHECK(k.weight(0.0) == 1.0);
      double prev = 1.0;
      for (double d = 0.0; d < 3.0; d += 0.01) {
        const double w = k.weight(d);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        CHECK(w <= prev);
        prev = w;
      }
    }
  CHECK(KernelSpec{KernelFamily::bisquare, 1.0}.weight(1.0) == 0.0);
  CHECK(KernelSpec{KernelFamily::bisquare, 1.0}.weight(0.5) == doctest::Approx(0.5625));
  CHECK(KernelSpec{KernelFamily::bisquare, 1.0, true}.weight(0.5) == doctest::Approx(0.25));
  CHECK(KernelSpec{KernelFamily::gaussian, 2.0}.weight(2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(KernelSpec{KernelFamily::gaussian, 1e-3}.weight(10.0) == 0.0);
  CHECK_THROWS_AS(KernelSpec({KernelFamily::gaussian, 0.0}).check(), InvalidArgument);
  CHECK_THROWS_AS(KernelSpec({KernelFamily::gaussian, -1.0}).check(), InvalidArgument);
  CHECK(effective_bandwidth({KernelFamily::gaussian, 2.0}) == doctest::Approx(2.0 * std::sqrt(3.0)));
  CHECK(effective_bandwidth({KernelFamily::bisquare, 2.0}) == 2.0);
}

TEST_CASE("weights exclude the focal point on request") {
  const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  const KernelSpec k{KernelFamily::gaussian, 0.5};
  const Eigen::VectorXd all = weights(k, d, 2);
  const Eigen::VectorXd loo = weights(k, d, 2, true);
  CHECK(loo(2) == 0.0);
  for (int j : {0, 1, 3, 4}) CHECK(loo(j) == all(j));
}

TEST_CASE("geometry summaries") {
  Eigen::MatrixX2d c(3, 2);
  c << 0, 0, 3, 4, 0, 0;
  const Geometry g = Geometry::of(c);
  CHECK(g.diameter == 5.0);
  CHECK(g.min_nonzero == 5.0);
  CHECK(g.distances(0, 2) == 0.0);
}

TEST_CASE("deviance hand values and non-negativity") {
  CHECK(deviance_term(2.0, 1.0) == doctest::Approx(0.7726).epsilon(1e-4));
  CHECK(deviance_term(0.0, 1.0) == doctest::Approx(2.0));
  CHECK(deviance_term(3.0, 3.0) == doctest::Approx(0.0));
  for (double y : {0.0, 1.0, 5.0, 40.0})
    for (double l : {1e-3, 0.5, 1.0, 7.0, 100.0}) CHECK(deviance_term(y, l) >= 0.0);
  Eigen::VectorXd y(2), l(2);
  y << 2, 0;
  l << 1, 1;
  CHECK(deviance(y, l) == doctest::Approx(2.7726).epsilon(1e-4));
}

TEST_CASE("null deviance keeps the offset") {
  Eigen::MatrixX2d c = Eigen::MatrixX2d::Random(3, 2);
  Eigen::VectorXd y(3), o(3);
  y << 1, 2, 6;
  o << 1, 1, 2;
  const Dataset d = make_dataset(c, y, o, Eigen::MatrixXd::Random(3, 1));
  // λ = o * 9 / 4
  Eigen::VectorXd lam = o * 2.25;
  CHECK(null_deviance(d) == doctest::Approx(deviance(y, lam)));
  CHECK(pseudo_r2(1.0, 4.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(pseudo_r2(1.0, 0.0), DegenerateNullError);
}

TEST_CASE("zero ratio and linearized response") {
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  CHECK(zero_ratio(y) == doctest::Approx(1.0 / 3.0));
  const Dataset d = make_dataset(Eigen::MatrixX2d::Random(3, 2), y, Eigen::VectorXd(),
                                 Eigen::MatrixXd::Random(3, 1));
  const LinearizedResponse r = linearized_response(d, 1.0 / 3.0);
  CHECK(r.z(0) == doctest::Approx(std::log(0.5) - (1.0 + 0.5 / 3.0) / 0.5));
  CHECK(r.z(2) == doctest::Approx(std::log(2.5) - (1.0 + 0.5 / 3.0) / 2.5));
  CHECK(r.weights(1) == 1.5);
}

TEST_CASE("quantiles follow type 7") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile({7}, 0.3) == 7.0);
}

TEST_CASE("normal tail probabilities") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(two_sided_p(1.959963985) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(two_sided_p(-1.959963985) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("global IRLS matches the likelihood maximiser") {
  const Dataset d = test::random_dataset(11, 60, 2);
  const GlmFit g = fit_poisson_irls(d);
  REQUIRE(g.converged);
  // score X'(y - λ) vanishes
  const Eigen::VectorXd score = d.X.transpose() * (d.y - g.lambda);
  CHECK(score.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(test::is_psd(g.covariance));
  CHECK(g.deviance >= 0.0);
  CHECK(g.deviance <= g.null_deviance);
}

TEST_CASE("linearized global fit is one scoring step from the WLS start") {
  const Dataset d = test::random_dataset(12, 80, 2);
  const GlmFit lin = fit_poisson_linearized(d);
  const LinearizedResponse r = linearized_response(d, zero_ratio(d.y));
  const Eigen::MatrixXd A = r.weights.asDiagonal();
  const Eigen::VectorXd start =
      (d.X.transpose() * A * d.X).ldlt().solve(d.X.transpose() * A * r.z);
  const Eigen::VectorXd step = irls_update(d, Eigen::VectorXd::Ones(d.n()), start);
  CHECK(test::max_abs_diff(lin.beta, step) < 1e-10);
}

TEST_CASE("local IRLS agrees with a dense likelihood grid") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = test::random_dataset(100 + seed, 15, 1, 1.2);
    const KernelSpec k{KernelFamily::gaussian, 0.6};
    for (Eigen::Index focal : {0, 7, 14}) {
      const LocalFit lf = fit_local_irls(d, k, focal, irls_start(d));
      Eigen::VectorXd w(d.n());
      for (Eigen::Index j = 0; j < d.n(); ++j)
        w(j) = k.weight((d.coords.row(j) - d.coords.row(focal)).norm());
      const Eigen::Vector2d grid = test::grid_maximise(d, w, Eigen::Vector2d::Zero(), 8.0);
      CHECK(test::max_abs_diff(lf.beta, grid) < 1e-4);
    }
  }
}

TEST_CASE("identification pre-check rejects designs without positive support") {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(10);
  y(3) = 2;
  const Dataset d = make_dataset(Eigen::MatrixX2d::Random(10, 2), y, Eigen::VectorXd(),
                                 Eigen::MatrixXd::Random(10, 2));
  const IdentificationReport rep = check_identification(d);
  CHECK_FALSE(rep.identifiable_necessary);
  CHECK(rep.n_positive == 1);
  CHECK(rep.n_parameters == 3);
  CHECK_THROWS_AS(fit_poisson_irls(d), SingularSystemError);
}

TEST_CASE("rank-deficient systems are reported, ridge restores them") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  CHECK_FALSE(linalg::spd_inverse(m, 2.0).has_value());
  CHECK_FALSE(linalg::ridge_inverse(m, 0.0, 2.0).has_value());
  const auto inv = linalg::ridge_inverse(m, 0.5, 2.0);
  REQUIRE(inv.has_value());
  const Eigen::MatrixXd expect = (m + 0.5 * Eigen::MatrixXd::Identity(2, 2)).inverse();
  CHECK(test::max_abs_diff(*inv, expect) < 1e-12);
  CHECK(linalg::rank(m) == 1);
}

TEST_CASE("golden section and scanned search") {
  auto f = [](double x) { return (x - 1.3) * (x - 1.3); };
  const GoldenResult g = golden_section(f, 0.0, 4.0, 1e-6);
  CHECK(g.x == doctest::Approx(1.3).epsilon(1e-5));
  // two basins; the narrow deep one at 0.1 must win
  auto h = [](double x) {
    return std::min(1.0 + (x - 3.0) * (x - 3.0), 50.0 * std::pow(std::log(x / 0.1), 2));
  };
  const GoldenResult s = scan_then_golden(h, 0.01, 5.0, 1e-4);
  CHECK(s.x == doctest::Approx(0.1).epsilon(1e-3));
  const GoldenResult t = scan_then_golden(f, 0.01, 5.0, 1e-4);
  CHECK(s.evaluations == t.evaluations);
  auto inf = [](double) { return std::numeric_limits<double>::infinity(); };
  CHECK(std::isinf(scan_then_golden(inf, 0.1, 1.0, 1e-3).fx));
  CHECK_THROWS_AS(scan_then_golden(f, 0.0, 1.0, 1e-3), InvalidArgument);
}

TEST_CASE("AICc") {
  CHECK(aicc(10.0, 2.0, 20.0) == doctest::Approx(10.0 + 4.0 + 12.0 / 17.0));
  CHECK(std::isinf(aicc(10.0, 19.0, 20.0)));
}
