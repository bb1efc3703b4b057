#include <cmath>

#include "doctest.h"
#include "lgwpr/simulate.hpp"
#include "support.hpp"

using namespace lgwpr;

TEST_CASE("metrics hand case") {
  Eigen::MatrixXd est(4, 1), truth(4, 1);
  est << 2, 3, 5, 4;
  truth << 1, 2, 3, 4;
  const auto m = metrics(est, truth);
  REQUIRE(m.size() == 1);
  CHECK(m[0].rmse == doctest::Approx(std::sqrt(6.0) / 2.0));
  CHECK(m[0].bias == doctest::Approx(1.0));
  CHECK(m[0].sd_true == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m[0].cc == doctest::Approx(0.8));

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 1, 2.0);
  const auto c = metrics(flat, truth);
  CHECK(std::isnan(c[0].cc));
  CHECK(c[0].sd_est == 0.0);
}

TEST_CASE("replicates are pure functions of (scenario, index)") {
  Scenario s;
  s.n = 80;
  const Replicate a = generate_replicate(s, 3);
  const Replicate b = generate_replicate(s, 3);
  const Replicate c = generate_replicate(s, 4);
  CHECK(a.data.y == b.data.y);
  CHECK(test::max_abs_diff(a.beta, b.beta) == 0.0);
  CHECK(a.data.y != c.data.y);
  CHECK(replicate_seed(1, 0) != replicate_seed(1, 1));
  CHECK(replicate_seed(1, 0) != replicate_seed(2, 0));
  CHECK(a.data.coords.cwiseAbs().maxCoeff() <= 2.0);
  CHECK(a.data.offset.isOnes());
}

TEST_CASE("true fields have the requested moments") {
  Scenario s;
  s.n = 2000;
  const Replicate r = generate_replicate(s, 0);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Eigen::ArrayXd col = r.beta.col(j).array();
    const double mean = col.mean();
    const double sd = std::sqrt((col - mean).square().sum() / (col.size() - 1));
    CHECK(mean == doctest::Approx(s.coef_means[static_cast<std::size_t>(j)]).epsilon(1e-9));
    CHECK(sd == doctest::Approx(s.coef_sds[static_cast<std::size_t>(j)]).epsilon(1e-9));
  }
}

TEST_CASE("sweeps are identical for any worker count") {
  Scenario s;
  s.n = 60;
  s.replicates = 4;
  s.models = {"PR", "L-GWPR", "L-GWPRR"};
  SweepOptions o;
  o.threads = 1;
  const SweepResult a = run_sweep({s}, o);
  o.threads = 3;
  const SweepResult b = run_sweep({s}, o);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.records.size() == 4u * 3u * 2u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].replicate == b.records[i].replicate);
    CHECK(a.records[i].model == b.records[i].model);
    CHECK(a.records[i].m.rmse == b.records[i].m.rmse);
    const double ba = a.records[i].bandwidth, bb = b.records[i].bandwidth;
    CHECK((ba == bb || (std::isnan(ba) && std::isnan(bb))));
  }
  REQUIRE(a.summary.size() == 6);
  CHECK(a.summary[0].model == "PR");
  CHECK(std::isnan(a.summary[0].cc.median));
}

TEST_CASE("summaries skip NaN and count failures") {
  std::vector<ReplicateRecord> recs(3);
  for (int i = 0; i < 3; ++i) {
    recs[i].scenario = "s";
    recs[i].model = "M";
    recs[i].coefficient = 1;
    recs[i].replicate = i;
    recs[i].m.rmse = i + 1.0;
    recs[i].m.cc = i == 1 ? std::nan("") : 0.5;
  }
  recs[2].failed = true;
  recs[2].m.rmse = std::nan("");
  recs[2].m.cc = std::nan("");
  const auto rows = summarize(recs);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].replicates == 3);
  CHECK(rows[0].failures == 1);
  CHECK(rows[0].rmse.median == doctest::Approx(1.5));
  CHECK(rows[0].cc.median == doctest::Approx(0.5));
}
