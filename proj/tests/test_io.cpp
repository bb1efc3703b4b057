#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lgwpr/csv.hpp"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/fit_export.hpp"
#include "lgwpr/models.hpp"
#include "lgwpr/simulate.hpp"
#include "support.hpp"

using namespace lgwpr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lgwpr_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("csv parsing handles quotes and reports bad cells") {
  std::istringstream in("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n2,3\n");
  const csv::Table t = csv::parse(in);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x,1");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), ValidationError);
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::format(std::nan("")) == "NA");
  try {
    csv::to_double("abc", 4, 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
    CHECK(e.column() == 2);
  }
}

TEST_CASE("dataset round trip is lossless") {
  Dataset d = test::random_dataset(41, 25, 3);
  const fs::path p = scratch("round.csv");
  write_dataset(d, p);
  Schema s;
  s.offset_column = "offset";
  s.id_column = "id";
  const Dataset back = read_dataset(p, s);
  CHECK(back.n() == d.n());
  CHECK(back.p() == d.p());
  CHECK(test::max_abs_diff(back.X, d.X) == 0.0);
  CHECK(test::max_abs_diff(back.coords, d.coords) == 0.0);
  CHECK(test::max_abs_diff(back.offset, d.offset) == 0.0);
  CHECK(back.y == d.y);
}

TEST_CASE("dataset validation names the row") {
  const fs::path p = scratch("bad.csv");
  write_text(p, "x,y,count,v\n0,0,1,2\n1,1,-3,2\n");
  try {
    read_dataset(p, Schema{});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.row() == 1);
  }
  write_text(p, "x,y,count,v\n0,0,1.5,2\n");
  CHECK_THROWS_AS(read_dataset(p, Schema{}), ValidationError);
  write_text(p, "x,y,count,v\n0,0,1,abc\n");
  CHECK_THROWS_AS(read_dataset(p, Schema{}), ParseError);
  CHECK_THROWS_AS(read_dataset(scratch("missing.csv"), Schema{}), IoError);
}

TEST_CASE("covariate selection and standardisation") {
  const fs::path p = scratch("cols.csv");
  write_text(p, "x,y,count,a,b,c\n0,0,1,1,5,9\n1,0,2,2,6,9\n0,1,0,3,8,9\n");
  Schema s;
  s.covariates = {"b", "a"};
  s.standardize = true;
  const Dataset d = read_dataset(p, s);
  CHECK(d.covariate_names == std::vector<std::string>{"(Intercept)", "b", "a"});
  CHECK(d.X.col(1).mean() == doctest::Approx(0.0));
  const double sd = std::sqrt((d.X.col(2).array() - d.X.col(2).mean()).square().sum() / 2.0);
  CHECK(sd == doctest::Approx(1.0));
}

TEST_CASE("fit export round trip") {
  const Dataset d = test::random_dataset(42, 30, 2);
  ModelOptions o;
  o.fixed_bandwidth = 0.5;
  const ModelFit f = run_model(d, "L-GWPRR", o);
  const SignificanceTable s = significance(f);
  const fs::path p = scratch("fit.csv");
  write_fit(f, d, s, p);
  const FitTable t = read_fit(p);
  CHECK(t.ids.size() == 30);
  CHECK(t.names.size() == 3);
  CHECK(test::max_abs_diff(t.beta, f.coefficients()) < 1e-8);
  CHECK(test::max_abs_diff(t.coords, d.coords) < 1e-8);
  for (std::size_t i = 0; i < t.pflag.size(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK((t.pflag[i][static_cast<std::size_t>(j)] == 'T') ==
            s.significant(static_cast<Eigen::Index>(i), j));

  const ModelFit pr = run_model(d, "PR");
  write_fit(pr, d, significance(pr), p);
  const FitTable g = read_fit(p);
  REQUIRE(g.ids.size() == 1);
  CHECK(g.ids[0] == "global");
  for (auto fn : {write_summary, write_significance})
    CHECK_NOTHROW(fn(f, d, s, scratch("x.csv")));
  CHECK_NOTHROW(write_trace(f, scratch("trace.csv")));
  CHECK_NOTHROW(write_coefficient_summary(f, d, scratch("cs.csv")));
}

TEST_CASE("scenario files") {
  std::istringstream in(
      "# defaults\nreplicates = 7\nn = 120\n"
      "[low]\nmu0 = -1\nrange = 0.5\n"
      "[high]\nmu0 = 2\nmodels = GWPR, L-GWPRR\nseed = 9\n");
  const auto s = parse_scenarios(in);
  REQUIRE(s.size() == 2);
  CHECK(s[0].name == "low");
  CHECK(s[0].coef_means[0] == -1.0);
  CHECK(s[0].range == 0.5);
  CHECK(s[0].replicates == 7);
  CHECK(s[1].n == 120);
  CHECK(s[1].seed == 9);
  CHECK(s[1].models == std::vector<std::string>{"GWPR", "L-GWPRR"});

  std::istringstream bad("n = 100\nfoo = 3\n");
  try {
    parse_scenarios(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream neg("n = -4\n");
  CHECK_THROWS_AS(parse_scenarios(neg), ValidationError);
  CHECK(full_grid(Scenario{}).size() == 18);
}
