#include "lgwpr/simulate.hpp"

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "lgwpr/csv.hpp"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/error.hpp"
#include "lgwpr/parallel.hpp"

namespace lgwpr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double sample_sd(const Eigen::VectorXd& v) {
  if (v.size() < 2 || (v.array() == v(0)).all()) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size() - 1));
}

Quartiles quartiles(const std::vector<double>& values) {
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) return {kNaN, kNaN, kNaN};
  return {quantile(finite, 0.25), quantile(finite, 0.5), quantile(finite, 0.75)};
}

std::string coefficient_label(int k) { return "beta" + std::to_string(k); }

}  // namespace

void Scenario::check() const {
  if (n < 2) throw ValidationError("scenario '" + name + "': n must be >= 2");
  if (!(range > 0) || !std::isfinite(range))
    throw ValidationError("scenario '" + name + "': range must be positive");
  if (coef_means.size() != 3 || coef_sds.size() != 3)
    throw ValidationError("scenario '" + name +
                          "': coef_means and coef_sds need three entries");
  for (double s : coef_sds)
    if (!(s >= 0) || !std::isfinite(s))
      throw ValidationError("scenario '" + name + "': coef_sds must be >= 0");
  for (double m : coef_means)
    if (!std::isfinite(m))
      throw ValidationError("scenario '" + name + "': coef_means must be finite");
  if (replicates < 1)
    throw ValidationError("scenario '" + name + "': replicates must be >= 1");
  if (models.empty())
    throw ValidationError("scenario '" + name + "': model list is empty");
  for (const auto& m : models) {
    try {
      canonical_tag(m);
    } catch (const InvalidArgument& e) {
      throw ValidationError("scenario '" + name + "': " + e.what());
    }
  }
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

Replicate generate_replicate(const Scenario& scenario, std::uint64_t index) {
  scenario.check();
  const Eigen::Index n = scenario.n;
  boost::random::mt19937_64 rng(replicate_seed(scenario.seed, index));
  boost::random::uniform_real_distribution<double> unif(-2.0, 2.0);
  boost::random::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixX2d coords(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    coords(i, 0) = unif(rng);
    coords(i, 1) = unif(rng);
  }
  Eigen::MatrixXd u(n, 3);
  for (Eigen::Index k = 0; k < 3; ++k)
    for (Eigen::Index j = 0; j < n; ++j) u(j, k) = normal(rng);
  Eigen::MatrixXd x(n, 2);
  for (Eigen::Index k = 0; k < 2; ++k)
    for (Eigen::Index i = 0; i < n; ++i) x(i, k) = normal(rng);

  const double r2 = scenario.range * scenario.range;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = coords(i, 0) - coords(j, 0);
      const double dy = coords(i, 1) - coords(j, 1);
      g(i, j) = std::exp(-(dx * dx + dy * dy) / r2);
    }
  const Eigen::VectorXd rowsum = g.rowwise().sum();
  Eigen::MatrixXd smooth = g * u;
  smooth.array().colwise() /= rowsum.array();

  Replicate rep;
  rep.beta.resize(n, 3);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const Eigen::VectorXd col = smooth.col(k);
    const double sd = sample_sd(col);
    const double mean = col.mean();
    const auto ku = static_cast<std::size_t>(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double standard = sd > 0 ? (col(i) - mean) / sd : 0.0;
      rep.beta(i, k) = scenario.coef_means[ku] + scenario.coef_sds[ku] * standard;
    }
  }

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = std::exp(rep.beta(i, 0) + x(i, 0) * rep.beta(i, 1) +
                               x(i, 1) * rep.beta(i, 2));
    boost::random::poisson_distribution<long long, double> pois(mu);
    y(i) = static_cast<double>(pois(rng));
  }
  rep.data = make_dataset(std::move(coords), std::move(y),
                          Eigen::VectorXd::Ones(n), x, {"x1", "x2"});
  return rep;
}

std::vector<CoefficientMetrics> metrics(const Eigen::MatrixXd& estimated,
                                        const Eigen::MatrixXd& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols())
    throw InvalidArgument("estimated and true coefficients differ in shape");
  const auto n = static_cast<double>(truth.rows());
  std::vector<CoefficientMetrics> out;
  for (Eigen::Index k = 0; k < truth.cols(); ++k) {
    const Eigen::VectorXd e = estimated.col(k);
    const Eigen::VectorXd t = truth.col(k);
    const Eigen::VectorXd d = e - t;
    CoefficientMetrics m;
    m.rmse = std::sqrt(d.squaredNorm() / n);
    m.bias = d.mean();
    m.sd_est = sample_sd(e);
    m.sd_true = sample_sd(t);
    if (m.sd_est > 0 && m.sd_true > 0) {
      const double cov = ((e.array() - e.mean()) * (t.array() - t.mean())).sum() /
                         (n - 1.0);
      m.cc = std::clamp(cov / (m.sd_est * m.sd_true), -1.0, 1.0);
    } else {
      m.cc = kNaN;
    }
    out.push_back(m);
  }
  return out;
}

SweepResult run_sweep(const std::vector<Scenario>& scenarios,
                      const SweepOptions& options) {
  for (const auto& s : scenarios) s.check();
  struct Job {
    std::size_t scenario;
    int replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    for (int r = 0; r < scenarios[s].replicates; ++r) jobs.push_back({s, r});

  std::vector<std::vector<ReplicateRecord>> out(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
    const Scenario& sc = scenarios[jobs[j].scenario];
    const int r = jobs[j].replicate;
    const Replicate rep = generate_replicate(sc, static_cast<std::uint64_t>(r));
    ModelOptions mo = options.model;
    mo.family = sc.kernel;
    mo.threads = 1;
    for (const auto& model : sc.models) {
      ReplicateRecord base;
      base.scenario = sc.name;
      base.replicate = r;
      base.model = canonical_tag(model);
      std::vector<CoefficientMetrics> mets;
      const auto start = std::chrono::steady_clock::now();
      try {
        const ModelFit fit = run_model(rep.data, model, mo);
        const Eigen::MatrixXd est = fit.coefficients_per_sample();
        if (!est.allFinite()) {
          base.failed = true;
          base.reason = "non-finite coefficient estimates";
        } else {
          mets = metrics(est, rep.beta);
        }
        base.bandwidth = fit.bandwidth;
        base.delta = fit.delta;
      } catch (const std::exception& e) {
        base.failed = true;
        base.reason = e.what();
        base.bandwidth = kNaN;
        base.delta = kNaN;
      }
      base.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      if (const auto nl = base.reason.find('\n'); nl != std::string::npos)
        base.reason.resize(nl);
      for (int k : options.coefficients) {
        ReplicateRecord rec = base;
        rec.coefficient = k;
        if (base.failed)
          rec.m = {kNaN, kNaN, kNaN, kNaN, kNaN};
        else
          rec.m = mets.at(static_cast<std::size_t>(k));
        out[j].push_back(std::move(rec));
      }
    }
    if (options.progress) options.progress(sc.name, r);
  });

  SweepResult result;
  for (auto& v : out)
    for (auto& rec : v) result.records.push_back(std::move(rec));
  result.summary = summarize(result.records);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records) {
  using Key = std::tuple<std::string, std::string, int>;
  struct Acc {
    int replicates = 0, failures = 0;
    std::vector<double> cc, rmse, bias, gap;
  };
  std::vector<Key> order;
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    const Key key{r.scenario, r.model, r.coefficient};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Acc& a = it->second;
    ++a.replicates;
    if (r.failed) {
      ++a.failures;
      continue;
    }
    a.cc.push_back(r.m.cc);
    a.rmse.push_back(r.m.rmse);
    a.bias.push_back(r.m.bias);
    a.gap.push_back(std::abs(r.m.sd_est - r.m.sd_true));
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const Acc& a = groups.at(key);
    SummaryRow row;
    std::tie(row.scenario, row.model, row.coefficient) = key;
    row.replicates = a.replicates;
    row.failures = a.failures;
    row.cc = quartiles(a.cc);
    row.rmse = quartiles(a.rmse);
    row.bias = quartiles(a.bias);
    row.sd_gap = quartiles(a.gap);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BenchRow> bench(const BenchOptions& options) {
  if (options.repeats < 1) throw InvalidArgument("bench needs repeats >= 1");
  std::vector<BenchRow> rows;
  for (Eigen::Index n : options.sizes) {
    if (n < 2) throw InvalidArgument("bench sizes must be >= 2");
    Scenario design = options.design;
    design.n = n;
    design.seed = options.seed;
    std::vector<std::vector<double>> times(options.models.size());
    std::vector<int> failures(options.models.size(), 0);
    for (int r = 0; r < options.repeats; ++r) {
      const Replicate rep = generate_replicate(design, static_cast<std::uint64_t>(r));
      for (std::size_t m = 0; m < options.models.size(); ++m) {
        const auto start = std::chrono::steady_clock::now();
        try {
          run_model(rep.data, options.models[m], options.model);
        } catch (const Error&) {
          ++failures[m];
        }
        times[m].push_back(std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count());
      }
    }
    for (std::size_t m = 0; m < options.models.size(); ++m) {
      BenchRow row;
      row.model = canonical_tag(options.models[m]);
      row.n = n;
      row.repeats = options.repeats;
      row.failures = failures[m];
      row.median_seconds = quantile(times[m], 0.5);
      row.min_seconds = *std::min_element(times[m].begin(), times[m].end());
      row.max_seconds = *std::max_element(times[m].begin(), times[m].end());
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<Scenario> full_grid(const Scenario& base) {
  std::vector<Scenario> grid;
  for (double mu0 : {-1.0, 2.0})
    for (double range : {0.5, 1.0, 2.0})
      for (Eigen::Index n : {200, 500, 2000}) {
        Scenario s = base;
        s.coef_means[0] = mu0;
        s.range = range;
        s.n = n;
        s.name = "mu0=" + csv::format(mu0) + ",r=" + csv::format(range) +
                 ",n=" + std::to_string(n);
        grid.push_back(std::move(s));
      }
  return grid;
}

void write_records(const std::vector<ReplicateRecord>& records,
                   const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"scenario", "replicate", "model", "coefficient", "cc", "rmse", "bias",
         "sd_est", "sd_true", "bandwidth", "delta", "failed", "reason"});
  for (const auto& r : records)
    w.row({r.scenario, std::to_string(r.replicate), r.model,
           coefficient_label(r.coefficient), csv::format(r.m.cc),
           csv::format(r.m.rmse), csv::format(r.m.bias), csv::format(r.m.sd_est),
           csv::format(r.m.sd_true), csv::format(r.bandwidth),
           csv::format(r.delta), r.failed ? "1" : "0", r.reason});
  w.close();
}

void write_timings(const std::vector<ReplicateRecord>& records,
                   const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"scenario", "replicate", "model", "seconds"});
  const ReplicateRecord* prev = nullptr;
  for (const auto& r : records) {
    if (prev && prev->scenario == r.scenario && prev->replicate == r.replicate &&
        prev->model == r.model)
      continue;
    w.row({r.scenario, std::to_string(r.replicate), r.model, csv::format(r.seconds)});
    prev = &r;
  }
  w.close();
}

void write_summary(const std::vector<SummaryRow>& rows,
                   const std::filesystem::path& path) {
  csv::Writer w(path);
  std::vector<std::string> header{"scenario", "model", "coefficient",
                                  "replicates", "failures", "failure_rate"};
  for (const char* metric : {"cc", "rmse", "bias", "sd_gap"})
    for (const char* q : {"q1", "median", "q3"})
      header.push_back(std::string(metric) + "_" + q);
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{
        r.scenario, r.model, coefficient_label(r.coefficient),
        std::to_string(r.replicates), std::to_string(r.failures),
        csv::format(static_cast<double>(r.failures) / r.replicates)};
    for (const Quartiles* q : {&r.cc, &r.rmse, &r.bias, &r.sd_gap}) {
      f.push_back(csv::format(q->q1));
      f.push_back(csv::format(q->median));
      f.push_back(csv::format(q->q3));
    }
    w.row(f);
  }
  w.close();
}

void write_bench(const std::vector<BenchRow>& rows,
                 const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"model", "n", "repeats", "failures", "median_seconds", "min_seconds",
         "max_seconds"});
  for (const auto& r : rows)
    w.row({r.model, std::to_string(r.n), std::to_string(r.repeats),
           std::to_string(r.failures), csv::format(r.median_seconds),
           csv::format(r.min_seconds), csv::format(r.max_seconds)});
  w.close();
}

}  // namespace lgwpr
