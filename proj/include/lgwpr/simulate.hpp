#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/models.hpp"

namespace lgwpr {

/// One Monte Carlo design point: coordinates uniform on [-2, 2]^2, three
/// spatially smoothed coefficient fields and Poisson counts with offset 1.
struct Scenario {
  std::string name = "default";
  Eigen::Index n = 500;
  /// Range of the smoothing kernel exp(-d^2 / r^2) behind the true fields.
  double range = 1.0;
  /// Field means; the first entry is the intercept mean.
  std::vector<double> coef_means{2.0, 2.0, -0.5};
  /// Field standard deviations; zero gives a constant field.
  std::vector<double> coef_sds{1.0, 2.0, 1.0};
  int replicates = 200;
  std::uint64_t seed = 1;
  KernelFamily kernel = KernelFamily::gaussian;
  std::vector<std::string> models{"PR", "GWPR", "L-GWPR", "L-GWPRR"};

  /// Throws ValidationError.
  void check() const;
};

/// Independent 64-bit seed for replicate `index`; does not depend on any
/// other replicate.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

struct Replicate {
  Dataset data;
  /// n x 3 true coefficients.
  Eigen::MatrixXd beta;
};

/// Pure function of (scenario, index).
Replicate generate_replicate(const Scenario& scenario, std::uint64_t index);

struct CoefficientMetrics {
  double cc = 0.0;  // NaN when either column is constant
  double rmse = 0.0;
  double bias = 0.0;
  double sd_est = 0.0;
  double sd_true = 0.0;
};

/// Column-wise accuracy of estimated against true coefficients. SDs use the
/// n - 1 denominator.
std::vector<CoefficientMetrics> metrics(const Eigen::MatrixXd& estimated,
                                        const Eigen::MatrixXd& truth);

/// One archive row: a model's accuracy on one coefficient of one replicate.
struct ReplicateRecord {
  std::string scenario;
  int replicate = 0;
  std::string model;
  int coefficient = 0;
  CoefficientMetrics m;
  double bandwidth = 0.0;
  double delta = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string reason;
};

/// Distribution of one metric over replicates.
struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct SummaryRow {
  std::string scenario;
  std::string model;
  int coefficient = 0;
  int replicates = 0;
  int failures = 0;
  Quartiles cc;
  Quartiles rmse;
  Quartiles bias;
  /// |SD_est - SD_true|.
  Quartiles sd_gap;
};

struct SweepOptions {
  ModelOptions model;
  /// Workers over replicates; each model fit runs single-threaded.
  unsigned threads = 1;
  /// Coefficients entering the archive; the slopes by default.
  std::vector<int> coefficients{1, 2};
  /// Called after each finished replicate, from the worker thread.
  std::function<void(const std::string& scenario, int replicate)> progress;
};

struct SweepResult {
  std::vector<ReplicateRecord> records;
  std::vector<SummaryRow> summary;
};

/// Runs every model of every scenario on every replicate. Model failures are
/// recorded rather than thrown.
SweepResult run_sweep(const std::vector<Scenario>& scenarios,
                      const SweepOptions& options = {});

/// Median over replicates, NaN entries skipped.
std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records);

struct BenchRow {
  std::string model;
  Eigen::Index n = 0;
  int repeats = 0;
  int failures = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
};

struct BenchOptions {
  std::vector<Eigen::Index> sizes{50, 200, 500, 1000, 2000};
  std::vector<std::string> models{"GWPR", "L-GWPR", "L-GWPRR"};
  int repeats = 3;
  std::uint64_t seed = 1;
  /// Data come from this design with n overridden.
  Scenario design;
  ModelOptions model;

  BenchOptions() { model.gwpr_search = BandwidthSearch::golden; }
};

/// Wall-clock seconds of run_model per (model, n), median over repeats.
std::vector<BenchRow> bench(const BenchOptions& options);

/// Key-value scenario files:
///
///   # comment
///   replicates = 20
///   [few_zero]
///   mu0 = 2
///
/// Keys before the first section are defaults for every section; a file
/// without sections describes one scenario. Keys: name, n, mu0, range,
/// replicates, seed, kernel, models, coef_means, coef_sds (lists are comma
/// separated). Throws ValidationError naming the line.
std::vector<Scenario> parse_scenarios(std::istream& in);
std::vector<Scenario> read_scenarios(const std::filesystem::path& path);

/// The full design: mu0 in {-1, 2} x range in {0.5, 1, 2} x n in
/// {200, 500, 2000}, other fields from `base`.
std::vector<Scenario> full_grid(const Scenario& base);

void write_records(const std::vector<ReplicateRecord>& records,
                   const std::filesystem::path& path);
/// write_records leaves out wall-clock seconds so archives are byte
/// reproducible; they go here, one row per (replicate, model).
void write_timings(const std::vector<ReplicateRecord>& records,
                   const std::filesystem::path& path);
void write_summary(const std::vector<SummaryRow>& rows,
                   const std::filesystem::path& path);
void write_bench(const std::vector<BenchRow>& rows,
                 const std::filesystem::path& path);

}  // namespace lgwpr
