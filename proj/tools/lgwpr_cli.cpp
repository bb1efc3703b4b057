// Command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lgwpr/lgwpr.h"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kFitFailure = 2;
constexpr int kUsage = 64;
constexpr int kInternal = 70;
constexpr int kIo = 74;

int exit_code(lgwpr_status s) {
  switch (s) {
    case LGWPR_OK: return kOk;
    case LGWPR_E_VALIDATION:
    case LGWPR_E_PARSE: return kValidation;
    case LGWPR_E_INVALID_ARGUMENT: return kUsage;
    case LGWPR_E_IO: return kIo;
    case LGWPR_E_SINGULAR:
    case LGWPR_E_DIVERGENCE:
    case LGWPR_E_DEGREES_OF_FREEDOM:
    case LGWPR_E_DEGENERATE_NULL:
    case LGWPR_E_FIT_FAILURE:
    case LGWPR_E_SELECTION_FAILURE: return kFitFailure;
    case LGWPR_E_INTERNAL: return kInternal;
  }
  return kInternal;
}

int report(lgwpr_status s) {
  std::cerr << "lgwpr: " << lgwpr_status_name(s) << ": " << lgwpr_last_error() << "\n";
  return exit_code(s);
}

unsigned default_threads() {
  if (const char* env = std::getenv("LGWPR_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "lgwpr: ignoring malformed LGWPR_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::optional<int> prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "lgwpr: cannot create " << dir << ": " << ec.message() << "\n";
    return kIo;
  }
  return std::nullopt;
}

int write_manifest(const std::filesystem::path& dir, const nlohmann::json& m) {
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.dump() << "\n";
  if (!out) {
    std::cerr << "lgwpr: cannot write " << (dir / "manifest.json") << "\n";
    return kIo;
  }
  return kOk;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ",") + i;
  return s;
}

struct FitArgs {
  std::string data;
  std::string x = "x", y = "y", count = "count";
  std::string offset, id;
  std::vector<std::string> covariates;
  bool standardize = false;
  std::string model = "L-GWPRR";
  std::string kernel = "gaussian";
  bool literal_bisquare = false;
  std::string bandwidth = "search";
  std::string criterion, ridge, psi;
  double alpha = 0.05;
  bool quasi = false;
  std::string gwpr_search = "grid";
  std::vector<double> bandwidth_grid, delta_grid;
  std::string mean = "focal";
  std::string selection = "profile";
  double search_lo = 0, search_hi = 0, search_tol = 0;
  long long seed = 1;
  unsigned threads = 0;
  std::string out = "out";
};

// Folds --criterion/--ridge/--psi into a linearised-model tag.
std::string resolve_model(const FitArgs& a) {
  if (a.criterion.empty() && a.ridge.empty() && a.psi.empty()) return a.model;
  std::string base = a.model;
  for (auto& c : base) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (base.rfind("L-GWPR", 0) != 0)
    throw CLI::ValidationError("--criterion/--ridge/--psi apply to the L-GWPR family only");
  bool ridge = base.rfind("L-GWPRR", 0) == 0;
  bool dev = base.find("_DEV") != std::string::npos;
  bool loc = base.find("_LOC") != std::string::npos;
  if (!a.ridge.empty()) ridge = a.ridge == "search";
  if (!a.criterion.empty()) dev = a.criterion == "deviance";
  if (!a.psi.empty()) loc = a.psi == "local";
  std::string tag = ridge ? "L-GWPRR" : "L-GWPR";
  if (dev) tag += "_dev";
  if (loc) tag += "_loc";
  return tag;
}

int cmd_fit(const FitArgs& a, const std::vector<std::string>& argv) {
  std::string model;
  try {
    model = resolve_model(a);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "lgwpr: " << e.what() << "\n";
    return kUsage;
  }
  double bandwidth = 0.0;
  if (a.bandwidth != "search") {
    try {
      std::size_t used = 0;
      bandwidth = std::stod(a.bandwidth, &used);
      if (used != a.bandwidth.size() || !(bandwidth > 0)) throw std::invalid_argument("");
    } catch (const std::exception&) {
      std::cerr << "lgwpr: --bandwidth expects 'search' or a positive number\n";
      return kUsage;
    }
  }

  lgwpr_schema schema;
  lgwpr_schema_init(&schema);
  schema.x_column = a.x.c_str();
  schema.y_column = a.y.c_str();
  schema.count_column = a.count.c_str();
  schema.offset_column = a.offset.empty() ? nullptr : a.offset.c_str();
  schema.id_column = a.id.empty() ? nullptr : a.id.c_str();
  const std::string covariates = join(a.covariates);
  schema.covariates = covariates.empty() ? nullptr : covariates.c_str();
  schema.standardize = a.standardize;

  lgwpr_dataset* data = nullptr;
  if (auto s = lgwpr_dataset_read(a.data.c_str(), &schema, &data); s != LGWPR_OK)
    return report(s);

  lgwpr_fit_options o;
  lgwpr_fit_options_init(&o);
  o.model = model.c_str();
  o.kernel = a.kernel.c_str();
  o.literal_bisquare = a.literal_bisquare;
  o.bandwidth = bandwidth;
  o.quasi = a.quasi;
  o.gwpr_golden = a.gwpr_search == "golden";
  o.bandwidth_grid = a.bandwidth_grid.data();
  o.bandwidth_grid_length = a.bandwidth_grid.size();
  o.delta_grid = a.delta_grid.data();
  o.delta_grid_length = a.delta_grid.size();
  o.mean_own = a.mean == "own";
  o.nested_search = a.selection == "nested";
  o.search_lo = a.search_lo;
  o.search_hi = a.search_hi;
  o.search_tol = a.search_tol;
  o.alpha = a.alpha;
  o.threads = a.threads;

  lgwpr_fit* fit = nullptr;
  const lgwpr_status s = lgwpr_fit_run(data, &o, &fit);
  const std::size_t n = lgwpr_dataset_n(data);
  lgwpr_dataset_free(data);
  if (s != LGWPR_OK) return report(s);

  const std::filesystem::path dir = std::filesystem::path(a.out) / "fit";
  if (auto rc = prepare_dir(dir)) {
    lgwpr_fit_free(fit);
    return *rc;
  }
  if (auto w = lgwpr_fit_write(fit, dir.string().c_str()); w != LGWPR_OK) {
    lgwpr_fit_free(fit);
    return report(w);
  }
  lgwpr_fit_summary sum;
  lgwpr_fit_get_summary(fit, &sum);
  lgwpr_fit_free(fit);

  nlohmann::json m;
  m["command"] = "fit";
  m["version"] = lgwpr_version();
  m["argv"] = argv;
  m["config"] = {{"data", a.data},
                 {"schema",
                  {{"x", a.x},
                   {"y", a.y},
                   {"count", a.count},
                   {"offset", a.offset.empty() ? nlohmann::json(nullptr) : nlohmann::json(a.offset)},
                   {"id", a.id.empty() ? nlohmann::json(nullptr) : nlohmann::json(a.id)},
                   {"covariates", a.covariates},
                   {"standardize", a.standardize}}},
                 {"model", sum.model},
                 {"kernel", a.kernel},
                 {"literal_bisquare", a.literal_bisquare},
                 {"bandwidth", a.bandwidth},
                 {"alpha", a.alpha},
                 {"quasi", a.quasi},
                 {"gwpr_search", a.gwpr_search},
                 {"bandwidth_grid", a.bandwidth_grid},
                 {"delta_grid", a.delta_grid},
                 {"mean", a.mean},
                 {"selection", a.selection},
                 {"search_lo", a.search_lo},
                 {"search_hi", a.search_hi},
                 {"search_tol", a.search_tol},
                 {"seed", a.seed},
                 {"threads", a.threads}};
  m["result"] = {{"n", n},
                 {"bandwidth", number(sum.bandwidth)},
                 {"delta", number(sum.delta)},
                 {"dispersion", number(sum.dispersion)},
                 {"deviance", number(sum.deviance)},
                 {"pseudo_r2", number(sum.pseudo_r2)}};
  m["outputs"] = {"fit.csv", "summary.csv", "significance.csv", "coef_summary.csv",
                  "trace.csv"};
  if (int rc = write_manifest(dir, m)) return rc;

  std::cout << "model=" << sum.model << " n=" << n << " bandwidth=" << fmt(sum.bandwidth)
            << " delta=" << fmt(sum.delta) << " dispersion=" << fmt(sum.dispersion)
            << " deviance=" << fmt(sum.deviance) << " pseudo_r2=" << fmt(sum.pseudo_r2)
            << " seconds=" << fmt(sum.seconds) << "\n";
  if (sum.psi_fallbacks)
    std::cerr << "lgwpr: " << sum.psi_fallbacks
              << " focal points had no neighbours for the local zero ratio\n";
  return kOk;
}

struct SimArgs {
  std::string scenario;
  bool full_grid = false;
  int replicates = 0;
  long long seed = -1;
  std::vector<std::string> models;
  unsigned threads = 0;
  std::string out = "out";
};

int cmd_simulate(const SimArgs& a, const std::vector<std::string>& argv) {
  const std::filesystem::path dir = std::filesystem::path(a.out) / "sim";
  if (auto rc = prepare_dir(dir)) return *rc;
  lgwpr_sim_options o;
  lgwpr_sim_options_init(&o);
  o.scenario_path = a.scenario.empty() ? nullptr : a.scenario.c_str();
  o.full_grid = a.full_grid;
  o.replicates = a.replicates;
  o.seed = a.seed;
  const std::string models = join(a.models);
  o.models = models.empty() ? nullptr : models.c_str();
  o.threads = a.threads;
  lgwpr_sim* sim = nullptr;
  const lgwpr_status s = lgwpr_sim_run(&o, dir.string().c_str(), &sim);
  if (s != LGWPR_OK) {
    // Scenario problems surface as validation or parse errors.
    return report(s);
  }

  nlohmann::json m;
  m["command"] = "simulate";
  m["version"] = lgwpr_version();
  m["argv"] = argv;
  m["config"] = {{"scenario_file", a.scenario},
                 {"full_grid", a.full_grid},
                 {"threads", a.threads}};
  m["scenarios"] = nlohmann::json::parse(lgwpr_sim_scenarios_json(sim));
  m["rng"] = "mt19937_64 per replicate, seeded by splitmix64(seed, replicate)";
  m["outputs"] = {"replicates.csv", "summary.csv", "timings.csv"};
  const int rc = write_manifest(dir, m);

  std::printf("%-28s %-12s %-6s %5s %9s %9s\n", "scenario", "model", "coef", "fail",
              "med_CC", "med_RMSE");
  for (std::size_t i = 0; i < lgwpr_sim_summary_count(sim); ++i) {
    lgwpr_sim_summary_row r;
    lgwpr_sim_summary_get(sim, i, &r);
    std::printf("%-28s %-12s beta%-2d %2d/%-2d %9s %9s\n", r.scenario, r.model,
                r.coefficient, r.failures, r.replicates, fmt(r.cc_median).c_str(),
                fmt(r.rmse_median).c_str());
  }
  lgwpr_sim_free(sim);
  return rc;
}

struct BenchArgs {
  std::vector<std::size_t> sizes{50, 200, 500, 1000, 2000};
  std::vector<std::string> models{"GWPR", "L-GWPR", "L-GWPRR"};
  int repeats = 3;
  long long seed = 1;
  bool gwpr_grid = false;
  unsigned threads = 0;
  std::string out = "out";
};

int cmd_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
  const std::filesystem::path dir = std::filesystem::path(a.out) / "bench";
  if (auto rc = prepare_dir(dir)) return *rc;
  lgwpr_bench_options o;
  lgwpr_bench_options_init(&o);
  o.sizes = a.sizes.data();
  o.sizes_length = a.sizes.size();
  const std::string models = join(a.models);
  o.models = models.c_str();
  o.repeats = a.repeats;
  o.seed = a.seed;
  o.gwpr_grid = a.gwpr_grid;
  o.threads = a.threads;
  lgwpr_bench* bench = nullptr;
  if (auto s = lgwpr_bench_run(&o, dir.string().c_str(), &bench); s != LGWPR_OK)
    return report(s);

  nlohmann::json m;
  m["command"] = "bench";
  m["version"] = lgwpr_version();
  m["argv"] = argv;
  m["config"] = {{"sizes", a.sizes},     {"models", a.models},
                 {"repeats", a.repeats}, {"seed", a.seed},
                 {"gwpr_search", a.gwpr_grid ? "grid" : "golden"},
                 {"threads", a.threads}};
  m["outputs"] = {"timing.csv"};
  const int rc = write_manifest(dir, m);

  std::printf("%-12s %6s %12s\n", "model", "n", "median_s");
  for (std::size_t i = 0; i < lgwpr_bench_count(bench); ++i) {
    lgwpr_bench_row r;
    lgwpr_bench_get(bench, i, &r);
    std::printf("%-12s %6zu %12s%s\n", r.model, r.n, fmt(r.median_seconds).c_str(),
                r.failures ? "  (failures)" : "");
  }
  lgwpr_bench_free(bench);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Geographically weighted Poisson regression and its linearised variants"};
  app.set_version_flag("--version", std::string(lgwpr_version()));
  app.require_subcommand(1);
  const unsigned env_threads = default_threads();

  FitArgs fa;
  fa.threads = env_threads;
  auto* fit = app.add_subcommand("fit", "Fit one model to a CSV dataset");
  fit->add_option("--data", fa.data, "Input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--x", fa.x, "X coordinate column")->capture_default_str();
  fit->add_option("--y", fa.y, "Y coordinate column")->capture_default_str();
  fit->add_option("--count", fa.count, "Count column")->capture_default_str();
  fit->add_option("--offset", fa.offset, "Offset (exposure) column");
  fit->add_option("--id", fa.id, "Identifier column");
  fit->add_option("--covariates", fa.covariates, "Covariate columns (default: all others)")
      ->delimiter(',');
  fit->add_flag("--standardize", fa.standardize, "Standardise covariates");
  fit->add_option("--model", fa.model,
                  "PR, GWPR, L-GWPR, L-GWPR_dev, L-GWPRR, L-GWPRR_dev, L-GWPR_loc, L-GWPRR_loc")
      ->capture_default_str();
  fit->add_option("--kernel", fa.kernel)
      ->check(CLI::IsMember({"gaussian", "bisquare"}))
      ->capture_default_str();
  fit->add_flag("--literal-bisquare", fa.literal_bisquare,
                "Bisquare weights (1 - d/b)^2 instead of (1 - (d/b)^2)^2");
  fit->add_option("--bandwidth", fa.bandwidth, "'search' or a fixed positive value")
      ->capture_default_str();
  fit->add_option("--criterion", fa.criterion, "LOOCV criterion override")
      ->check(CLI::IsMember({"squared_error", "deviance"}));
  fit->add_option("--ridge", fa.ridge, "Ridge override")->check(CLI::IsMember({"none", "search"}));
  fit->add_option("--psi", fa.psi, "Zero-ratio override")->check(CLI::IsMember({"global", "local"}));
  fit->add_option("--alpha", fa.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fit->add_flag("--quasi", fa.quasi, "Quasi-Poisson variances for PR and GWPR");
  fit->add_option("--gwpr-search", fa.gwpr_search)
      ->check(CLI::IsMember({"grid", "golden"}))
      ->capture_default_str();
  fit->add_option("--bandwidth-grid", fa.bandwidth_grid, "GWPR candidate bandwidths")
      ->delimiter(',');
  fit->add_option("--delta-grid", fa.delta_grid, "Ridge candidates")->delimiter(',');
  fit->add_option("--mean", fa.mean, "Stage-3 mean evaluation")
      ->check(CLI::IsMember({"focal", "own"}))
      ->capture_default_str();
  fit->add_option("--selection", fa.selection, "Bandwidth/ridge search strategy")
      ->check(CLI::IsMember({"profile", "nested"}))
      ->capture_default_str();
  fit->add_option("--search-lo", fa.search_lo, "Bandwidth bracket low end (0 = auto)");
  fit->add_option("--search-hi", fa.search_hi, "Bandwidth bracket high end (0 = auto)");
  fit->add_option("--search-tol", fa.search_tol, "Bandwidth tolerance (0 = auto)");
  fit->add_option("--seed", fa.seed, "Recorded in the manifest")->capture_default_str();
  fit->add_option("--threads", fa.threads, "Worker threads (0 = auto; env LGWPR_THREADS)");
  fit->add_option("--out", fa.out, "Output root; files go to <out>/fit")->capture_default_str();

  SimArgs sa;
  sa.threads = env_threads;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep");
  sim->add_option("--scenario", sa.scenario, "Scenario file")->check(CLI::ExistingFile);
  sim->add_flag("--full-grid", sa.full_grid, "Expand over mu0 x range x n");
  sim->add_option("--replicates", sa.replicates, "Override replicate count")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed, "Override seed")->check(CLI::NonNegativeNumber);
  sim->add_option("--models", sa.models, "Override model list")->delimiter(',');
  sim->add_option("--threads", sa.threads, "Workers over replicates (0 = auto)");
  sim->add_option("--out", sa.out, "Output root; files go to <out>/sim")->capture_default_str();

  BenchArgs ba;
  ba.threads = env_threads;
  auto* bench = app.add_subcommand("bench", "Timing comparison");
  bench->add_option("--sizes", ba.sizes, "Sample sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--models", ba.models, "Models")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", ba.repeats)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", ba.seed)->check(CLI::NonNegativeNumber)->capture_default_str();
  bench->add_flag("--gwpr-grid", ba.gwpr_grid, "GWPR grid search instead of golden section");
  bench->add_option("--threads", ba.threads, "Per-fit worker threads (0 = auto)");
  bench->add_option("--out", ba.out, "Output root; files go to <out>/bench")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*fit) return cmd_fit(fa, args);
  if (*sim) return cmd_simulate(sa, args);
  return cmd_bench(ba, args);
}
