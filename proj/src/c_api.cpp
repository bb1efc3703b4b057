#include "lgwpr/lgwpr.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <filesystem>
#include <json.hpp>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/diagnostics.hpp"
#include "lgwpr/error.hpp"
#include "lgwpr/fit_export.hpp"
#include "lgwpr/models.hpp"
#include "lgwpr/simulate.hpp"

struct lgwpr_dataset {
  lgwpr::Dataset data;
};

struct lgwpr_fit {
  lgwpr::Dataset data;
  lgwpr::ModelFit fit;
  lgwpr::SignificanceTable sig;
};

struct lgwpr_sim {
  std::vector<lgwpr::Scenario> scenarios;
  std::vector<lgwpr::SummaryRow> summary;
  std::string json;
};

struct lgwpr_bench {
  std::vector<lgwpr::BenchRow> rows;
};

namespace {

thread_local std::string last_error;

lgwpr_status to_status(lgwpr::ErrorCode code) {
  using lgwpr::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return LGWPR_E_INVALID_ARGUMENT;
    case ErrorCode::io: return LGWPR_E_IO;
    case ErrorCode::parse: return LGWPR_E_PARSE;
    case ErrorCode::validation: return LGWPR_E_VALIDATION;
    case ErrorCode::singular_system: return LGWPR_E_SINGULAR;
    case ErrorCode::divergence: return LGWPR_E_DIVERGENCE;
    case ErrorCode::degrees_of_freedom: return LGWPR_E_DEGREES_OF_FREEDOM;
    case ErrorCode::degenerate_null: return LGWPR_E_DEGENERATE_NULL;
    case ErrorCode::fit_failure: return LGWPR_E_FIT_FAILURE;
    case ErrorCode::selection_failure: return LGWPR_E_SELECTION_FAILURE;
  }
  return LGWPR_E_INTERNAL;
}

// Runs body, translating exceptions into a status and last_error.
template <class Body>
lgwpr_status guarded(Body&& body) {
  try {
    body();
    return LGWPR_OK;
  } catch (const lgwpr::SingularSystemError& e) {
    last_error = std::string(e.what()) + "\n" + e.report().describe();
    return LGWPR_E_SINGULAR;
  } catch (const lgwpr::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LGWPR_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LGWPR_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw lgwpr::InvalidArgument(std::string(what) + " must not be NULL");
}

std::vector<std::string> split_list(const char* text) {
  std::vector<std::string> out;
  if (!text) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

lgwpr_status copy_matrix(const Eigen::MatrixXd& m, double* out, size_t capacity) {
  return guarded([&] {
    require(out, "output buffer");
    const auto need = static_cast<size_t>(m.size());
    if (capacity < need)
      throw lgwpr::InvalidArgument("output buffer holds " + std::to_string(capacity) +
                                   " values, " + std::to_string(need) + " needed");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        out[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  });
}

nlohmann::json scenario_json(const lgwpr::Scenario& s) {
  return {{"name", s.name},
          {"n", s.n},
          {"range", s.range},
          {"coef_means", s.coef_means},
          {"coef_sds", s.coef_sds},
          {"replicates", s.replicates},
          {"seed", s.seed},
          {"kernel", lgwpr::to_string(s.kernel)},
          {"models", s.models}};
}

}  // namespace

extern "C" {

const char* lgwpr_version(void) { return LGWPR_VERSION_STRING; }

const char* lgwpr_last_error(void) { return last_error.c_str(); }

const char* lgwpr_status_name(lgwpr_status status) {
  switch (status) {
    case LGWPR_OK: return "ok";
    case LGWPR_E_INVALID_ARGUMENT: return "invalid_argument";
    case LGWPR_E_IO: return "io";
    case LGWPR_E_PARSE: return "parse";
    case LGWPR_E_VALIDATION: return "validation";
    case LGWPR_E_SINGULAR: return "singular_system";
    case LGWPR_E_DIVERGENCE: return "divergence";
    case LGWPR_E_DEGREES_OF_FREEDOM: return "degrees_of_freedom";
    case LGWPR_E_DEGENERATE_NULL: return "degenerate_null";
    case LGWPR_E_FIT_FAILURE: return "fit_failure";
    case LGWPR_E_SELECTION_FAILURE: return "selection_failure";
    case LGWPR_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void lgwpr_schema_init(lgwpr_schema* schema) {
  if (schema) *schema = lgwpr_schema{};
}

lgwpr_status lgwpr_dataset_read(const char* path, const lgwpr_schema* schema,
                                lgwpr_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    lgwpr::Schema s;
    if (schema) {
      if (schema->x_column) s.x_column = schema->x_column;
      if (schema->y_column) s.y_column = schema->y_column;
      if (schema->count_column) s.count_column = schema->count_column;
      if (schema->offset_column) s.offset_column = schema->offset_column;
      if (schema->id_column) s.id_column = schema->id_column;
      s.covariates = split_list(schema->covariates);
      s.standardize = schema->standardize != 0;
    }
    *out = new lgwpr_dataset{lgwpr::read_dataset(path, s)};
  });
}

lgwpr_status lgwpr_dataset_from_arrays(size_t n, size_t k, const double* coords,
                                       const double* counts, const double* offset,
                                       const double* covariates,
                                       lgwpr_dataset** out) {
  return guarded([&] {
    require(coords, "coords");
    require(counts, "counts");
    require(out, "out");
    if (k > 0) require(covariates, "covariates");
    *out = nullptr;
    const auto ni = static_cast<Eigen::Index>(n);
    const auto ki = static_cast<Eigen::Index>(k);
    Eigen::MatrixX2d c(ni, 2);
    Eigen::VectorXd y(ni), o;
    Eigen::MatrixXd x(ni, ki);
    for (Eigen::Index i = 0; i < ni; ++i) {
      c(i, 0) = coords[2 * i];
      c(i, 1) = coords[2 * i + 1];
      y(i) = counts[i];
      for (Eigen::Index j = 0; j < ki; ++j) x(i, j) = covariates[i * ki + j];
    }
    if (offset) o = Eigen::Map<const Eigen::VectorXd>(offset, ni);
    *out = new lgwpr_dataset{lgwpr::make_dataset(std::move(c), std::move(y),
                                                 std::move(o), x)};
  });
}

lgwpr_status lgwpr_dataset_write(const lgwpr_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "dataset");
    require(path, "path");
    lgwpr::write_dataset(data->data, path);
  });
}

size_t lgwpr_dataset_n(const lgwpr_dataset* data) {
  return data ? static_cast<size_t>(data->data.n()) : 0;
}

size_t lgwpr_dataset_p(const lgwpr_dataset* data) {
  return data ? static_cast<size_t>(data->data.p()) : 0;
}

const char* lgwpr_dataset_coefficient_name(const lgwpr_dataset* data, size_t j) {
  if (!data || j >= data->data.covariate_names.size()) return nullptr;
  return data->data.covariate_names[j].c_str();
}

void lgwpr_dataset_free(lgwpr_dataset* data) { delete data; }

void lgwpr_fit_options_init(lgwpr_fit_options* options) {
  if (!options) return;
  *options = lgwpr_fit_options{};
  options->model = "L-GWPRR";
  options->kernel = "gaussian";
  options->alpha = 0.05;
  options->threads = 1;
}

lgwpr_status lgwpr_fit_run(const lgwpr_dataset* data,
                           const lgwpr_fit_options* options, lgwpr_fit** out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    *out = nullptr;
    lgwpr_fit_options defaults;
    lgwpr_fit_options_init(&defaults);
    const lgwpr_fit_options& o = options ? *options : defaults;
    require(o.model, "model");
    lgwpr::ModelOptions m;
    m.family = lgwpr::parse_kernel_family(o.kernel ? o.kernel : "gaussian");
    m.literal_bisquare = o.literal_bisquare != 0;
    if (o.bandwidth > 0) m.fixed_bandwidth = o.bandwidth;
    else if (o.bandwidth < 0 || std::isnan(o.bandwidth))
      throw lgwpr::InvalidArgument("fixed bandwidth must be positive");
    m.quasi = o.quasi != 0;
    m.gwpr_search = o.gwpr_golden ? lgwpr::BandwidthSearch::golden
                                  : lgwpr::BandwidthSearch::grid;
    if (o.bandwidth_grid_length) {
      require(o.bandwidth_grid, "bandwidth_grid");
      m.bandwidth_grid.assign(o.bandwidth_grid,
                              o.bandwidth_grid + o.bandwidth_grid_length);
    }
    if (o.delta_grid_length) {
      require(o.delta_grid, "delta_grid");
      m.delta_grid.assign(o.delta_grid, o.delta_grid + o.delta_grid_length);
    }
    m.mean_evaluation =
        o.mean_own ? lgwpr::MeanEvaluation::own : lgwpr::MeanEvaluation::focal;
    m.strategy = o.nested_search ? lgwpr::SelectionStrategy::nested
                                 : lgwpr::SelectionStrategy::profile;
    m.search_lo = o.search_lo;
    m.search_hi = o.search_hi;
    m.search_tol = o.search_tol;
    m.threads = o.threads;
    auto result = std::make_unique<lgwpr_fit>();
    result->data = data->data;
    result->fit = lgwpr::run_model(data->data, o.model, m);
    result->sig = lgwpr::significance(result->fit, o.alpha);
    *out = result.release();
  });
}

lgwpr_status lgwpr_fit_get_summary(const lgwpr_fit* fit, lgwpr_fit_summary* out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    const lgwpr::ModelFit& f = fit->fit;
    *out = lgwpr_fit_summary{};
    std::strncpy(out->model, f.tag.c_str(), sizeof(out->model) - 1);
    out->global = f.global ? 1 : 0;
    out->rows = f.locals.size();
    out->p = static_cast<size_t>(fit->data.p());
    out->bandwidth = f.bandwidth;
    out->delta = f.delta;
    out->dispersion = f.dispersion;
    out->n_enp = f.n_enp;
    out->deviance = f.deviance;
    out->null_deviance = f.null_deviance;
    out->pseudo_r2 = f.pseudo_r2;
    out->corrected_alpha = fit->sig.corrected_alpha;
    out->seconds = f.seconds;
    out->trace_length = f.trace.size();
    out->psi_fallbacks = f.psi_fallbacks;
  });
}

lgwpr_status lgwpr_fit_coefficients(const lgwpr_fit* fit, double* out,
                                    size_t capacity) {
  if (!fit) {
    last_error = "fit must not be NULL";
    return LGWPR_E_INVALID_ARGUMENT;
  }
  return copy_matrix(fit->fit.coefficients(), out, capacity);
}

lgwpr_status lgwpr_fit_standard_errors(const lgwpr_fit* fit, double* out,
                                       size_t capacity) {
  if (!fit) {
    last_error = "fit must not be NULL";
    return LGWPR_E_INVALID_ARGUMENT;
  }
  return copy_matrix(fit->sig.se, out, capacity);
}

lgwpr_status lgwpr_fit_write(const lgwpr_fit* fit, const char* directory) {
  return guarded([&] {
    require(fit, "fit");
    require(directory, "directory");
    const std::filesystem::path dir(directory);
    lgwpr::write_fit(fit->fit, fit->data, fit->sig, dir / "fit.csv");
    lgwpr::write_summary(fit->fit, fit->data, fit->sig, dir / "summary.csv");
    lgwpr::write_significance(fit->fit, fit->data, fit->sig, dir / "significance.csv");
    lgwpr::write_coefficient_summary(fit->fit, fit->data, dir / "coef_summary.csv");
    lgwpr::write_trace(fit->fit, dir / "trace.csv");
  });
}

void lgwpr_fit_free(lgwpr_fit* fit) { delete fit; }

void lgwpr_sim_options_init(lgwpr_sim_options* options) {
  if (!options) return;
  *options = lgwpr_sim_options{};
  options->seed = -1;
  options->threads = 1;
}

lgwpr_status lgwpr_sim_run(const lgwpr_sim_options* options,
                           const char* directory, lgwpr_sim** out) {
  return guarded([&] {
    require(directory, "directory");
    require(out, "out");
    *out = nullptr;
    lgwpr_sim_options defaults;
    lgwpr_sim_options_init(&defaults);
    const lgwpr_sim_options& o = options ? *options : defaults;

    std::vector<lgwpr::Scenario> scenarios =
        o.scenario_path ? lgwpr::read_scenarios(o.scenario_path)
                        : std::vector<lgwpr::Scenario>{lgwpr::Scenario{}};
    for (auto& s : scenarios) {
      if (o.replicates > 0) s.replicates = o.replicates;
      if (o.seed >= 0) s.seed = static_cast<std::uint64_t>(o.seed);
      if (o.models) s.models = split_list(o.models);
    }
    if (o.full_grid) {
      std::vector<lgwpr::Scenario> grid;
      for (const auto& s : scenarios)
        for (auto& g : lgwpr::full_grid(s)) {
          if (scenarios.size() > 1) g.name = s.name + ":" + g.name;
          grid.push_back(std::move(g));
        }
      scenarios = std::move(grid);
    }
    for (const auto& s : scenarios) s.check();

    lgwpr::SweepOptions sweep;
    sweep.threads = o.threads;
    if (o.progress) {
      auto cb = o.progress;
      void* user = o.user;
      sweep.progress = [cb, user](const std::string& name, int r) {
        cb(name.c_str(), r, user);
      };
    }
    const lgwpr::SweepResult result = lgwpr::run_sweep(scenarios, sweep);
    const std::filesystem::path dir(directory);
    lgwpr::write_records(result.records, dir / "replicates.csv");
    lgwpr::write_summary(result.summary, dir / "summary.csv");
    lgwpr::write_timings(result.records, dir / "timings.csv");

    auto sim = std::make_unique<lgwpr_sim>();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : scenarios) arr.push_back(scenario_json(s));
    sim->json = arr.dump();
    sim->scenarios = std::move(scenarios);
    sim->summary = result.summary;
    *out = sim.release();
  });
}

size_t lgwpr_sim_summary_count(const lgwpr_sim* sim) {
  return sim ? sim->summary.size() : 0;
}

lgwpr_status lgwpr_sim_summary_get(const lgwpr_sim* sim, size_t i,
                                   lgwpr_sim_summary_row* out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    if (i >= sim->summary.size()) throw lgwpr::InvalidArgument("row out of range");
    const auto& r = sim->summary[i];
    *out = lgwpr_sim_summary_row{r.scenario.c_str(), r.model.c_str(),
                                 r.coefficient,      r.replicates,
                                 r.failures,         r.cc.median,
                                 r.rmse.median,      r.bias.median,
                                 r.sd_gap.median};
  });
}

const char* lgwpr_sim_scenarios_json(const lgwpr_sim* sim) {
  return sim ? sim->json.c_str() : nullptr;
}

void lgwpr_sim_free(lgwpr_sim* sim) { delete sim; }

void lgwpr_bench_options_init(lgwpr_bench_options* options) {
  if (!options) return;
  *options = lgwpr_bench_options{};
  options->repeats = 3;
  options->seed = 1;
  options->threads = 1;
}

lgwpr_status lgwpr_bench_run(const lgwpr_bench_options* options,
                             const char* directory, lgwpr_bench** out) {
  return guarded([&] {
    require(directory, "directory");
    require(out, "out");
    *out = nullptr;
    lgwpr_bench_options defaults;
    lgwpr_bench_options_init(&defaults);
    const lgwpr_bench_options& o = options ? *options : defaults;
    lgwpr::BenchOptions b;
    if (o.sizes_length) {
      require(o.sizes, "sizes");
      b.sizes.clear();
      for (size_t i = 0; i < o.sizes_length; ++i)
        b.sizes.push_back(static_cast<Eigen::Index>(o.sizes[i]));
    }
    if (o.models) b.models = split_list(o.models);
    for (const auto& m : b.models) lgwpr::canonical_tag(m);
    b.repeats = o.repeats;
    if (o.seed < 0) throw lgwpr::InvalidArgument("seed must be >= 0");
    b.seed = static_cast<std::uint64_t>(o.seed);
    if (o.gwpr_grid) b.model.gwpr_search = lgwpr::BandwidthSearch::grid;
    b.model.threads = o.threads;
    auto bench = std::make_unique<lgwpr_bench>();
    bench->rows = lgwpr::bench(b);
    lgwpr::write_bench(bench->rows, std::filesystem::path(directory) / "timing.csv");
    *out = bench.release();
  });
}

size_t lgwpr_bench_count(const lgwpr_bench* bench) {
  return bench ? bench->rows.size() : 0;
}

lgwpr_status lgwpr_bench_get(const lgwpr_bench* bench, size_t i,
                             lgwpr_bench_row* out) {
  return guarded([&] {
    require(bench, "bench");
    require(out, "out");
    if (i >= bench->rows.size()) throw lgwpr::InvalidArgument("row out of range");
    const auto& r = bench->rows[i];
    *out = lgwpr_bench_row{r.model.c_str(),  static_cast<size_t>(r.n),
                           r.repeats,        r.failures,
                           r.median_seconds, r.min_seconds,
                           r.max_seconds};
  });
}

void lgwpr_bench_free(lgwpr_bench* bench) { delete bench; }

}  // extern "C"
