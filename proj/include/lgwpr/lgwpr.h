/* C interface to the lgwpr spatial count-regression library.
 *
 * Objects are opaque handles created by *_read / *_run functions and
 * released with the matching *_free. Every fallible call returns an
 * lgwpr_status; on failure lgwpr_last_error() describes the problem. The
 * message is thread-local and valid until the next failing call on the same
 * thread. */
#ifndef LGWPR_LGWPR_H
#define LGWPR_LGWPR_H

#include <stddef.h>

#if defined(LGWPR_BUILDING_LIBRARY)
#define LGWPR_API __attribute__((visibility("default")))
#else
#define LGWPR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lgwpr_status {
  LGWPR_OK = 0,
  LGWPR_E_INVALID_ARGUMENT = 1,
  LGWPR_E_IO = 2,
  LGWPR_E_PARSE = 3,
  LGWPR_E_VALIDATION = 4,
  LGWPR_E_SINGULAR = 5,
  LGWPR_E_DIVERGENCE = 6,
  LGWPR_E_DEGREES_OF_FREEDOM = 7,
  LGWPR_E_DEGENERATE_NULL = 8,
  LGWPR_E_FIT_FAILURE = 9,
  LGWPR_E_SELECTION_FAILURE = 10,
  LGWPR_E_INTERNAL = 99
} lgwpr_status;

typedef struct lgwpr_dataset lgwpr_dataset;
typedef struct lgwpr_fit lgwpr_fit;
typedef struct lgwpr_sim lgwpr_sim;
typedef struct lgwpr_bench lgwpr_bench;

LGWPR_API const char* lgwpr_version(void);
LGWPR_API const char* lgwpr_last_error(void);
/* Stable name of a status, e.g. "validation". */
LGWPR_API const char* lgwpr_status_name(lgwpr_status status);

/* ---- datasets ---------------------------------------------------------- */

/* Column mapping. NULL strings take the defaults "x", "y", "count"; a NULL
 * offset or id column means none. `covariates` is a comma-separated list,
 * NULL or "" for every remaining column. */
typedef struct lgwpr_schema {
  const char* x_column;
  const char* y_column;
  const char* count_column;
  const char* offset_column;
  const char* id_column;
  const char* covariates;
  int standardize;
} lgwpr_schema;

LGWPR_API void lgwpr_schema_init(lgwpr_schema* schema);
LGWPR_API lgwpr_status lgwpr_dataset_read(const char* path,
                                          const lgwpr_schema* schema,
                                          lgwpr_dataset** out);
/* coords is n x 2 and covariates n x k, both row-major. offset may be NULL
 * (all ones). */
LGWPR_API lgwpr_status lgwpr_dataset_from_arrays(size_t n, size_t k,
                                                 const double* coords,
                                                 const double* counts,
                                                 const double* offset,
                                                 const double* covariates,
                                                 lgwpr_dataset** out);
LGWPR_API lgwpr_status lgwpr_dataset_write(const lgwpr_dataset* data,
                                           const char* path);
LGWPR_API size_t lgwpr_dataset_n(const lgwpr_dataset* data);
/* Number of coefficients, intercept included. */
LGWPR_API size_t lgwpr_dataset_p(const lgwpr_dataset* data);
/* Name of coefficient j, "(Intercept)" first; NULL when out of range. */
LGWPR_API const char* lgwpr_dataset_coefficient_name(const lgwpr_dataset* data,
                                                     size_t j);
LGWPR_API void lgwpr_dataset_free(lgwpr_dataset* data);

/* ---- fitting ----------------------------------------------------------- */

typedef struct lgwpr_fit_options {
  /* "PR", "GWPR", "L-GWPR", "L-GWPR_dev", "L-GWPRR", "L-GWPRR_dev",
   * "L-GWPR_loc", "L-GWPRR_loc"; case-insensitive. */
  const char* model;
  const char* kernel; /* "gaussian" or "bisquare" */
  int literal_bisquare;
  /* > 0 fixes the bandwidth; otherwise it is searched. */
  double bandwidth;
  int quasi;
  /* GWPR: 0 grid search over bandwidth_grid (default 0.1..4.0), 1 golden
   * section. */
  int gwpr_golden;
  const double* bandwidth_grid;
  size_t bandwidth_grid_length;
  const double* delta_grid;
  size_t delta_grid_length;
  /* Stage-3 means from each sample's own stage-1 fit instead of the focal
   * one. */
  int mean_own;
  /* Independent bandwidth search per ridge value. */
  int nested_search;
  /* Bandwidth bracket and tolerance; 0 selects the defaults. */
  double search_lo;
  double search_hi;
  double search_tol;
  double alpha;
  unsigned threads; /* 0 = hardware concurrency */
} lgwpr_fit_options;

LGWPR_API void lgwpr_fit_options_init(lgwpr_fit_options* options);
LGWPR_API lgwpr_status lgwpr_fit_run(const lgwpr_dataset* data,
                                     const lgwpr_fit_options* options,
                                     lgwpr_fit** out);

typedef struct lgwpr_fit_summary {
  char model[32];
  int global;
  size_t rows; /* coefficient rows: n, or 1 for PR */
  size_t p;
  double bandwidth; /* NaN for PR */
  double delta;
  double dispersion;
  double n_enp;
  double deviance;
  double null_deviance;
  double pseudo_r2;
  double corrected_alpha;
  double seconds;
  size_t trace_length;
  size_t psi_fallbacks;
} lgwpr_fit_summary;

LGWPR_API lgwpr_status lgwpr_fit_get_summary(const lgwpr_fit* fit,
                                             lgwpr_fit_summary* out);
/* rows x p row-major into out, which must hold `capacity` doubles. */
LGWPR_API lgwpr_status lgwpr_fit_coefficients(const lgwpr_fit* fit, double* out,
                                              size_t capacity);
LGWPR_API lgwpr_status lgwpr_fit_standard_errors(const lgwpr_fit* fit,
                                                 double* out, size_t capacity);
/* Writes fit.csv, summary.csv, significance.csv, coef_summary.csv and
 * trace.csv into an existing directory. */
LGWPR_API lgwpr_status lgwpr_fit_write(const lgwpr_fit* fit,
                                       const char* directory);
LGWPR_API void lgwpr_fit_free(lgwpr_fit* fit);

/* ---- simulation -------------------------------------------------------- */

typedef struct lgwpr_sim_options {
  /* Key-value scenario file; NULL uses one default scenario. */
  const char* scenario_path;
  /* Expand every scenario over the full mu0 x range x n design. */
  int full_grid;
  /* Overrides; 0 / negative / NULL keep the scenario values. */
  int replicates;
  long long seed;
  const char* models;
  unsigned threads;
  /* Called after each finished replicate; may run on worker threads. */
  void (*progress)(const char* scenario, int replicate, void* user);
  void* user;
} lgwpr_sim_options;

typedef struct lgwpr_sim_summary_row {
  const char* scenario;
  const char* model;
  int coefficient;
  int replicates;
  int failures;
  double cc_median;
  double rmse_median;
  double bias_median;
  double sd_gap_median;
} lgwpr_sim_summary_row;

LGWPR_API void lgwpr_sim_options_init(lgwpr_sim_options* options);
/* Writes replicates.csv, summary.csv and timings.csv into `directory`. */
LGWPR_API lgwpr_status lgwpr_sim_run(const lgwpr_sim_options* options,
                                     const char* directory, lgwpr_sim** out);
LGWPR_API size_t lgwpr_sim_summary_count(const lgwpr_sim* sim);
LGWPR_API lgwpr_status lgwpr_sim_summary_get(const lgwpr_sim* sim, size_t i,
                                             lgwpr_sim_summary_row* out);
/* Resolved scenarios as a JSON array. */
LGWPR_API const char* lgwpr_sim_scenarios_json(const lgwpr_sim* sim);
LGWPR_API void lgwpr_sim_free(lgwpr_sim* sim);

/* ---- timing ------------------------------------------------------------ */

typedef struct lgwpr_bench_options {
  const size_t* sizes; /* NULL: 50, 200, 500, 1000, 2000 */
  size_t sizes_length;
  const char* models; /* comma separated; NULL: GWPR, L-GWPR, L-GWPRR */
  int repeats;
  long long seed;
  /* GWPR uses the 0.1..4.0 grid instead of golden section. */
  int gwpr_grid;
  unsigned threads;
} lgwpr_bench_options;

typedef struct lgwpr_bench_row {
  const char* model;
  size_t n;
  int repeats;
  int failures;
  double median_seconds;
  double min_seconds;
  double max_seconds;
} lgwpr_bench_row;

LGWPR_API void lgwpr_bench_options_init(lgwpr_bench_options* options);
/* Writes timing.csv into `directory`. */
LGWPR_API lgwpr_status lgwpr_bench_run(const lgwpr_bench_options* options,
                                       const char* directory, lgwpr_bench** out);
LGWPR_API size_t lgwpr_bench_count(const lgwpr_bench* bench);
LGWPR_API lgwpr_status lgwpr_bench_get(const lgwpr_bench* bench, size_t i,
                                       lgwpr_bench_row* out);
LGWPR_API void lgwpr_bench_free(lgwpr_bench* bench);

#ifdef __cplusplus
}
#endif

#endif
