#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "lgwpr/lgwpr.h"

static int failures = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              lgwpr_last_error());                                   \
      ++failures;                                                    \
    }                                                                \
  } while (0)

int main(void) {
  enum { N = 40 };
  double coords[2 * N], counts[N], cov[N];
  unsigned s = 7;
  for (int i = 0; i < N; ++i) {
    s = s * 1103515245u + 12345u;
    coords[2 * i] = (s >> 8) % 1000 / 1000.0;
    s = s * 1103515245u + 12345u;
    coords[2 * i + 1] = (s >> 8) % 1000 / 1000.0;
    cov[i] = sin(i * 0.7);
    counts[i] = (double)((i * 7 + (int)(3 * cov[i] + 3)) % 6);
  }

  EXPECT(lgwpr_version()[0] != '\0');
  EXPECT(strcmp(lgwpr_status_name(LGWPR_E_VALIDATION), "validation") == 0);

  lgwpr_dataset* data = NULL;
  EXPECT(lgwpr_dataset_from_arrays(N, 1, coords, counts, NULL, cov, &data) == LGWPR_OK);
  EXPECT(lgwpr_dataset_n(data) == N);
  EXPECT(lgwpr_dataset_p(data) == 2);
  EXPECT(strcmp(lgwpr_dataset_coefficient_name(data, 0), "(Intercept)") == 0);
  EXPECT(lgwpr_dataset_coefficient_name(data, 5) == NULL);

  counts[3] = -1.0;
  lgwpr_dataset* bad = NULL;
  EXPECT(lgwpr_dataset_from_arrays(N, 1, coords, counts, NULL, cov, &bad) ==
         LGWPR_E_VALIDATION);
  EXPECT(bad == NULL);
  EXPECT(strlen(lgwpr_last_error()) > 0);

  lgwpr_fit_options opt;
  lgwpr_fit_options_init(&opt);
  opt.model = "l-gwprr";
  opt.bandwidth = 0.5;
  opt.threads = 1;
  lgwpr_fit* fit = NULL;
  EXPECT(lgwpr_fit_run(data, &opt, &fit) == LGWPR_OK);
  lgwpr_fit_summary sum;
  EXPECT(lgwpr_fit_get_summary(fit, &sum) == LGWPR_OK);
  EXPECT(strcmp(sum.model, "L-GWPRR") == 0);
  EXPECT(sum.rows == N && sum.p == 2);
  EXPECT(sum.bandwidth == 0.5);
  EXPECT(sum.deviance >= 0.0);
  double beta[2 * N], se[2 * N];
  EXPECT(lgwpr_fit_coefficients(fit, beta, 2 * N) == LGWPR_OK);
  EXPECT(lgwpr_fit_standard_errors(fit, se, 2 * N) == LGWPR_OK);
  EXPECT(lgwpr_fit_coefficients(fit, beta, 3) == LGWPR_E_INVALID_ARGUMENT);
  for (int i = 0; i < 2 * N; ++i) EXPECT(isfinite(beta[i]) && se[i] >= 0.0);
  EXPECT(lgwpr_fit_write(fit, "/nonexistent/dir/for/lgwpr") == LGWPR_E_IO);
  lgwpr_fit_free(fit);

  opt.model = "GWR";
  fit = NULL;
  EXPECT(lgwpr_fit_run(data, &opt, &fit) == LGWPR_E_INVALID_ARGUMENT);
  EXPECT(fit == NULL);
  EXPECT(lgwpr_fit_run(NULL, &opt, &fit) == LGWPR_E_INVALID_ARGUMENT);

  lgwpr_dataset_free(data);
  lgwpr_dataset_free(NULL);
  lgwpr_fit_free(NULL);

  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  puts("C API checks passed");
  return 0;
}
