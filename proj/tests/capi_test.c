/*
  Copyright (c) 2026 The coag authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

/* Exercises the shared library through the C header only. */
#include <coag/coag.h>

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void kernels(void) {
  coag_kernel_t* k = NULL;
  double v = 0.0;
  char name[64];
  size_t needed = 0;
  EXPECT(coag_kernel_brownian(&k) == COAG_OK);
  EXPECT(coag_kernel_eval(k, 1.0, 8.0, &v) == COAG_OK);
  EXPECT(fabs(v - 4.5) < 1e-14);
  EXPECT(coag_kernel_eval(k, 0.0, 1.0, &v) == COAG_ERROR_DOMAIN);
  EXPECT(strlen(coag_last_error()) > 0);
  EXPECT(coag_kernel_name(k, name, sizeof name, &needed) == COAG_OK);
  EXPECT(needed > 0 && needed < sizeof name);
  coag_kernel_free(k);

  EXPECT(coag_kernel_from_json("{\"family\": \"multiplicative\"}", &k) == COAG_OK);
  coag_kernel_t* capped = NULL;
  EXPECT(coag_kernel_truncate(k, 10.0, COAG_TRUNCATE_CAP, &capped) == COAG_OK);
  EXPECT(coag_kernel_eval(capped, 3.0, 4.0, &v) == COAG_OK && v == 10.0);
  coag_kernel_free(capped);
  coag_kernel_free(k);

  EXPECT(coag_kernel_from_json("{\"family\": ", &k) == COAG_ERROR_CONFIG);
  EXPECT(coag_kernel_eval(NULL, 1.0, 1.0, &v) == COAG_ERROR_INVALID_ARGUMENT);
}

static void solve(void) {
  coag_kernel_t* k = NULL;
  coag_grid_t* g = NULL;
  coag_distribution_t* d = NULL;
  coag_trajectory_t* t = NULL;
  coag_solver_options_t opt;
  double m[6], exact[3], f[3];
  size_t last;

  EXPECT(coag_kernel_constant(2.0, &k) == COAG_OK);
  EXPECT(coag_grid_discrete(256, &g) == COAG_OK);
  EXPECT(coag_grid_size(g) == 256);
  EXPECT(coag_distribution_monodisperse(g, 1.0, 1.0, &d) == COAG_OK);
  coag_solver_options_default(&opt);
  opt.t_end = 1.0;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-14;
  EXPECT(coag_integrate(k, d, &opt, &t) == COAG_OK);
  EXPECT(coag_trajectory_flag(t) == COAG_FLAG_NONE);
  last = coag_trajectory_snapshot_count(t) - 1;
  EXPECT(coag_trajectory_moments(t, last, m) == COAG_OK);
  EXPECT(coag_exact_moments(k, 1.0, exact) == COAG_OK);
  EXPECT(m[0] == 1.0);
  EXPECT(fabs(m[1] - exact[0]) < 1e-8);
  EXPECT(fabs(m[3] - 1.0) < 1e-10);
  EXPECT(coag_exact_distribution(k, 1.0, f, 3) == COAG_OK);
  EXPECT(fabs(f[0] - 0.25) < 1e-15);
  EXPECT(coag_trajectory_moments(t, last + 1, m) == COAG_ERROR_INVALID_ARGUMENT);
  coag_trajectory_free(t);

  {
    double gain_fast[256], gain_direct[256];
    size_t i;
    EXPECT(coag_gain(k, d, COAG_GAIN_FAST, gain_fast, 256) == COAG_OK);
    EXPECT(coag_gain(k, d, COAG_GAIN_DIRECT, gain_direct, 256) == COAG_OK);
    for (i = 0; i < 256; ++i) EXPECT(fabs(gain_fast[i] - gain_direct[i]) <= 1e-14);
    EXPECT(fabs(gain_direct[1] - 1.0) < 1e-15);
  }

  opt.t_end = -1.0;
  EXPECT(coag_integrate(k, d, &opt, &t) != COAG_OK);
  coag_distribution_free(d);
  coag_grid_free(g);
  coag_kernel_free(k);
}

static void construction(void) {
  double alphas[6] = {1, 1, 1, 1, 1, 1};
  double betas[6];
  long long expect = 8;
  int64_t n[6];
  char text[32];
  size_t needed = 0, m;
  double v;
  coag_vp_function_t* phi = NULL;
  for (m = 0; m < 6; ++m) betas[m] = pow(4.0, -(double)m);
  EXPECT(coag_dlvp_power_tail(2.0, -1.0, alphas, betas, 6, &phi) == COAG_OK);
  EXPECT(coag_vp_is_exact(phi));
  EXPECT(coag_vp_breakpoint_count(phi) == 6);
  EXPECT(coag_vp_breakpoints(phi, n, 6) == COAG_OK);
  for (m = 1; m < 6; ++m, expect *= 4) EXPECT(n[m] == expect);
  EXPECT(coag_vp_derivative_text(phi, 2, text, sizeof text, &needed) == COAG_OK);
  EXPECT(strcmp(text, "15/7") == 0);
  EXPECT(coag_vp_eval(phi, 4.0, 1, &v) == COAG_OK && fabs(v - 4.0 / 7.0) < 1e-15);
  coag_vp_function_free(phi);

  EXPECT(coag_dlvp_power_tail(1.0, 0.0, alphas, betas, 6, &phi) == COAG_ERROR_INVALID_ARGUMENT);
  /* c^{-1/1000} only drops below 1/4 beyond 2^53 */
  EXPECT(coag_dlvp_power_tail(1.0, -1e-3, alphas, betas, 6, &phi) == COAG_ERROR_CONSTRUCTIVE);
  EXPECT(coag_last_constructive_index() == 1);
}

int main(void) {
  EXPECT(strlen(coag_version()) > 0);
  EXPECT(strcmp(coag_status_string(COAG_OK), coag_status_string(COAG_ERROR_DOMAIN)) != 0);
  kernels();
  solve();
  construction();
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
