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

#ifndef COAG_COAG_H
#define COAG_COAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(COAG_BUILDING)
#define COAG_EXPORT __declspec(dllexport)
#else
#define COAG_EXPORT __declspec(dllimport)
#endif
#else
#define COAG_EXPORT __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coag_status_ {
  COAG_OK = 0,
  COAG_ERROR_DOMAIN = 1,
  COAG_ERROR_INVALID_ARGUMENT = 2,
  COAG_ERROR_UNSUPPORTED = 3,
  COAG_ERROR_CONFIG = 4,
  COAG_ERROR_CONSTRUCTIVE = 5,
  COAG_ERROR_IO = 6,
  COAG_ERROR_NUMERICAL = 7,
  COAG_ERROR_INTERNAL = 8
} coag_status_t;

typedef enum coag_scheme_ { COAG_SCHEME_RK45 = 0, COAG_SCHEME_RK4 = 1 } coag_scheme_t;
typedef enum coag_boundary_ { COAG_BOUNDARY_CONSERVATIVE = 0, COAG_BOUNDARY_ABSORBING = 1 } coag_boundary_t;
typedef enum coag_gain_path_ { COAG_GAIN_AUTO = 0, COAG_GAIN_DIRECT = 1, COAG_GAIN_FAST = 2 } coag_gain_path_t;
typedef enum coag_truncation_ { COAG_TRUNCATE_CAP = 0, COAG_TRUNCATE_PRODUCT_CAP = 1 } coag_truncation_t;

typedef enum coag_flag_ {
  COAG_FLAG_NONE = 0,
  COAG_FLAG_STEP_UNDERFLOW = 1,
  COAG_FLAG_STEP_BUDGET = 2,
  COAG_FLAG_GELATION_STIFFNESS = 3
} coag_flag_t;

typedef struct coag_kernel_s coag_kernel_t;
typedef struct coag_grid_s coag_grid_t;
typedef struct coag_distribution_s coag_distribution_t;
typedef struct coag_trajectory_s coag_trajectory_t;
typedef struct coag_vp_function_s coag_vp_function_t;

typedef struct coag_solver_options_ {
  coag_scheme_t scheme;
  double dt;         /* fixed step for RK4, initial guess for RK45 */
  double rel_tol;
  double abs_tol;
  coag_boundary_t boundary;
  double t_end;
  const double* snapshot_times; /* may be NULL */
  size_t snapshot_count;
  coag_gain_path_t gain_path;
  uint64_t max_steps;
  int default_cap;   /* nonzero: cap unbounded kernels at their grid maximum */
  double truncation; /* > 0: explicit cap level */
  double gel_leak_tolerance;
} coag_solver_options_t;

/* Message for the last failed call on this thread; empty when none. */
COAG_EXPORT const char* coag_last_error(void);
COAG_EXPORT const char* coag_version(void);
COAG_EXPORT const char* coag_status_string(coag_status_t status);

/* Kernels */
COAG_EXPORT coag_status_t coag_kernel_constant(double c, coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_additive(coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_multiplicative(coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_power_sum(double alpha, double beta, coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_product_power(double exponent, double scale, coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_brownian(coag_kernel_t** out);
/* Same object as the "kernel" section of a run config. */
COAG_EXPORT coag_status_t coag_kernel_from_json(const char* json, coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_truncate(const coag_kernel_t* k, double level, coag_truncation_t mode,
                                               coag_kernel_t** out);
COAG_EXPORT coag_status_t coag_kernel_eval(const coag_kernel_t* k, double x, double y, double* out);
/* Writes at most `capacity` bytes including the terminator; `needed` gets the full length + 1. */
COAG_EXPORT coag_status_t coag_kernel_name(const coag_kernel_t* k, char* buf, size_t capacity, size_t* needed);
COAG_EXPORT void coag_kernel_free(coag_kernel_t* k);

/* Grids */
COAG_EXPORT coag_status_t coag_grid_discrete(int n, coag_grid_t** out);
COAG_EXPORT coag_status_t coag_grid_geometric(double lo, double ratio, int bins, coag_grid_t** out);
COAG_EXPORT coag_status_t coag_grid_linear(double lo, double hi, int bins, coag_grid_t** out);
COAG_EXPORT size_t coag_grid_size(const coag_grid_t* g);
COAG_EXPORT coag_status_t coag_grid_pivots(const coag_grid_t* g, double* out, size_t capacity);
COAG_EXPORT coag_status_t coag_grid_edges(const coag_grid_t* g, double* out, size_t capacity);
COAG_EXPORT void coag_grid_free(coag_grid_t* g);

/* Distributions (densities per unit size) */
COAG_EXPORT coag_status_t coag_distribution_monodisperse(const coag_grid_t* g, double size, double total,
                                                         coag_distribution_t** out);
COAG_EXPORT coag_status_t coag_distribution_exponential(const coag_grid_t* g, double mean, double total,
                                                        coag_distribution_t** out);
COAG_EXPORT coag_status_t coag_distribution_from_density(const coag_grid_t* g, const double* density, size_t n,
                                                         coag_distribution_t** out);
COAG_EXPORT size_t coag_distribution_size(const coag_distribution_t* d);
COAG_EXPORT double coag_distribution_time(const coag_distribution_t* d);
COAG_EXPORT coag_status_t coag_distribution_density(const coag_distribution_t* d, double* out, size_t capacity);
COAG_EXPORT coag_status_t coag_distribution_moment(const coag_distribution_t* d, double mu, double* out);
COAG_EXPORT void coag_distribution_free(coag_distribution_t* d);

/* Gain term (numbers per cell per unit time) on a discrete grid. */
COAG_EXPORT coag_status_t coag_gain(const coag_kernel_t* k, const coag_distribution_t* d, coag_gain_path_t path,
                                    double* out, size_t capacity);

/* Solver */
COAG_EXPORT void coag_solver_options_default(coag_solver_options_t* opt);
COAG_EXPORT coag_status_t coag_integrate(const coag_kernel_t* k, const coag_distribution_t* init,
                                         const coag_solver_options_t* opt, coag_trajectory_t** out);
COAG_EXPORT size_t coag_trajectory_snapshot_count(const coag_trajectory_t* t);
COAG_EXPORT coag_status_t coag_trajectory_snapshot(const coag_trajectory_t* t, size_t i, coag_distribution_t** out);
/* out[6] = t, M0, M1/2, M1, M2, gel mass */
COAG_EXPORT coag_status_t coag_trajectory_moments(const coag_trajectory_t* t, size_t i, double out[6]);
COAG_EXPORT coag_flag_t coag_trajectory_flag(const coag_trajectory_t* t);
COAG_EXPORT double coag_trajectory_stop_time(const coag_trajectory_t* t);
COAG_EXPORT void coag_trajectory_free(coag_trajectory_t* t);

/* Reference solutions for monodisperse unit data; out[3] = M0, M1, M2. */
COAG_EXPORT coag_status_t coag_exact_moments(const coag_kernel_t* k, double t, double out[3]);
/* Cluster numbers of sizes 1..n. */
COAG_EXPORT coag_status_t coag_exact_distribution(const coag_kernel_t* k, double t, double* out, size_t n);

/* de la Vallee Poussin construction on the tail c -> coeff * c^exponent. */
COAG_EXPORT coag_status_t coag_dlvp_power_tail(double coeff, double exponent, const double* alphas,
                                               const double* betas, size_t terms, coag_vp_function_t** out);
COAG_EXPORT size_t coag_vp_breakpoint_count(const coag_vp_function_t* phi);
COAG_EXPORT coag_status_t coag_vp_breakpoints(const coag_vp_function_t* phi, int64_t* out, size_t capacity);
/* order 0: Phi, 1: Phi', 2: Phi'' (right limit at breakpoints). */
COAG_EXPORT coag_status_t coag_vp_eval(const coag_vp_function_t* phi, double r, int order, double* out);
/* Set when the construction ran in exact rational arithmetic. */
COAG_EXPORT int coag_vp_is_exact(const coag_vp_function_t* phi);
/* Exact Phi'(N_m) as "p/q" text. */
COAG_EXPORT coag_status_t coag_vp_derivative_text(const coag_vp_function_t* phi, size_t m, char* buf,
                                                  size_t capacity, size_t* needed);
/* Index m of the last constructive failure on this thread, -1 when none. */
COAG_EXPORT int coag_last_constructive_index(void);
COAG_EXPORT void coag_vp_function_free(coag_vp_function_t* phi);

/* Runs a CLI command; returns the process exit code (0 ok, 1 tolerance, 2 config,
   3 flagged, 4 unsupported, 5 constructive). `out_dir` may be NULL. Messages go to stderr. */
COAG_EXPORT int coag_run_command(const char* command, const char* config_path, const char* out_dir, int jobs);

#ifdef __cplusplus
}
#endif

#endif
