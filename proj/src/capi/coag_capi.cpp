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

#include "coag/coag.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "commands.hpp"
#include "compactness.hpp"
#include "config.hpp"
#include "error.hpp"
#include "fast_gain.hpp"
#include "kernel.hpp"
#include "reference.hpp"
#include "solver.hpp"
#include "state.hpp"

#ifndef COAG_VERSION
#define COAG_VERSION "0.0.0"
#endif

// Opaque handle bodies.
struct coag_kernel_s {
  coag::Kernel k;
};
struct coag_grid_s {
  coag::GridPtr g;
};
struct coag_distribution_s {
  coag::SizeDistribution d;
};
struct coag_trajectory_s {
  coag::Trajectory t;
};
struct coag_vp_function_s {
  coag::VPFunction phi;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_constructive_index = -1;

coag_status_t to_status(coag::Status s) {
  switch (s) {
    case coag::Status::Ok:
      return COAG_OK;
    case coag::Status::Domain:
      return COAG_ERROR_DOMAIN;
    case coag::Status::InvalidArgument:
      return COAG_ERROR_INVALID_ARGUMENT;
    case coag::Status::Unsupported:
      return COAG_ERROR_UNSUPPORTED;
    case coag::Status::Config:
      return COAG_ERROR_CONFIG;
    case coag::Status::Constructive:
      return COAG_ERROR_CONSTRUCTIVE;
    case coag::Status::Io:
      return COAG_ERROR_IO;
    case coag::Status::Numerical:
      return COAG_ERROR_NUMERICAL;
    case coag::Status::Internal:
      return COAG_ERROR_INTERNAL;
  }
  return COAG_ERROR_INTERNAL;
}

coag_status_t set_error(coag_status_t s, const char* msg) {
  g_last_error = msg ? msg : "";
  return s;
}

template <class F>
coag_status_t guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return COAG_OK;
  } catch (const coag::ConstructiveError& e) {
    g_constructive_index = e.index();
    return set_error(COAG_ERROR_CONSTRUCTIVE, e.what());
  } catch (const coag::Error& e) {
    return set_error(to_status(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(COAG_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(COAG_ERROR_INTERNAL, e.what());
  } catch (...) {
    return set_error(COAG_ERROR_INTERNAL, "unknown error");
  }
}

#define COAG_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(COAG_ERROR_INVALID_ARGUMENT, msg)

coag_status_t copy_text(const std::string& s, char* buf, size_t capacity, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && capacity > 0) {
    size_t n = s.size() < capacity - 1 ? s.size() : capacity - 1;
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return COAG_OK;
}

template <class T>
coag_status_t copy_vec(const std::vector<T>& v, T* out, size_t capacity) {
  COAG_REQUIRE(out != nullptr, "output buffer is null");
  COAG_REQUIRE(capacity >= v.size(), "output buffer too small");
  std::copy(v.begin(), v.end(), out);
  return COAG_OK;
}

coag_status_t make_kernel(coag::Kernel k, coag_kernel_t** out) {
  COAG_REQUIRE(out != nullptr, "out is null");
  return guard([&] { *out = new coag_kernel_s{std::move(k)}; });
}

coag_status_t make_grid(coag::SizeGrid g, coag_grid_t** out) {
  *out = new coag_grid_s{std::make_shared<const coag::SizeGrid>(std::move(g))};
  return COAG_OK;
}

}  // namespace

extern "C" {

const char* coag_last_error(void) { return g_last_error.c_str(); }

const char* coag_version(void) { return COAG_VERSION; }

const char* coag_status_string(coag_status_t s) {
  switch (s) {
    case COAG_OK:
      return "ok";
    case COAG_ERROR_DOMAIN:
      return "domain error";
    case COAG_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case COAG_ERROR_UNSUPPORTED:
      return "unsupported";
    case COAG_ERROR_CONFIG:
      return "configuration error";
    case COAG_ERROR_CONSTRUCTIVE:
      return "constructive failure";
    case COAG_ERROR_IO:
      return "i/o error";
    case COAG_ERROR_NUMERICAL:
      return "numerical failure";
    case COAG_ERROR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

// Kernels

coag_status_t coag_kernel_constant(double c, coag_kernel_t** out) {
  coag::Kernel k;
  coag_status_t s = guard([&] { k = coag::Kernel::constant(c); });
  return s == COAG_OK ? make_kernel(k, out) : s;
}

coag_status_t coag_kernel_additive(coag_kernel_t** out) { return make_kernel(coag::Kernel::additive(), out); }

coag_status_t coag_kernel_multiplicative(coag_kernel_t** out) {
  return make_kernel(coag::Kernel::multiplicative(), out);
}

coag_status_t coag_kernel_power_sum(double alpha, double beta, coag_kernel_t** out) {
  coag::Kernel k;
  coag_status_t s = guard([&] { k = coag::Kernel::power_sum(alpha, beta); });
  return s == COAG_OK ? make_kernel(k, out) : s;
}

coag_status_t coag_kernel_product_power(double exponent, double scale, coag_kernel_t** out) {
  coag::Kernel k;
  coag_status_t s = guard([&] { k = coag::Kernel::product(coag::RadialRate::power_law(exponent, scale)); });
  return s == COAG_OK ? make_kernel(k, out) : s;
}

coag_status_t coag_kernel_brownian(coag_kernel_t** out) { return make_kernel(coag::Kernel::brownian(), out); }

coag_status_t coag_kernel_from_json(const char* json, coag_kernel_t** out) {
  COAG_REQUIRE(json != nullptr && out != nullptr, "null argument");
  coag::Kernel k;
  coag_status_t s = guard([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      coag::fail(coag::Status::Config, std::string("malformed kernel JSON: ") + e.what());
    }
    k = coag::io::parse_kernel(j);
  });
  return s == COAG_OK ? make_kernel(k, out) : s;
}

coag_status_t coag_kernel_truncate(const coag_kernel_t* k, double level, coag_truncation_t mode,
                                   coag_kernel_t** out) {
  COAG_REQUIRE(k != nullptr && out != nullptr, "null argument");
  coag::Kernel t;
  coag_status_t s = guard([&] {
    t = coag::truncate(k->k, level,
                       mode == COAG_TRUNCATE_PRODUCT_CAP ? coag::TruncationMode::ProductCap : coag::TruncationMode::Cap);
  });
  return s == COAG_OK ? make_kernel(t, out) : s;
}

coag_status_t coag_kernel_eval(const coag_kernel_t* k, double x, double y, double* out) {
  COAG_REQUIRE(k != nullptr && out != nullptr, "null argument");
  return guard([&] { *out = k->k.eval(x, y); });
}

coag_status_t coag_kernel_name(const coag_kernel_t* k, char* buf, size_t capacity, size_t* needed) {
  COAG_REQUIRE(k != nullptr, "null kernel");
  return copy_text(k->k.name(), buf, capacity, needed);
}

void coag_kernel_free(coag_kernel_t* k) { delete k; }

// Grids

coag_status_t coag_grid_discrete(int n, coag_grid_t** out) {
  COAG_REQUIRE(out != nullptr, "out is null");
  coag::SizeGrid g;
  coag_status_t s = guard([&] { g = coag::SizeGrid::discrete(n); });
  return s == COAG_OK ? make_grid(std::move(g), out) : s;
}

coag_status_t coag_grid_geometric(double lo, double ratio, int bins, coag_grid_t** out) {
  COAG_REQUIRE(out != nullptr, "out is null");
  coag::SizeGrid g;
  coag_status_t s = guard([&] { g = coag::SizeGrid::geometric(lo, ratio, bins); });
  return s == COAG_OK ? make_grid(std::move(g), out) : s;
}

coag_status_t coag_grid_linear(double lo, double hi, int bins, coag_grid_t** out) {
  COAG_REQUIRE(out != nullptr, "out is null");
  coag::SizeGrid g;
  coag_status_t s = guard([&] { g = coag::SizeGrid::linear(lo, hi, bins); });
  return s == COAG_OK ? make_grid(std::move(g), out) : s;
}

size_t coag_grid_size(const coag_grid_t* g) { return g ? g->g->size() : 0; }

coag_status_t coag_grid_pivots(const coag_grid_t* g, double* out, size_t capacity) {
  COAG_REQUIRE(g != nullptr, "null grid");
  return copy_vec(g->g->pivots, out, capacity);
}

coag_status_t coag_grid_edges(const coag_grid_t* g, double* out, size_t capacity) {
  COAG_REQUIRE(g != nullptr, "null grid");
  return copy_vec(g->g->edges, out, capacity);
}

void coag_grid_free(coag_grid_t* g) { delete g; }

// Distributions

static coag_status_t make_init(const coag_grid_t* g, const coag::InitSpec& spec, coag_distribution_t** out) {
  COAG_REQUIRE(g != nullptr && out != nullptr, "null argument");
  return guard([&] { *out = new coag_distribution_s{coag::init_distribution(g->g, spec)}; });
}

coag_status_t coag_distribution_monodisperse(const coag_grid_t* g, double size, double total,
                                             coag_distribution_t** out) {
  coag::InitSpec s;
  s.family = coag::InitSpec::Family::Monodisperse;
  s.size = size;
  s.total = total;
  return make_init(g, s, out);
}

coag_status_t coag_distribution_exponential(const coag_grid_t* g, double mean, double total,
                                            coag_distribution_t** out) {
  coag::InitSpec s;
  s.family = coag::InitSpec::Family::Exponential;
  s.mean = mean;
  s.total = total;
  return make_init(g, s, out);
}

coag_status_t coag_distribution_from_density(const coag_grid_t* g, const double* density, size_t n,
                                             coag_distribution_t** out) {
  COAG_REQUIRE(density != nullptr || n == 0, "null density");
  coag::InitSpec s;
  s.family = coag::InitSpec::Family::Tabulated;
  s.values.assign(density, density + n);
  return make_init(g, s, out);
}

size_t coag_distribution_size(const coag_distribution_t* d) { return d ? d->d.size() : 0; }

double coag_distribution_time(const coag_distribution_t* d) { return d ? d->d.time : 0.0; }

coag_status_t coag_distribution_density(const coag_distribution_t* d, double* out, size_t capacity) {
  COAG_REQUIRE(d != nullptr, "null distribution");
  return copy_vec(d->d.density, out, capacity);
}

coag_status_t coag_distribution_moment(const coag_distribution_t* d, double mu, double* out) {
  COAG_REQUIRE(d != nullptr && out != nullptr, "null argument");
  return guard([&] { *out = coag::moment(d->d, mu); });
}

void coag_distribution_free(coag_distribution_t* d) { delete d; }

coag_status_t coag_gain(const coag_kernel_t* k, const coag_distribution_t* d, coag_gain_path_t path, double* out,
                        size_t capacity) {
  COAG_REQUIRE(k != nullptr && d != nullptr, "null argument");
  std::vector<double> g;
  coag_status_t s = guard([&] {
    // Auto takes the direct O(N^2) sum; the solver picks the fast path on its own.
    if (path == COAG_GAIN_FAST) g = coag::fast_gain(d->d, k->k);
    else g = coag::rates(d->d, k->k, coag::Boundary::Conservative).gain;
  });
  if (s != COAG_OK) return s;
  return copy_vec(g, out, capacity);
}

// Solver

void coag_solver_options_default(coag_solver_options_t* opt) {
  if (!opt) return;
  coag::SolverConfig c;
  opt->scheme = COAG_SCHEME_RK45;
  opt->dt = c.scheme.dt;
  opt->rel_tol = c.scheme.rel_tol;
  opt->abs_tol = c.scheme.abs_tol;
  opt->boundary = COAG_BOUNDARY_CONSERVATIVE;
  opt->t_end = c.t_end;
  opt->snapshot_times = nullptr;
  opt->snapshot_count = 0;
  opt->gain_path = COAG_GAIN_AUTO;
  opt->max_steps = c.max_steps;
  opt->default_cap = c.default_cap ? 1 : 0;
  opt->truncation = 0.0;
  opt->gel_leak_tolerance = c.gel_leak_tolerance;
}

coag_status_t coag_integrate(const coag_kernel_t* k, const coag_distribution_t* init, const coag_solver_options_t* opt,
                             coag_trajectory_t** out) {
  COAG_REQUIRE(k != nullptr && init != nullptr && out != nullptr, "null argument");
  coag_solver_options_t o;
  if (opt) o = *opt;
  else coag_solver_options_default(&o);
  COAG_REQUIRE(o.snapshot_times != nullptr || o.snapshot_count == 0, "null snapshot list");
  return guard([&] {
    coag::SolverConfig c;
    c.kernel = k->k;
    c.scheme.kind = o.scheme == COAG_SCHEME_RK4 ? coag::Scheme::Kind::RK4Fixed : coag::Scheme::Kind::RK45Adaptive;
    c.scheme.dt = o.dt;
    c.scheme.rel_tol = o.rel_tol;
    c.scheme.abs_tol = o.abs_tol;
    c.boundary = o.boundary == COAG_BOUNDARY_ABSORBING ? coag::Boundary::Absorbing : coag::Boundary::Conservative;
    c.t_end = o.t_end;
    c.snapshot_times.assign(o.snapshot_times, o.snapshot_times + o.snapshot_count);
    c.gain_path = o.gain_path == COAG_GAIN_DIRECT ? coag::GainPath::Direct
                  : o.gain_path == COAG_GAIN_FAST ? coag::GainPath::Fast
                                                  : coag::GainPath::Auto;
    c.max_steps = o.max_steps;
    c.default_cap = o.default_cap != 0;
    if (o.truncation > 0.0) c.truncation_n = o.truncation;
    c.gel_leak_tolerance = o.gel_leak_tolerance;
    auto t = std::make_unique<coag_trajectory_s>();
    t->t = coag::integrate(init->d, c);
    *out = t.release();
  });
}

size_t coag_trajectory_snapshot_count(const coag_trajectory_t* t) { return t ? t->t.snapshots.size() : 0; }

coag_status_t coag_trajectory_snapshot(const coag_trajectory_t* t, size_t i, coag_distribution_t** out) {
  COAG_REQUIRE(t != nullptr && out != nullptr, "null argument");
  COAG_REQUIRE(i < t->t.snapshots.size(), "snapshot index out of range");
  return guard([&] { *out = new coag_distribution_s{t->t.snapshots[i]}; });
}

coag_status_t coag_trajectory_moments(const coag_trajectory_t* t, size_t i, double out[6]) {
  COAG_REQUIRE(t != nullptr && out != nullptr, "null argument");
  const auto& m = t->t.moments;
  COAG_REQUIRE(i < m.size(), "snapshot index out of range");
  out[0] = m.times[i];
  out[1] = m.m0[i];
  out[2] = m.m05[i];
  out[3] = m.m1[i];
  out[4] = m.m2[i];
  out[5] = m.gel_mass[i];
  return COAG_OK;
}

coag_flag_t coag_trajectory_flag(const coag_trajectory_t* t) {
  if (!t) return COAG_FLAG_NONE;
  switch (t->t.flag) {
    case coag::TrajectoryFlag::StepUnderflow:
      return COAG_FLAG_STEP_UNDERFLOW;
    case coag::TrajectoryFlag::StepBudget:
      return COAG_FLAG_STEP_BUDGET;
    case coag::TrajectoryFlag::GelationStiffness:
      return COAG_FLAG_GELATION_STIFFNESS;
    default:
      return COAG_FLAG_NONE;
  }
}

double coag_trajectory_stop_time(const coag_trajectory_t* t) { return t ? t->t.stop_time : 0.0; }

void coag_trajectory_free(coag_trajectory_t* t) { delete t; }

// Reference

coag_status_t coag_exact_moments(const coag_kernel_t* k, double t, double out[3]) {
  COAG_REQUIRE(k != nullptr && out != nullptr, "null argument");
  return guard([&] {
    auto r = coag::exact_solution(k->k, t);
    out[0] = r.moments.m0;
    out[1] = r.moments.m1;
    out[2] = r.moments.m2;
  });
}

coag_status_t coag_exact_distribution(const coag_kernel_t* k, double t, double* out, size_t n) {
  COAG_REQUIRE(k != nullptr && (out != nullptr || n == 0), "null argument");
  std::vector<double> v;
  coag_status_t s = guard([&] {
    auto r = coag::exact_solution(k->k, t, static_cast<int>(n));
    if (r.kind != coag::OracleResult::Kind::FullDistribution)
      coag::fail(coag::Status::Unsupported, "only moments are available for kernel " + k->k.name());
    v = r.values;
  });
  if (s != COAG_OK) return s;
  return copy_vec(v, out, n);
}

// Compactness

coag_status_t coag_dlvp_power_tail(double coeff, double exponent, const double* alphas, const double* betas,
                                   size_t terms, coag_vp_function_t** out) {
  COAG_REQUIRE(out != nullptr && alphas != nullptr && betas != nullptr, "null argument");
  COAG_REQUIRE(coeff > 0.0 && exponent < 0.0, "tail must be coeff * c^exponent with coeff > 0, exponent < 0");
  g_constructive_index = -1;
  return guard([&] {
    std::vector<double> a(alphas, alphas + terms), b(betas, betas + terms);
    auto tail = [coeff, exponent](double c) { return coeff * std::pow(c, exponent); };
    auto phi = std::make_unique<coag_vp_function_s>();
    phi->phi = coag::dlvp_construct(tail, a, b);
    *out = phi.release();
  });
}

size_t coag_vp_breakpoint_count(const coag_vp_function_t* phi) { return phi ? phi->phi.N.size() : 0; }

coag_status_t coag_vp_breakpoints(const coag_vp_function_t* phi, int64_t* out, size_t capacity) {
  COAG_REQUIRE(phi != nullptr && out != nullptr, "null argument");
  COAG_REQUIRE(capacity >= phi->phi.N.size(), "output buffer too small");
  for (size_t i = 0; i < phi->phi.N.size(); ++i) out[i] = phi->phi.N[i];
  return COAG_OK;
}

coag_status_t coag_vp_eval(const coag_vp_function_t* phi, double r, int order, double* out) {
  COAG_REQUIRE(phi != nullptr && out != nullptr, "null argument");
  return guard([&] { *out = coag::vp_eval(phi->phi, r, order); });
}

int coag_vp_is_exact(const coag_vp_function_t* phi) { return phi && phi->phi.exact ? 1 : 0; }

coag_status_t coag_vp_derivative_text(const coag_vp_function_t* phi, size_t m, char* buf, size_t capacity,
                                      size_t* needed) {
  COAG_REQUIRE(phi != nullptr, "null argument");
  if (!phi->phi.exact) return set_error(COAG_ERROR_UNSUPPORTED, "construction did not run in exact arithmetic");
  COAG_REQUIRE(m < phi->phi.dphi_q.size(), "index out of range");
  return copy_text(phi->phi.dphi_q[m].str(), buf, capacity, needed);
}

int coag_last_constructive_index(void) { return g_constructive_index; }

void coag_vp_function_free(coag_vp_function_t* phi) { delete phi; }

int coag_run_command(const char* command, const char* config_path, const char* out_dir, int jobs) {
  if (!command || !config_path) {
    set_error(COAG_ERROR_INVALID_ARGUMENT, "null argument");
    return coag::app::kExitConfig;
  }
  try {
    coag::app::CommandOptions o;
    o.command = command;
    o.config_path = config_path;
    o.out_dir = out_dir ? out_dir : "";
    o.jobs = jobs;
    return coag::app::run_command(o);
  } catch (const std::exception& e) {
    set_error(COAG_ERROR_INTERNAL, e.what());
    return coag::app::kExitTolerance;
  }
}

}  // extern "C"
