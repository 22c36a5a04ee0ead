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

#ifndef COAG_CORE_SOLVER_HPP
#define COAG_CORE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "state.hpp"

namespace coag {

enum class Boundary { Conservative, Absorbing };

struct Scheme {
  enum class Kind { RK4Fixed, RK45Adaptive };
  Kind kind = Kind::RK45Adaptive;
  double dt = 1e-3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
};

enum class GainPath { Auto, Direct, Fast };

struct SolverConfig {
  Kernel kernel;
  std::optional<double> truncation_n;  // Cap level; the default cap applies when absent
  bool default_cap = true;
  Scheme scheme;
  Boundary boundary = Boundary::Conservative;
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  GainPath gain_path = GainPath::Auto;
  std::uint64_t max_steps = 50'000'000;
  // Conservative runs of gelling kernels stop once this fraction of the initial mass
  // has been suppressed at the grid end.
  double gel_leak_tolerance = 1e-8;
};

struct RateSplit {
  std::vector<double> gain;         // Q1, number per cell per unit time
  std::vector<double> loss;         // Q2
  std::vector<double> loss_factor;  // L
  double gel_rate = 0.0;            // mass per unit time leaving the grid (Absorbing)
  double suppressed_rate = 0.0;     // mass rate of pairs dropped (Conservative)
};

RateSplit rates(const SizeDistribution& d, const Kernel& k, Boundary b = Boundary::Conservative);

// Smallest cap level that leaves min{K, n} unsaturated on the grid.
double default_cap(const Kernel& k, const SizeGrid& g);

enum class TrajectoryFlag { None, StepUnderflow, StepBudget, GelationStiffness };
std::string flag_name(TrajectoryFlag f);

struct StepLog {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rhs_evals = 0;
  std::uint64_t clamp_events = 0;
  double max_clamped = 0.0;         // largest |negative| relative to the max density at the time
  double min_dt = 0.0;
  double last_dt = 0.0;
  bool fast_path = false;
};

struct Trajectory {
  std::vector<SizeDistribution> snapshots;
  MomentSeries moments;
  StepLog log;
  TrajectoryFlag flag = TrajectoryFlag::None;
  std::string flag_message;
  double stop_time = 0.0;
  Kernel kernel;  // effective kernel, truncation included
  Boundary boundary = Boundary::Conservative;
  double suppressed_mass = 0.0;
  std::vector<double> gel_mass;  // per snapshot

  bool flagged() const { return flag != TrajectoryFlag::None; }
};

Trajectory integrate(const SizeDistribution& init, const SolverConfig& cfg);

// The snapshot schedule actually used: requested times within (0, t_end] plus 0 and t_end.
std::vector<double> snapshot_schedule(const SolverConfig& cfg);

}  // namespace coag

#endif
