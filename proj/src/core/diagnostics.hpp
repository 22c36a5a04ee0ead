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

#ifndef COAG_CORE_DIAGNOSTICS_HPP
#define COAG_CORE_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compactness.hpp"
#include "kernel.hpp"
#include "solver.hpp"
#include "state.hpp"

namespace coag {

// One inequality lhs <= rhs evaluated at a list of times.
struct MarginSeries {
  std::string name;
  std::vector<double> times, lhs, rhs;
  double min_margin = 0.0;  // min of (rhs - lhs) / max(|rhs|, |lhs|) over evaluated points
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  double slack = 1e-9;
  std::string note;

  MarginSeries() = default;
  explicit MarginSeries(std::string n) : name(std::move(n)) {}

  // `counted` false records the point without letting it drive min_margin (t = 0 equality).
  void add(double t, double l, double r, bool counted = true);
  bool pass() const { return violations == 0; }
};

struct TestFunction {
  enum class Kind { One, Identity, MinWithA, Tabulated };
  Kind kind = Kind::One;
  double A = 1.0;
  std::vector<double> tab_x, tab_v;  // piecewise linear, constant beyond the ends

  static TestFunction one() { return {}; }
  static TestFunction identity() {
    TestFunction t;
    t.kind = Kind::Identity;
    return t;
  }
  static TestFunction min_with(double a) {
    TestFunction t;
    t.kind = Kind::MinWithA;
    t.A = a;
    return t;
  }
  double operator()(double x) const;
  std::string describe() const;
};

struct WeakFormResidual {
  TestFunction theta;
  std::vector<double> t0, t1;
  std::vector<double> change;    // int theta (f(t1) - f(t0))
  std::vector<double> predicted; // int_{t0}^{t1} of the discrete theta-moment rate, trapezoid
  std::vector<double> residual;
  double max_abs = 0.0;
};

// Uses the solver's discrete rates, so overflow handling matches the run's boundary.
WeakFormResidual weak_form_residual(const Trajectory& traj, const Kernel& kernel, const TestFunction& theta);

// The theta-moment rate of a single state under the solver quadrature.
double theta_rate(const SizeDistribution& d, const Kernel& k, const TestFunction& theta, Boundary b);

struct FluxSplit {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0;
  double theta_rate = 0.0;  // 1/2 sum theta~_A K n n over all pairs, no grid truncation
};

FluxSplit flux_decomposition(const SizeDistribution& d, const Kernel& k, double A);

enum class BoundKind { PhiGronwall, PsiMoment, ProductL2, EquiContinuity };
std::string bound_name(BoundKind b);

struct BoundParams {
  Profile phi = square_profile();  // PhiGronwall
  double R = 10.0;                 // PhiGronwall window, EquiContinuity cut for product kernels
  double A = 4.0;                  // ProductL2 tail level
  std::optional<double> radial_cap;  // r_n = min{r, n} for ProductL2
};

struct BoundReport {
  BoundKind kind;
  double constant = 0.0;  // C1, C3, 2 M0 / (2 M1 / A), C2 or C4 depending on kind
  std::vector<MarginSeries> series;
  bool pass() const;
  double min_margin() const;
};

// Throws Unsupported when the kernel class does not carry the bound.
BoundReport bound_monitor(const Trajectory& traj, const Kernel& kernel, BoundKind which,
                          const BoundParams& p = {});

struct ComparisonReport {
  std::vector<double> times, Y, M2;
  MarginSeries margin;
  std::optional<double> blowup_time;
  double divergence_integral = 0.0;  // int_1^{1e6} dx / r^2
  bool hypothesis_ok = false;
  std::string note;
};

ComparisonReport comparison_ode(const Trajectory& traj, const RadialRate& r);

struct XiChoice {
  enum class Kind { PowerShifted, RatioShifted };
  Kind kind = Kind::PowerShifted;
  double exponent = 0.25;  // (A - 1)_+^exponent

  static XiChoice power_shifted(double e) { return {Kind::PowerShifted, e}; }
  static XiChoice ratio_shifted() { return {Kind::RatioShifted, 0.0}; }
};

double xi_eval(const XiChoice& xi, const RadialRate& r, double x);
// int_0^inf xi'(A) A^{-1/2} dA; Domain error when xi is inadmissible.
double xi_integral(const XiChoice& xi, const RadialRate& r);

struct GelationReport {
  std::optional<double> t_gel_detected;
  std::optional<double> t_gel_upper_bound;
  std::vector<double> times;
  std::vector<double> functional_values;
  double I_xi = 0.0;
  double bound = 0.0;  // 2 I_xi^2 M1(0)
  MarginSeries margin;
  std::string method;
  std::string note;
};

GelationReport gelation_functional(const Trajectory& traj, const RadialRate& r, const XiChoice& xi);

struct DetectPolicy {
  enum class Kind { MassDrop, M2Extrapolation };
  Kind kind = Kind::M2Extrapolation;
  double threshold = 1e-3;
};

// `kernel` is the uncapped kernel (for the finite-time bound); `baseline` is an optional
// Conservative run of the same setup used as the drift reference for MassDrop.
GelationReport gelation_detect(const Trajectory& traj, const Kernel& kernel, const DetectPolicy& policy,
                               const Trajectory* baseline = nullptr);

// 2^{4-lambda} (M0 + I_xi^2 M1) / (kappa_m^2 M1^2) for Gelling kernels, empty otherwise.
std::optional<double> t_gel_upper_bound(const Kernel& kernel, double m0, double m1, double lo = 1.0,
                                        double hi = 1e6);

struct DistanceKind {
  enum class Kind { WeightedL1, CdfWeighted };
  Kind kind = Kind::WeightedL1;
  double scale = 1.0;     // WeightedL1: phi(x) = scale * x^power
  double power = 1.0;
  double lambda = 1.0;    // CdfWeighted weight x^{lambda-1}

  static DistanceKind weighted_l1(double scale, double power) { return {Kind::WeightedL1, scale, power, 1.0}; }
  static DistanceKind cdf_weighted(double lambda) { return {Kind::CdfWeighted, 1.0, 1.0, lambda}; }
};

struct UniquenessReport {
  DistanceKind kind;
  std::vector<double> times, d, rate, envelope;
  double C5 = 0.0;
  MarginSeries margin;
  std::string note;
};

double weighted_l1_distance(const SizeDistribution& a, const SizeDistribution& b, double scale, double power);
double cdf_distance(const SizeDistribution& a, const SizeDistribution& b, double lambda);
// Constant for |d_x K| |R~| <= C5 x^{lambda-1} y^lambda; Unsupported outside the derived families.
double uniqueness_c5(const Kernel& k, double lambda);

UniquenessReport uniqueness_distance(const Trajectory& f1, const Trajectory& f2, const Kernel& kernel,
                                     const DistanceKind& kind);

// Trapezoid rule along sample times.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y);

// Gelling kernels need snapshots dense enough to resolve T_gel; empty when fine.
std::optional<std::string> snapshot_warning(const SolverConfig& cfg);

}  // namespace coag

#endif
