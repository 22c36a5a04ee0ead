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

#ifndef COAG_CORE_COMPACTNESS_HPP
#define COAG_CORE_COMPACTNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rational.hpp"
#include "state.hpp"

namespace coag {

// Piecewise-constant functions on a common grid of cells with the given measures.
struct FunctionFamily {
  std::vector<double> measures;
  std::vector<std::vector<double>> members;

  static FunctionFamily from_snapshots(const std::vector<SizeDistribution>& snaps);
  void validate() const;
  double sup_l1() const;
};

double eta_modulus(const FunctionFamily& fam, double eps);

// Test families on (0,1): "bounded" (1 + k x / M), "concentrating" (n on (0,1/n), n <= M, with cell
// edges at every 1/n) and "inverse_sqrt" (cell averages of x^{-1/2}).
FunctionFamily synthetic_family(const std::string& name, int cells, int members);

struct EtaLimit {
  double estimate = 0.0;
  std::vector<double> thresholds;
  std::vector<double> tails;
};

// sup over members of the integral of |f| on {|f| >= c}.
double family_tail(const FunctionFamily& fam, double c);
EtaLimit eta_limit(const FunctionFamily& fam, const std::vector<double>& thresholds);
// eps -> 0 limit of eta_modulus by linear Richardson extrapolation below the smallest cell.
double eta_modulus_extrapolated(const FunctionFamily& fam);

using TailFn = std::function<double(double)>;
// Right-continuous upper step function from a threshold -> tail table.
TailFn tail_from_table(const std::map<double, double>& table);
TailFn tail_from_family(const FunctionFamily& fam);

struct VPFunction {
  std::vector<std::int64_t> N;     // N_0 = 1 < N_1 < ... < N_M
  std::vector<double> alpha;       // alpha_0..alpha_M
  std::vector<double> beta;        // beta_0..beta_M
  std::vector<double> A;           // A_0..A_{M-1}
  std::vector<double> B;           // B_0..B_{M-1}
  std::vector<double> phi_at_N;    // Phi(N_m)
  std::vector<double> tail_at_N;   // tail(N_m) as evaluated during construction
  bool exact = false;
  std::vector<Rational> A_q, B_q, dphi_q;  // exact slopes, intercepts, Phi'(N_m)

  std::size_t pieces() const { return A.size(); }
  double eval(double r, int order) const;
};

struct DlvpOptions {
  std::int64_t max_threshold = (std::int64_t{1} << 53);
  bool prefer_exact = true;
};

VPFunction dlvp_construct(const TailFn& tail, const std::vector<double>& alphas, const std::vector<double>& betas,
                          const DlvpOptions& opt = {});

double vp_eval(const VPFunction& phi, double r, int order);

struct CheckResult {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;  // min over samples of (rhs - lhs) / scale
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  bool skipped = false;
};

struct VPReport {
  std::vector<CheckResult> checks;
  bool pass() const;
};

struct Profile {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::vector<std::int64_t> breakpoints;  // for the tail-sum bound; empty skips it
};

Profile profile_of(const VPFunction& phi);
Profile square_profile();

struct Triple {
  double r, s, lambda;
};
std::vector<Triple> random_triples(std::size_t n, double rmax, double lmax, std::uint64_t seed);

// The seven inequality families; the tail-sum bound needs a family.
VPReport vp_check(const Profile& p, const std::vector<Triple>& samples, const FunctionFamily* fam = nullptr,
                  double rel_tol = 1e-12);
VPReport vp_check(const VPFunction& phi, const std::vector<Triple>& samples, const FunctionFamily* fam = nullptr,
                  double rel_tol = 1e-12);

// Structural constraints (c1)-(c4), derivative identity at breakpoints and superlinearity proxy.
VPReport vp_constraints(const VPFunction& phi, double rel_tol = 1e-12);

double phi_integral(const Profile& p, const SizeDistribution& d, double R);
double phi_integral(const VPFunction& phi, const SizeDistribution& d, double R);

}  // namespace coag

#endif
