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

#include "compactness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "error.hpp"

namespace coag {

FunctionFamily FunctionFamily::from_snapshots(const std::vector<SizeDistribution>& snaps) {
  FunctionFamily f;
  if (snaps.empty()) return f;
  f.measures = snaps.front().grid->widths;
  for (const auto& s : snaps) {
    if (s.density.size() != f.measures.size()) fail(Status::InvalidArgument, "snapshots do not share a grid");
    f.members.push_back(s.density);
  }
  return f;
}

void FunctionFamily::validate() const {
  for (double m : measures)
    if (!(m > 0.0) || !std::isfinite(m)) fail(Status::InvalidArgument, "cell measures must be positive and finite");
  for (const auto& f : members) {
    if (f.size() != measures.size()) fail(Status::InvalidArgument, "family members must share the common grid");
    for (double v : f)
      if (!std::isfinite(v)) fail(Status::InvalidArgument, "family members must be finite");
  }
}

double FunctionFamily::sup_l1() const {
  double best = 0.0;
  for (const auto& f : members) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::fabs(f[i]) * measures[i];
    best = std::max(best, s);
  }
  return best;
}

FunctionFamily synthetic_family(const std::string& name, int cells, int members) {
  if (cells < 1 || members < 1) fail(Status::InvalidArgument, "synthetic family needs positive sizes");
  FunctionFamily f;
  if (name == "concentrating") {
    std::vector<double> edges{0.0};
    for (int n = members; n >= 1; --n) edges.push_back(1.0 / n);
    for (std::size_t i = 1; i < edges.size(); ++i) f.measures.push_back(edges[i] - edges[i - 1]);
    for (int n = 1; n <= members; ++n) {
      std::vector<double> v(f.measures.size(), 0.0);
      // Cells 0..members-n cover (0, 1/n).
      for (int i = 0; i <= members - n; ++i) v[static_cast<std::size_t>(i)] = n;
      f.members.push_back(std::move(v));
    }
    return f;
  }
  const double h = 1.0 / cells;
  f.measures.assign(static_cast<std::size_t>(cells), h);
  if (name == "bounded") {
    for (int k = 1; k <= members; ++k) {
      std::vector<double> v(static_cast<std::size_t>(cells));
      for (int i = 0; i < cells; ++i) v[static_cast<std::size_t>(i)] = 1.0 + static_cast<double>(k) / members * (i + 0.5) * h;
      f.members.push_back(std::move(v));
    }
    return f;
  }
  if (name == "inverse_sqrt") {
    std::vector<double> v(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) {
      double a = i * h, b = (i + 1) * h;
      v[static_cast<std::size_t>(i)] = 2.0 * (std::sqrt(b) - std::sqrt(a)) / h;
    }
    f.members.push_back(std::move(v));
    return f;
  }
  fail(Status::InvalidArgument, "unknown synthetic family '" + name + "'");
}

double eta_modulus(const FunctionFamily& fam, double eps) {
  if (!(eps > 0.0)) fail(Status::Domain, "eta modulus needs eps > 0");
  fam.validate();
  const std::size_t n = fam.measures.size();
  std::vector<std::size_t> order(n);
  double best = 0.0;
  for (const auto& f : fam.members) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(f[a]) > std::fabs(f[b]); });
    double left = eps, acc = 0.0;
    for (std::size_t i : order) {
      if (left <= 0.0) break;
      double take = std::min(left, fam.measures[i]);
      acc += std::fabs(f[i]) * take;
      left -= take;
    }
    best = std::max(best, acc);
  }
  return best;
}

double family_tail(const FunctionFamily& fam, double c) {
  double best = 0.0;
  for (const auto& f : fam.members) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::fabs(f[i]) >= c) s += std::fabs(f[i]) * fam.measures[i];
    best = std::max(best, s);
  }
  return best;
}

EtaLimit eta_limit(const FunctionFamily& fam, const std::vector<double>& thresholds) {
  if (thresholds.empty()) fail(Status::InvalidArgument, "eta limit needs at least one threshold");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1])) fail(Status::InvalidArgument, "thresholds must be increasing");
  fam.validate();
  EtaLimit out;
  out.thresholds = thresholds;
  for (double c : thresholds) {
    double v = family_tail(fam, c);
    // Non-increasing by construction; guard against ties in floating comparison.
    if (!out.tails.empty()) v = std::min(v, out.tails.back());
    out.tails.push_back(v);
  }
  out.estimate = out.tails.back();
  return out;
}

double eta_modulus_extrapolated(const FunctionFamily& fam) {
  fam.validate();
  double mmin = std::numeric_limits<double>::infinity();
  for (double m : fam.measures) mmin = std::min(mmin, m);
  if (!std::isfinite(mmin)) return 0.0;
  double e1 = 0.5 * mmin, e2 = 0.25 * mmin;
  double v1 = eta_modulus(fam, e1), v2 = eta_modulus(fam, e2);
  return 2.0 * v2 - v1;
}

TailFn tail_from_table(const std::map<double, double>& table) {
  if (table.empty()) fail(Status::InvalidArgument, "tail table is empty");
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [c, v] : table) {
    if (!(v >= 0.0) || v > prev * (1.0 + 1e-12)) fail(Status::InvalidArgument, "tail table must be non-negative and non-increasing");
    prev = v;
  }
  return [table](double c) {
    auto it = table.upper_bound(c);
    if (it == table.begin()) return std::numeric_limits<double>::infinity();
    return std::prev(it)->second;
  };
}

TailFn tail_from_family(const FunctionFamily& fam) {
  fam.validate();
  return [fam](double c) { return family_tail(fam, c); };
}

namespace {

std::int64_t to_i64(Rational::int_t v) {
  if (v > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("breakpoint overflow");
  return static_cast<std::int64_t>(v);
}

// Smallest integer N >= lower with tail(N) <= beta, or -1 beyond max.
std::int64_t smallest_admissible(const TailFn& tail, std::int64_t lower, double beta, std::int64_t max) {
  if (lower > max) return -1;
  if (tail(static_cast<double>(lower)) <= beta) return lower;
  std::int64_t lo = lower, hi = lower;
  for (;;) {
    if (hi > max / 2) {
      hi = max;
      if (tail(static_cast<double>(hi)) > beta) return -1;
      break;
    }
    hi *= 2;
    if (tail(static_cast<double>(hi)) <= beta) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (tail(static_cast<double>(mid)) <= beta) hi = mid;
    else lo = mid;
  }
  return hi;
}

void finish_float(VPFunction& v) {
  std::size_t M = v.N.size() - 1;
  v.A.resize(M);
  v.B.resize(M);
  double sum_alpha = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    double dn = static_cast<double>(v.N[m + 1] - v.N[m]);
    v.A[m] = v.alpha[m] / dn;
    v.B[m] = (m == 0) ? 0.0 : sum_alpha + v.A[0] * static_cast<double>(v.N[0]) - v.A[m] * static_cast<double>(v.N[m]);
    sum_alpha += v.alpha[m];
  }
}

void finish_exact(VPFunction& v, const std::vector<Rational>& q) {
  std::size_t M = v.N.size() - 1;
  v.A_q.resize(M);
  v.B_q.resize(M);
  v.dphi_q.resize(M + 1);
  Rational sum(0);
  for (std::size_t m = 0; m < M; ++m) {
    v.A_q[m] = q[m] / Rational(v.N[m + 1] - v.N[m]);
    v.B_q[m] = (m == 0) ? Rational(0) : sum + v.A_q[0] * Rational(v.N[0]) - v.A_q[m] * Rational(v.N[m]);
    sum = sum + q[m];
  }
  Rational first = q[0] / Rational(v.N[1] - v.N[0]);
  Rational acc(0);
  for (std::size_t m = 0; m <= M; ++m) {
    v.dphi_q[m] = (m == 0) ? first * Rational(v.N[0]) : acc + first;
    if (m < M) acc = acc + q[m];
  }
  v.A.resize(M);
  v.B.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    v.A[m] = v.A_q[m].to_double();
    v.B[m] = v.B_q[m].to_double();
  }
}

void finish_phi(VPFunction& v) {
  std::size_t M = v.N.size() - 1;
  v.phi_at_N.resize(M + 1);
  v.phi_at_N[0] = 0.5 * v.A[0] * static_cast<double>(v.N[0]) * static_cast<double>(v.N[0]);
  for (std::size_t m = 0; m < M; ++m) {
    double a = static_cast<double>(v.N[m]), b = static_cast<double>(v.N[m + 1]);
    v.phi_at_N[m + 1] = v.phi_at_N[m] + (b - a) * (v.A[m] * (a + b) / 2.0 + v.B[m]);
  }
}

}  // namespace

VPFunction dlvp_construct(const TailFn& tail, const std::vector<double>& alphas, const std::vector<double>& betas,
                          const DlvpOptions& opt) {
  if (alphas.size() < 2 || alphas.size() != betas.size())
    fail(Status::InvalidArgument, "alphas and betas must have equal length >= 2");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (!(alphas[i] > 0.0) || !(betas[i] > 0.0) || !std::isfinite(alphas[i]) || !std::isfinite(betas[i]))
      fail(Status::InvalidArgument, "alphas and betas must be positive and finite");
  double ab = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) ab += alphas[i] * betas[i];
  if (!std::isfinite(ab)) fail(Status::InvalidArgument, "sum of alpha_m beta_m must be finite");

  const std::size_t M = alphas.size() - 1;
  VPFunction v;
  v.alpha = alphas;
  v.beta = betas;
  v.N.push_back(1);
  v.tail_at_N.push_back(tail(1.0));

  std::vector<Rational> q;
  bool exact = opt.prefer_exact;
  if (exact) {
    for (double a : alphas) {
      auto r = Rational::from_double(a);
      if (!r) {
        exact = false;
        break;
      }
      q.push_back(*r);
    }
  }

  for (std::size_t m = 1; m <= M; ++m) {
    std::int64_t lower = 2;
    if (m >= 2) {
      std::int64_t prev = v.N[m - 1];
      bool done = false;
      if (exact) {
        try {
          Rational need = Rational(prev) * (Rational(1) + q[m - 1] / q[m - 2]);
          lower = to_i64(need.ceil());
          done = true;
        } catch (const std::overflow_error&) {
          exact = false;
        }
      }
      if (!done) {
        double need = static_cast<double>(prev) * (1.0 + alphas[m - 1] / alphas[m - 2]);
        if (!(need < static_cast<double>(opt.max_threshold))) {
          std::ostringstream os;
          os << "growth constraint pushes N_" << m << " beyond the threshold range";
          throw ConstructiveError(static_cast<int>(m), os.str());
        }
        lower = static_cast<std::int64_t>(std::ceil(need * (1.0 - 4.0 * std::numeric_limits<double>::epsilon())));
        if (static_cast<double>(lower) < need * (1.0 - 1e-15)) ++lower;
      }
      lower = std::max(lower, prev + 1);
    }
    std::int64_t Nm = smallest_admissible(tail, lower, betas[m], opt.max_threshold);
    if (Nm < 0) {
      std::ostringstream os;
      os << "tail never drops below beta_" << m << " = " << betas[m] << " within thresholds <= " << opt.max_threshold
         << "; first unmet index m = " << m;
      throw ConstructiveError(static_cast<int>(m), os.str());
    }
    double tv = tail(static_cast<double>(Nm));
    if (tv > v.tail_at_N.back() * (1.0 + 1e-12) + 1e-300)
      fail(Status::InvalidArgument, "tail function is not non-increasing");
    v.N.push_back(Nm);
    v.tail_at_N.push_back(tv);
  }

  if (exact) {
    try {
      finish_exact(v, q);
      v.exact = true;
    } catch (const std::overflow_error&) {
      v.exact = false;
      v.A_q.clear();
      v.B_q.clear();
      v.dphi_q.clear();
    }
  }
  if (!v.exact) finish_float(v);
  finish_phi(v);
  return v;
}

double VPFunction::eval(double r, int order) const {
  if (!(r >= 0.0)) fail(Status::Domain, "Phi evaluated at a negative argument");
  if (order < 0 || order > 2) fail(Status::InvalidArgument, "order must be 0, 1 or 2");
  const std::size_t M = A.size();
  std::size_t m = 0;
  if (r >= static_cast<double>(N[1])) {
    auto it = std::upper_bound(N.begin(), N.end(), r, [](double x, std::int64_t b) { return x < static_cast<double>(b); });
    m = static_cast<std::size_t>(it - N.begin()) - 1;
    if (m >= M) m = M - 1;
  }
  if (order == 2) return A[m];
  if (order == 1) return A[m] * r + B[m];
  if (m == 0) return 0.5 * A[0] * r * r;
  double a = static_cast<double>(N[m]);
  return phi_at_N[m] + (r - a) * (A[m] * (r + a) / 2.0 + B[m]);
}

double vp_eval(const VPFunction& phi, double r, int order) { return phi.eval(r, order); }

bool VPReport::pass() const {
  for (const auto& c : checks)
    if (!c.skipped && c.violations > 0) return false;
  return true;
}

Profile profile_of(const VPFunction& phi) {
  Profile p;
  p.phi = [phi](double r) { return phi.eval(r, 0); };
  p.dphi = [phi](double r) { return phi.eval(r, 1); };
  p.breakpoints = phi.N;
  return p;
}

Profile square_profile() {
  Profile p;
  p.phi = [](double r) { return r * r; };
  p.dphi = [](double r) { return 2.0 * r; };
  return p;
}

std::vector<Triple> random_triples(std::size_t n, double rmax, double lmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.0, rmax), ul(0.0, lmax);
  std::vector<Triple> out(n);
  for (auto& t : out) {
    t.r = ur(rng);
    t.s = ur(rng);
    t.lambda = ul(rng);
  }
  return out;
}

namespace {

struct Acc {
  CheckResult res;
  double tol;
  explicit Acc(std::string name, double t) : tol(t) {
    res.name = std::move(name);
    res.min_margin = std::numeric_limits<double>::infinity();
  }
  void add(double lhs, double rhs) {
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    double m = (rhs - lhs) / scale;
    ++res.evaluated;
    if (m < -tol) ++res.violations;
    if (m < res.min_margin) {
      res.min_margin = m;
      res.worst_lhs = lhs;
      res.worst_rhs = rhs;
    }
  }
  CheckResult done() {
    if (res.evaluated == 0) {
      res.skipped = true;
      res.min_margin = 0.0;
    }
    return res;
  }
};

}  // namespace

VPReport vp_check(const Profile& p, const std::vector<Triple>& samples, const FunctionFamily* fam, double rel_tol) {
  Acc concave("concavity_of_phi_over_r", rel_tol), euler("phi_le_r_dphi_le_2phi", rel_tol),
      young("s_dphi_le_phi_r_plus_phi_s", rel_tol), scale("scaling_bound", rel_tol),
      defect("superadditivity_defect_bound", rel_tol), subadd("dphi_subadditive", rel_tol),
      tailsum("tail_sum_bound", rel_tol);
  for (const auto& t : samples) {
    if (t.r < 0.0 || t.s < 0.0 || t.lambda < 0.0) fail(Status::Domain, "vp_check samples must be non-negative");
    const double r = t.r, s = t.s, l = t.lambda;
    const double pr = p.phi(r), ps = p.phi(s), dr = p.dphi(r), ds = p.dphi(s);
    if (r > 0.0 && s > 0.0) {
      double mid = 0.5 * (r + s);
      concave.add(0.5 * (pr / r + ps / s), p.phi(mid) / mid);
    }
    euler.add(pr, r * dr);
    euler.add(r * dr, 2.0 * pr);
    young.add(s * dr, pr + ps);
    scale.add(p.phi(l * r), std::max(1.0, l * l) * pr);
    defect.add((r + s) * (p.phi(r + s) - pr - ps), 2.0 * (r * ps + s * pr));
    subadd.add(p.dphi(r + s), dr + ds);
  }
  if (fam && !p.breakpoints.empty()) {
    fam->validate();
    const auto& n = p.breakpoints;
    const double d1 = p.dphi(1.0);
    for (const auto& f : fam->members) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) l1 += std::fabs(f[i]) * fam->measures[i];
      FunctionFamily one{fam->measures, {f}};
      double rhs = d1 * l1;
      for (std::size_t k = 1; k < n.size(); ++k) {
        double nj = static_cast<double>(n[k - 1]), nk = static_cast<double>(n[k]);
        rhs += (p.dphi(nk) - p.dphi(nj)) * family_tail(one, nj);
        double lhs = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
          if (std::fabs(f[i]) < nk) lhs += p.phi(std::fabs(f[i])) * fam->measures[i];
        tailsum.add(lhs, rhs);
      }
    }
  }
  VPReport rep;
  rep.checks = {concave.done(), euler.done(), young.done(), scale.done(),
                defect.done(), subadd.done(), tailsum.done()};
  return rep;
}

VPReport vp_check(const VPFunction& phi, const std::vector<Triple>& samples, const FunctionFamily* fam,
                  double rel_tol) {
  return vp_check(profile_of(phi), samples, fam, rel_tol);
}

VPReport vp_constraints(const VPFunction& v, double rel_tol) {
  const std::size_t M = v.A.size();
  Acc c1("slopes_non_increasing", rel_tol), c2("derivative_continuity", rel_tol),
      c3("derivative_increasing_at_breakpoints", rel_tol), c4("weighted_tail_series", rel_tol),
      d("derivative_at_breakpoints", rel_tol), sl("superlinearity_proxy", rel_tol),
      as("alpha_partial_sums_increasing", rel_tol);
  auto exact_add = [](Acc& acc, bool ok, double lhs, double rhs) {
    ++acc.res.evaluated;
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    double m = ok ? std::max(0.0, (rhs - lhs) / scale) : -1.0;
    if (!ok) ++acc.res.violations;
    if (m < acc.res.min_margin) {
      acc.res.min_margin = m;
      acc.res.worst_lhs = lhs;
      acc.res.worst_rhs = rhs;
    }
  };
  for (std::size_t m = 0; m + 1 < M; ++m) {
    double Nn = static_cast<double>(v.N[m + 1]);
    if (v.exact) {
      exact_add(c1, v.A_q[m + 1] <= v.A_q[m], v.A_q[m + 1].to_double(), v.A_q[m].to_double());
      Rational lhs = v.A_q[m + 1] * Rational(v.N[m + 1]) + v.B_q[m + 1];
      Rational rhs = v.A_q[m] * Rational(v.N[m + 1]) + v.B_q[m];
      exact_add(c2, lhs == rhs, lhs.to_double(), rhs.to_double());
    } else {
      c1.add(v.A[m + 1], v.A[m]);
      double lhs = v.A[m + 1] * Nn + v.B[m + 1], rhs = v.A[m] * Nn + v.B[m];
      c2.add(lhs, rhs);
      c2.add(rhs, lhs);
    }
  }
  for (std::size_t m = 0; m + 1 < M; ++m) {
    double a = v.A[m] * static_cast<double>(v.N[m]) + v.B[m];
    double b = v.A[m + 1] * static_cast<double>(v.N[m + 1]) + v.B[m + 1];
    exact_add(c3, b > a, a, b);
  }
  {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      lhs += v.A[m] * static_cast<double>(v.N[m + 1] - v.N[m]) * v.beta[m];
      rhs += v.alpha[m] * v.beta[m];
    }
    c4.add(lhs, rhs);
    c4.add(rhs, lhs);
  }
  double first = v.alpha[0] / static_cast<double>(v.N[1] - v.N[0]);
  double acc = 0.0;
  for (std::size_t m = 1; m <= M; ++m) {
    acc += v.alpha[m - 1];
    double expect = acc + first;
    double got = v.eval(static_cast<double>(v.N[m]), 1);
    if (v.exact) {
      Rational want(0);
      for (std::size_t i = 0; i < m; ++i) want = want + *Rational::from_double(v.alpha[i]);
      want = want + v.dphi_q[0] / Rational(v.N[0]);
      exact_add(d, want == v.dphi_q[m], got, want.to_double());
    }
    d.add(got, expect);
    d.add(expect, got);
  }
  for (std::size_t m = 0; m < M; ++m) {
    double a = v.phi_at_N[m] / static_cast<double>(v.N[m]);
    double b = v.phi_at_N[m + 1] / static_cast<double>(v.N[m + 1]);
    exact_add(sl, b > a, a, b);
  }
  double s = 0.0;
  for (std::size_t m = 0; m < v.alpha.size(); ++m) {
    double n = s + v.alpha[m];
    exact_add(as, n > s, s, n);
    s = n;
  }
  VPReport rep;
  rep.checks = {c1.done(), c2.done(), c3.done(), c4.done(), d.done(), sl.done(), as.done()};
  return rep;
}

double phi_integral(const Profile& p, const SizeDistribution& d, double R) {
  const SizeGrid& g = *d.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (g.pivots[i] < R) s += p.phi(std::fabs(d.density[i])) * g.widths[i];
  return s;
}

double phi_integral(const VPFunction& phi, const SizeDistribution& d, double R) {
  return phi_integral(profile_of(phi), d, R);
}

}  // namespace coag
