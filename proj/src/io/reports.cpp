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

#include "reports.hpp"

#include <cmath>

#include "format.hpp"

namespace coag::io {

namespace {

// JSON has no inf/nan; keep them as strings so reports stay lossless.
json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  return num(*v);
}

json checks(const std::vector<CheckResult>& cs) {
  json a = json::array();
  for (const auto& c : cs)
    a.push_back({{"name", c.name},
                 {"evaluated", c.evaluated},
                 {"violations", c.violations},
                 {"min_margin", num(c.min_margin)},
                 {"lhs", num(c.worst_lhs)},
                 {"rhs", num(c.worst_rhs)},
                 {"skipped", c.skipped},
                 {"verdict", c.skipped ? "skipped" : (c.violations == 0 ? "pass" : "fail")}});
  return a;
}

}  // namespace

json to_json(const MarginSeries& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.times.size(); ++i) {
    double scale = std::max({std::fabs(m.lhs[i]), std::fabs(m.rhs[i]), 1e-300});
    double mg = (m.rhs[i] - m.lhs[i]) / scale;
    rows.push_back({{"t", num(m.times[i])},
                    {"lhs", num(m.lhs[i])},
                    {"rhs", num(m.rhs[i])},
                    {"margin", num(mg)},
                    {"verdict", mg >= -m.slack ? "pass" : "fail"}});
  }
  json j = {{"name", m.name},
            {"min_margin", num(m.min_margin)},
            {"evaluated", m.evaluated},
            {"violations", m.violations},
            {"verdict", m.pass() ? "pass" : "fail"},
            {"rows", rows}};
  if (!m.note.empty()) j["note"] = m.note;
  return j;
}

json to_json(const WeakFormResidual& w) {
  return {{"theta", w.theta.describe()}, {"t0", nums(w.t0)},           {"t1", nums(w.t1)},
          {"change", nums(w.change)},    {"predicted", nums(w.predicted)}, {"residual", nums(w.residual)},
          {"max_abs", num(w.max_abs)}};
}

json to_json(const FluxSplit& f) {
  return {{"I1", num(f.I1)}, {"I2", num(f.I2)}, {"I3", num(f.I3)}, {"theta_rate", num(f.theta_rate)}};
}

json to_json(const BoundReport& b) {
  json s = json::array();
  for (const auto& m : b.series) s.push_back(to_json(m));
  return {{"bound", bound_name(b.kind)},
          {"constant", num(b.constant)},
          {"min_margin", num(b.min_margin())},
          {"verdict", b.pass() ? "pass" : "fail"},
          {"series", s}};
}

json to_json(const ComparisonReport& c) {
  return {{"times", nums(c.times)},
          {"Y", nums(c.Y)},
          {"M2", nums(c.M2)},
          {"margin", to_json(c.margin)},
          {"blowup_time", opt(c.blowup_time)},
          {"divergence_integral", num(c.divergence_integral)},
          {"hypothesis_ok", c.hypothesis_ok},
          {"note", c.note}};
}

json to_json(const GelationReport& g) {
  json j = {{"method", g.method},
            {"t_gel_detected", opt(g.t_gel_detected)},
            {"t_gel_upper_bound", opt(g.t_gel_upper_bound)},
            {"times", nums(g.times)},
            {"values", nums(g.functional_values)},
            {"note", g.note}};
  if (g.method == "power_shifted" || g.method == "ratio_shifted") {
    j["I_xi"] = num(g.I_xi);
    j["bound"] = num(g.bound);
    j["margin"] = to_json(g.margin);
  }
  return j;
}

json to_json(const UniquenessReport& u) {
  return {{"kind", u.kind.kind == DistanceKind::Kind::WeightedL1 ? "weighted_l1" : "cdf_weighted"},
          {"scale", num(u.kind.scale)},
          {"power", num(u.kind.power)},
          {"lambda", num(u.kind.lambda)},
          {"C5", num(u.C5)},
          {"times", nums(u.times)},
          {"d", nums(u.d)},
          {"rate", nums(u.rate)},
          {"envelope", nums(u.envelope)},
          {"margin", to_json(u.margin)},
          {"note", u.note}};
}

json to_json(const VPFunction& v) {
  json j = {{"breakpoints", v.N}, {"alphas", nums(v.alpha)}, {"betas", nums(v.beta)}, {"slopes", nums(v.A)},
            {"intercepts", nums(v.B)}, {"phi_at_breakpoints", nums(v.phi_at_N)}, {"tail_at_breakpoints", nums(v.tail_at_N)},
            {"exact", v.exact}};
  if (v.exact) {
    json a = json::array(), b = json::array(), d = json::array();
    for (const auto& q : v.A_q) a.push_back(q.str());
    for (const auto& q : v.B_q) b.push_back(q.str());
    for (const auto& q : v.dphi_q) d.push_back(q.str());
    j["slopes_exact"] = a;
    j["intercepts_exact"] = b;
    j["dphi_at_breakpoints_exact"] = d;
  }
  return j;
}

json to_json(const VPReport& r) { return {{"verdict", r.pass() ? "pass" : "fail"}, {"checks", checks(r.checks)}}; }

json to_json(const EtaLimit& e) {
  return {{"estimate", num(e.estimate)}, {"thresholds", nums(e.thresholds)}, {"tails", nums(e.tails)}};
}

json to_json(const GrowthClass& g) {
  return {{"domain", {num(g.domain_lo), num(g.domain_hi)}},
          {"numeric", g.numeric},
          {"labels", g.labels()},
          {"bounded_kappa0", opt(g.bounded_kappa0)},
          {"sublinear_kappa", opt(g.sublinear_kappa)},
          {"omega_decays", g.omega_decays},
          {"linear_kappa1", opt(g.linear_kappa1)},
          {"product_r", g.product_r ? json(g.product_r->describe()) : json(nullptr)},
          {"gelling_lambda", opt(g.gelling_lambda)},
          {"gelling_kappa_m", opt(g.gelling_kappa_m)}};
}

json to_json(const StepLog& s) {
  return {{"accepted", s.accepted},       {"rejected", s.rejected},       {"rhs_evals", s.rhs_evals},
          {"clamp_events", s.clamp_events}, {"max_clamped", num(s.max_clamped)}, {"min_dt", num(s.min_dt)},
          {"last_dt", num(s.last_dt)},    {"fast_path", s.fast_path}};
}

json to_json(const RadialRate& r) { return r.describe(); }

json kernel_json(const Kernel& k) {
  json j = {{"name", k.name()}, {"cap", opt(k.cap)}};
  return j;
}

void write_margin_csv_header(std::ostream& os) { os << "check,t,lhs,rhs,margin,verdict\n"; }

void write_margin_csv(std::ostream& os, const MarginSeries& m) {
  for (std::size_t i = 0; i < m.times.size(); ++i) {
    double scale = std::max({std::fabs(m.lhs[i]), std::fabs(m.rhs[i]), 1e-300});
    double mg = (m.rhs[i] - m.lhs[i]) / scale;
    os << m.name << ',' << fmt(m.times[i]) << ',' << fmt(m.lhs[i]) << ',' << fmt(m.rhs[i]) << ',' << fmt(mg) << ','
       << (mg >= -m.slack ? "pass" : "fail") << '\n';
  }
}

void write_moments_csv(std::ostream& os, const MomentSeries& m) {
  os << "t,M0,M05,M1,M2,gel_mass\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    os << fmt(m.times[i]) << ',' << fmt(m.m0[i]) << ',' << fmt(m.m05[i]) << ',' << fmt(m.m1[i]) << ','
       << fmt(m.m2[i]) << ',' << fmt(m.gel_mass[i]) << '\n';
}

void write_snapshots_csv(std::ostream& os, const std::vector<SizeDistribution>& snaps) {
  os << "t,cell,size,density\n";
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < s.size(); ++i)
      os << fmt(s.time) << ',' << i << ',' << fmt(s.grid->pivots[i]) << ',' << fmt(s.density[i]) << '\n';
}

}  // namespace coag::io
