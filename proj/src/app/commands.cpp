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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "compactness.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "format.hpp"
#include "reference.hpp"
#include "reports.hpp"
#include "solver.hpp"

#ifndef COAG_VERSION
#define COAG_VERSION "0.0.0"
#endif

namespace coag::app {

namespace fs = std::filesystem;
using nlohmann::json;
using io::RunConfig;

namespace {

using Log = std::function<void(const std::string&)>;

int exit_for(Status s) {
  switch (s) {
    case Status::Config:
    case Status::Io:
    case Status::InvalidArgument:
      return kExitConfig;
    case Status::Unsupported:
    case Status::Domain:
      return kExitUnsupported;
    case Status::Constructive:
      return kExitConstructive;
    default:
      return kExitTolerance;
  }
}

// Higher rank wins when combining outcomes.
int rank(int code) {
  switch (code) {
    case kExitConfig:
      return 5;
    case kExitUnsupported:
      return 4;
    case kExitConstructive:
      return 3;
    case kExitFlagged:
      return 2;
    case kExitTolerance:
      return 1;
    default:
      return 0;
  }
}

int worse(int a, int b) { return rank(b) > rank(a) ? b : a; }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(Status::Io, "cannot write " + p.string());
  out << text;
  if (!out) fail(Status::Io, "write failed for " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

// Kernel handed to diagnostics: the configured one, user cap included. The solver's default
// cap is never binding on the grid, so it is left out.
Kernel diag_kernel(const RunConfig& c) { return c.run_kernel(); }

struct Setup {
  GridPtr grid;
  SizeDistribution init;
  SolverConfig solver;
};

void require_run_sections(const RunConfig& c) {
  std::string missing;
  if (!c.has_kernel) missing += " kernel";
  if (!c.has_grid) missing += " grid";
  if (!c.has_init) missing += " init";
  if (!c.has_solver) missing += " solver";
  if (!missing.empty()) fail(Status::Config, c.path + ":1: missing required section(s):" + missing);
}

Setup make_setup(const RunConfig& c) {
  require_run_sections(c);
  Setup s;
  try {
    s.grid = c.grid.build();
    s.init = init_distribution(s.grid, c.init);
  } catch (const Error& e) {
    // Grid and initial data come straight from the config.
    if (e.status() == Status::InvalidArgument || e.status() == Status::Domain)
      fail(Status::Config, c.path + ": /grid, /init: " + e.what());
    throw;
  }
  s.solver = c.solver;
  s.solver.kernel = c.run_kernel();
  return s;
}

json run_info(const RunConfig& c, const Trajectory& traj, const std::vector<std::string>& warnings) {
  json j;
  j["config_hash"] = c.hash;
  j["config"] = c.raw;
  j["version"] = {{"coag", COAG_VERSION},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef __VERSION__
                  {"compiler", __VERSION__},
#endif
                  {"cxx", static_cast<long>(__cplusplus)}};
  j["kernel"] = io::kernel_json(c.kernel);
  j["effective_kernel"] = io::kernel_json(traj.kernel);
  j["boundary"] = traj.boundary == Boundary::Absorbing ? "absorbing" : "conservative";
  j["flag"] = flag_name(traj.flag);
  if (traj.flagged()) j["flag_message"] = traj.flag_message;
  j["stop_time"] = traj.stop_time;
  j["suppressed_mass"] = traj.suppressed_mass;
  j["step_log"] = io::to_json(traj.log);
  j["snapshots"] = traj.snapshots.size();
  j["warnings"] = warnings;
  return j;
}

void write_run_csv(const fs::path& dir, const RunConfig& c, const Trajectory& traj) {
  if (!c.csv) return;
  std::ostringstream m, s;
  io::write_moments_csv(m, traj.moments);
  io::write_snapshots_csv(s, traj.snapshots);
  write_file(dir / "moments.csv", m.str());
  write_file(dir / "snapshots.csv", s.str());
}

std::optional<RadialRate> pick_radial(const json& params, const Kernel& k) {
  if (params.contains("radial")) return io::parse_radial(params.at("radial"));
  return k.radial();
}

XiChoice default_xi(const Kernel& k) {
  Kernel base = k;
  base.cap.reset();
  try {
    auto gc = classify(base, 1.0, 1e6);
    if (gc.gelling_lambda) return XiChoice::power_shifted(std::max(0.0, (2.0 - *gc.gelling_lambda) / 2.0));
  } catch (const Error&) {
  }
  return XiChoice::ratio_shifted();
}

XiChoice xi_from_json(const json& j) {
  if (j.value("kind", std::string("power_shifted")) == "ratio_shifted") return XiChoice::ratio_shifted();
  return XiChoice::power_shifted(j.value("exponent", 0.25));
}

DetectPolicy policy_from_json(const json& j, const DetectPolicy& fallback) {
  DetectPolicy p = fallback;
  if (j.contains("policy"))
    p.kind = j.at("policy") == "mass_drop" ? DetectPolicy::Kind::MassDrop : DetectPolicy::Kind::M2Extrapolation;
  if (j.contains("threshold")) p.threshold = j.at("threshold").get<double>();
  return p;
}

// Adds `delta` of L1 mass to the cell after the density maximum.
SizeDistribution perturb(const SizeDistribution& d, double delta) {
  SizeDistribution out = d;
  auto it = std::max_element(d.density.begin(), d.density.end());
  std::size_t i = static_cast<std::size_t>(it - d.density.begin());
  if (i + 1 < d.size()) ++i;
  out.density[i] += delta / d.grid->widths[i];
  return out;
}

Trajectory conservative_rerun(const Setup& s) {
  SolverConfig cfg = s.solver;
  cfg.boundary = Boundary::Conservative;
  return integrate(s.init, cfg);
}

MarginSeries monotone_series(const std::string& name, const std::vector<double>& t, const std::vector<double>& v,
                             const std::vector<double>& gel, bool increasing, bool absorbing, double slack) {
  MarginSeries m;
  m.name = name;
  m.slack = slack;
  for (std::size_t i = 1; i < v.size(); ++i) {
    // Absorbing runs are only monotone while no mass has left the grid.
    if (absorbing && gel[i] > 0.0) {
      m.note = "absorbing run: checked up to the first mass loss";
      break;
    }
    if (increasing) m.add(t[i], v[i - 1], v[i]);
    else m.add(t[i], v[i], v[i - 1]);
  }
  return m;
}

struct CheckOutcome {
  json report;
  std::vector<MarginSeries> series;
  int code = kExitOk;
};

CheckOutcome run_check(const io::CheckSpec& spec, const RunConfig& c, const Setup& s, const Trajectory& traj) {
  CheckOutcome out;
  const json& p = spec.params;
  const Kernel k = diag_kernel(c);
  const std::string& n = spec.name;
  json& r = out.report;
  auto verdict = [&](bool ok) {
    r["status"] = ok ? "pass" : "fail";
    if (!ok) out.code = kExitTolerance;
  };

  if (n == "weak_form") {
    TestFunction th = TestFunction::identity();
    std::string kind = p.value("theta", std::string("identity"));
    if (kind == "one") th = TestFunction::one();
    else if (kind == "min_with_a") th = TestFunction::min_with(p.value("A", 1.0));
    auto w = weak_form_residual(traj, traj.kernel, th);
    r["result"] = io::to_json(w);
    // The residual is the trapezoid error between snapshots, measured against the moment scale.
    double scale = 0.0;
    for (const auto& snap : traj.snapshots) scale = std::max(scale, std::abs(moment(snap, 0.0)) + std::abs(moment(snap, 1.0)));
    double tol = p.value("tolerance", 1e-3) * std::max(scale, 1.0);
    r["tolerance"] = tol;
    verdict(w.max_abs <= tol);
  } else if (n == "flux") {
    double A = p.value("A", 1.0);
    json rows = json::array();
    double worst = 0.0;
    for (const auto& snap : traj.snapshots) {
      FluxSplit f = flux_decomposition(snap, k, A);
      double sum = f.I1 + f.I2 + f.I3;
      double scale = std::max({std::abs(f.I1), std::abs(f.I2), std::abs(f.I3), std::abs(f.theta_rate), 1e-300});
      double rel = std::abs(sum + f.theta_rate) / scale;
      worst = std::max(worst, rel);
      json row = io::to_json(f);
      row["t"] = snap.time;
      row["identity_residual"] = rel;
      rows.push_back(row);
    }
    r["A"] = A;
    r["rows"] = rows;
    r["max_identity_residual"] = worst;
    verdict(worst <= 1e-10);
  } else if (n == "phi_gronwall" || n == "psi_moment" || n == "product_l2" || n == "equicontinuity") {
    BoundParams bp;
    BoundKind kind = BoundKind::PhiGronwall;
    if (n == "phi_gronwall") {
      bp.R = p.value("R", 10.0);
    } else if (n == "psi_moment") {
      kind = BoundKind::PsiMoment;
    } else if (n == "product_l2") {
      kind = BoundKind::ProductL2;
      bp.A = p.value("A", 4.0);
      if (p.contains("cap")) bp.radial_cap = p.at("cap").get<double>();
    } else {
      kind = BoundKind::EquiContinuity;
      bp.R = p.value("R", 10.0);
    }
    auto b = bound_monitor(traj, k, kind, bp);
    r["result"] = io::to_json(b);
    out.series = b.series;
    verdict(b.pass());
  } else if (n == "comparison_ode") {
    auto rad = pick_radial(p, k);
    if (!rad) fail(Status::Unsupported, "comparison_ode needs a product kernel or an explicit radial rate");
    auto cr = comparison_ode(traj, *rad);
    r["result"] = io::to_json(cr);
    out.series.push_back(cr.margin);
    verdict(cr.margin.pass());
  } else if (n == "gelation_functional") {
    auto rad = pick_radial(p, k);
    if (!rad) fail(Status::Unsupported, "gelation_functional needs a product kernel or an explicit radial rate");
    XiChoice xi = p.contains("xi") ? xi_from_json(p.at("xi")) : default_xi(k);
    auto g = gelation_functional(traj, *rad, xi);
    r["result"] = io::to_json(g);
    out.series.push_back(g.margin);
    verdict(g.margin.pass());
  } else if (n == "gelation_detect") {
    DetectPolicy pol = policy_from_json(p, c.gelation.policy);
    std::optional<Trajectory> base;
    if (pol.kind == DetectPolicy::Kind::MassDrop) base = conservative_rerun(s);
    Kernel uk = c.kernel;
    auto g = gelation_detect(traj, uk, pol, base ? &*base : nullptr);
    r["result"] = io::to_json(g);
    bool ok = true;
    if (g.t_gel_detected && g.t_gel_upper_bound) ok = *g.t_gel_detected <= *g.t_gel_upper_bound;
    verdict(ok);
  } else if (n == "uniqueness") {
    double delta = p.value("perturbation", 1e-3);
    DistanceKind dk = p.value("kind", std::string("weighted_l1")) == "cdf_weighted"
                          ? DistanceKind::cdf_weighted(p.value("lambda", 1.0))
                          : DistanceKind::weighted_l1(p.value("scale", 1.0), p.value("power", 1.0));
    Trajectory other = integrate(perturb(s.init, delta), s.solver);
    auto u = uniqueness_distance(traj, other, k, dk);
    r["perturbation"] = delta;
    r["result"] = io::to_json(u);
    out.series.push_back(u.margin);
    verdict(u.margin.pass());
  } else if (n == "moment_monotonicity") {
    double slack = p.value("slack", 1e-9);
    bool absorbing = traj.boundary == Boundary::Absorbing;
    const auto& m = traj.moments;
    auto a = monotone_series("M05_non_increasing", m.times, m.m05, m.gel_mass, false, absorbing, slack);
    auto b = monotone_series("M2_non_decreasing", m.times, m.m2, m.gel_mass, true, absorbing, slack);
    r["result"] = json::array({io::to_json(a), io::to_json(b)});
    out.series = {a, b};
    verdict(a.pass() && b.pass());
  } else {
    fail(Status::Config, "unknown check " + n);
  }
  return out;
}

// simulate

int cmd_simulate(const RunConfig& c, const fs::path& dir, const Log& log) {
  Setup s = make_setup(c);
  std::vector<std::string> warnings;
  if (auto w = snapshot_warning(s.solver)) warnings.push_back(*w);
  for (const auto& w : warnings) log("warning: " + w);

  Trajectory traj = integrate(s.init, s.solver);
  int code = kExitOk;
  if (traj.flagged()) {
    log("trajectory flagged (" + flag_name(traj.flag) + "): " + traj.flag_message);
    code = kExitFlagged;
  }

  write_run_csv(dir, c, traj);

  json diags = json::array();
  std::ostringstream checks_csv;
  io::write_margin_csv_header(checks_csv);
  for (const auto& spec : c.checks) {
    json entry;
    entry["name"] = spec.name;
    entry["line"] = spec.line;
    entry["params"] = spec.params;
    int cc = kExitOk;
    try {
      CheckOutcome o = run_check(spec, c, s, traj);
      for (auto it = o.report.begin(); it != o.report.end(); ++it) entry[it.key()] = it.value();
      for (const auto& m : o.series) io::write_margin_csv(checks_csv, m);
      cc = o.code;
    } catch (const Error& e) {
      entry["status"] = e.status() == Status::Unsupported || e.status() == Status::Domain ? "unsupported" : "error";
      entry["message"] = e.what();
      cc = exit_for(e.status());
    }
    if (cc != kExitOk) log("check " + spec.name + " (line " + std::to_string(spec.line) + "): " + entry.value("status", std::string("fail")));
    code = worse(code, cc);
    diags.push_back(entry);
  }

  if (c.json) {
    write_json(dir / "run.json", run_info(c, traj, warnings));
    if (!c.checks.empty()) write_json(dir / "diagnostics.json", json{{"config_hash", c.hash}, {"checks", diags}});
  }
  if (c.csv && !c.checks.empty()) write_file(dir / "checks.csv", checks_csv.str());
  return code;
}

// validate

double rel_err(double got, double want) {
  double d = std::abs(got - want);
  return want != 0.0 ? d / std::abs(want) : d;
}

bool unit_monodisperse(const RunConfig& c) {
  return c.init.family == InitSpec::Family::Monodisperse && c.init.size == 1.0 && c.init.total == 1.0 &&
         c.grid.kind == io::GridSpec::Kind::Discrete;
}

int cmd_validate(const RunConfig& c, const fs::path& dir, const Log& log) {
  require_run_sections(c);
  if (c.cap) fail(Status::Unsupported, "validation compares the uncapped kernel; remove kernel.cap");
  if (!has_oracle(c.kernel)) fail(Status::Unsupported, "no reference solution for kernel " + c.kernel.name());
  Setup s = make_setup(c);
  const bool exact = unit_monodisperse(c);
  OracleMoments m0{moment(s.init, 0.0), moment(s.init, 1.0), moment(s.init, 2.0)};
  if (c.kernel.family == Kernel::Family::Multiplicative && !(c.solver.t_end < 1.0 / m0.m2))
    fail(Status::Unsupported, "reference moments for the multiplicative kernel end at the gel point t = 1/M2(0)");

  Trajectory traj = integrate(s.init, s.solver);
  int code = traj.flagged() ? kExitFlagged : kExitOk;

  auto tol_for = [&](const std::string& q) {
    auto it = c.validate.tolerances.find(q);
    return it == c.validate.tolerances.end() ? c.validate.tolerance : it->second;
  };
  std::map<std::string, double> worst{{"M0", 0.0}, {"M1", 0.0}, {"M2", 0.0}};
  json rows = json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& snap = traj.snapshots[i];
    OracleMoments ref = exact ? exact_solution(c.kernel, snap.time).moments : moment_oracle(c.kernel, m0, snap.time);
    double e0 = rel_err(moment(snap, 0.0), ref.m0);
    // Gel mass counts toward M1 only in absorbing runs; the oracles describe the sol.
    double e1 = rel_err(moment(snap, 1.0), ref.m1);
    double e2 = rel_err(moment(snap, 2.0), ref.m2);
    worst["M0"] = std::max(worst["M0"], e0);
    worst["M1"] = std::max(worst["M1"], e1);
    worst["M2"] = std::max(worst["M2"], e2);
    rows.push_back({{"t", snap.time}, {"M0", e0}, {"M1", e1}, {"M2", e2}});
  }

  json rep;
  rep["config_hash"] = c.hash;
  rep["kernel"] = io::kernel_json(c.kernel);
  rep["oracle"] = exact ? "closed_form" : "moment_ode";
  rep["flag"] = flag_name(traj.flag);
  rep["per_snapshot"] = rows;
  json q = json::object();
  bool ok = true;
  for (const auto& [name, err] : worst) {
    double tol = tol_for(name);
    bool pass = err <= tol;
    ok = ok && pass;
    q[name] = {{"max_rel_error", err}, {"tolerance", tol}, {"pass", pass}};
  }
  if (exact && c.validate.sizes > 0) {
    const auto& last = traj.snapshots.back();
    OracleResult ref = exact_solution(c.kernel, last.time, c.validate.sizes);
    if (ref.kind == OracleResult::Kind::FullDistribution) {
      double err = 0.0;
      json per = json::array();
      std::size_t cnt = std::min(ref.values.size(), last.size());
      for (std::size_t i = 0; i < cnt; ++i) {
        double e = rel_err(last.density[i], ref.values[i]);
        err = std::max(err, e);
        per.push_back({{"size", i + 1}, {"computed", last.density[i]}, {"exact", ref.values[i]}, {"rel_error", e}});
      }
      double tol = tol_for("f");
      bool pass = err <= tol;
      ok = ok && pass;
      q["f"] = {{"t", last.time}, {"max_rel_error", err}, {"tolerance", tol}, {"pass", pass}, {"sizes", per}};
    }
  }
  rep["quantities"] = q;
  rep["pass"] = ok;
  if (c.json) write_json(dir / "validate.json", rep);
  write_run_csv(dir, c, traj);

  std::ostringstream os;
  for (const auto& [name, v] : q.items())
    os << name << " max_rel_error=" << io::fmt(v["max_rel_error"].get<double>()) << " tol=" << io::fmt(v["tolerance"].get<double>())
       << (v["pass"].get<bool>() ? " ok" : " FAIL") << "\n";
  log(os.str());
  if (!ok) code = worse(code, kExitTolerance);
  return code;
}

// compactness

std::vector<double> default_thresholds(const FunctionFamily& fam) {
  double mx = 0.0;
  for (const auto& m : fam.members)
    for (double v : m) mx = std::max(mx, std::abs(v));
  std::vector<double> th;
  if (!(mx > 0.0)) return {1.0};
  for (int k = 29; k >= 0; --k) th.push_back(2.0 * mx * std::ldexp(1.0, -k));
  return th;
}

int cmd_compactness(const RunConfig& c, const fs::path& dir, const Log& log) {
  if (!c.compactness) fail(Status::Config, c.path + ":1: the compactness command needs a 'compactness' section");
  const io::CompactnessSpec& cs = *c.compactness;
  json rep;
  rep["config_hash"] = c.hash;
  int code = kExitOk;

  std::optional<FunctionFamily> fam;
  if (cs.source == io::CompactnessSpec::Source::Synthetic) {
    fam = synthetic_family(cs.synthetic, cs.cells, cs.members);
    rep["family"] = {{"source", "synthetic"}, {"name", cs.synthetic}};
  } else if (c.has_kernel || c.has_grid || c.has_init || c.has_solver || cs.tail == io::CompactnessSpec::Tail::Family) {
    Setup s = make_setup(c);
    Trajectory traj = integrate(s.init, s.solver);
    if (traj.flagged()) code = kExitFlagged;
    fam = FunctionFamily::from_snapshots(traj.snapshots);
    rep["family"] = {{"source", "snapshots"}, {"kernel", io::kernel_json(c.kernel)}, {"flag", flag_name(traj.flag)}};
  }
  rep["family"]["members"] = fam ? fam->members.size() : 0;

  if (fam) {
    fam->validate();
    auto th = cs.thresholds.empty() ? default_thresholds(*fam) : cs.thresholds;
    EtaLimit el = eta_limit(*fam, th);
    double ex = eta_modulus_extrapolated(*fam);
    double emin = *std::min_element(fam->measures.begin(), fam->measures.end());
    json mod = json::array();
    for (int k = 0; k < 12; ++k) {
      double e = emin * std::ldexp(1.0, k);
      mod.push_back({{"eps", e}, {"eta", eta_modulus(*fam, e)}});
    }
    double fmax = 0.0;
    for (const auto& m : fam->members)
      for (double v : m) fmax = std::max(fmax, std::abs(v));
    // A finite family always has both limits equal to zero; concentration shows at the cell scale.
    json res = {{"eps", emin}, {"eta", eta_modulus(*fam, emin)}, {"max_value", fmax},
                {"tail_at_max_value", fmax > 0.0 ? family_tail(*fam, fmax) : 0.0}};
    rep["eta"] = {{"limit", io::to_json(el)}, {"modulus_extrapolated", ex}, {"modulus", mod},
                  {"resolution", res}, {"sup_l1", fam->sup_l1()}, {"agreement", std::abs(el.estimate - ex)}};
  }

  TailFn tail;
  switch (cs.tail) {
    case io::CompactnessSpec::Tail::Family:
      tail = tail_from_family(*fam);
      rep["tail"] = "family";
      break;
    case io::CompactnessSpec::Tail::Table: {
      tail = tail_from_table(cs.table);
      json t = json::array();
      for (const auto& [x, v] : cs.table) t.push_back({x, v});
      rep["tail"] = {{"table", t}};
      break;
    }
    case io::CompactnessSpec::Tail::Power: {
      double a = cs.power_coeff, e = cs.power_exponent;
      tail = [a, e](double x) { return a * std::pow(x, e); };
      rep["tail"] = {{"power", {{"coeff", a}, {"exponent", e}}}};
      break;
    }
  }

  DlvpOptions opt;
  opt.max_threshold = cs.max_threshold;
  try {
    VPFunction phi = dlvp_construct(tail, cs.alphas, cs.betas, opt);
    rep["vp_function"] = io::to_json(phi);
    double rmax = static_cast<double>(phi.N.back()) * 1.5;
    auto samples = random_triples(static_cast<std::size_t>(cs.samples), rmax, 4.0, cs.seed);
    VPReport chk = vp_check(phi, samples, fam ? &*fam : nullptr);
    VPReport con = vp_constraints(phi);
    rep["vp_check"] = io::to_json(chk);
    rep["vp_constraints"] = io::to_json(con);
    rep["samples"] = {{"count", cs.samples}, {"seed", cs.seed}, {"r_max", rmax}, {"lambda_max", 4.0}};
    if (!chk.pass() || !con.pass()) {
      log("vp checks reported violations");
      code = worse(code, kExitTolerance);
    }
  } catch (const ConstructiveError& e) {
    rep["vp_function"] = nullptr;
    rep["constructive_failure"] = {{"index", e.index()}, {"message", e.what()}};
    log(std::string("construction failed: ") + e.what());
    code = worse(code, kExitConstructive);
  }
  if (c.json) write_json(dir / "compactness.json", rep);
  return code;
}

// gelation

int cmd_gelation(const RunConfig& c, const fs::path& dir, const Log& log) {
  Setup s = make_setup(c);
  std::vector<std::string> warnings;
  if (auto w = snapshot_warning(s.solver)) warnings.push_back(*w);
  for (const auto& w : warnings) log("warning: " + w);
  Trajectory traj = integrate(s.init, s.solver);
  int code = kExitOk;
  // Stiffness at the gel point is the expected outcome here; other flags are not.
  if (traj.flagged() && traj.flag != TrajectoryFlag::GelationStiffness) code = kExitFlagged;

  std::optional<Trajectory> base;
  if (c.gelation.baseline || c.gelation.policy.kind == DetectPolicy::Kind::MassDrop) base = conservative_rerun(s);

  json rep;
  rep["config_hash"] = c.hash;
  rep["flag"] = flag_name(traj.flag);
  if (traj.flagged()) rep["flag_message"] = traj.flag_message;
  rep["warnings"] = warnings;
  GelationReport det = gelation_detect(traj, c.kernel, c.gelation.policy, base ? &*base : nullptr);
  rep["detect"] = io::to_json(det);
  if (det.t_gel_detected && det.t_gel_upper_bound && *det.t_gel_detected > *det.t_gel_upper_bound) {
    log("detected gel time exceeds the upper bound");
    code = worse(code, kExitTolerance);
  }

  const Kernel k = diag_kernel(c);
  std::optional<RadialRate> rad = c.gelation.radial ? c.gelation.radial : k.radial();
  if (rad) {
    XiChoice xi = c.raw.contains("gelation") && c.raw["gelation"].contains("xi") ? c.gelation.xi : default_xi(k);
    try {
      GelationReport fn = gelation_functional(traj, *rad, xi);
      rep["functional"] = io::to_json(fn);
      if (!fn.margin.pass()) code = worse(code, kExitTolerance);
    } catch (const Error& e) {
      rep["functional"] = {{"status", "unsupported"}, {"message", e.what()}};
    }
  } else {
    rep["functional"] = {{"status", "unsupported"}, {"message", "kernel is not of product form r(x) r(y)"}};
  }
  if (c.json) {
    write_json(dir / "gelation.json", rep);
    write_json(dir / "run.json", run_info(c, traj, warnings));
  }
  write_run_csv(dir, c, traj);
  return code;
}

int dispatch(const std::string& cmd, const RunConfig& c, const fs::path& dir, const Log& log) {
  fs::create_directories(dir);
  if (cmd == "simulate") return cmd_simulate(c, dir, log);
  if (cmd == "validate") return cmd_validate(c, dir, log);
  if (cmd == "compactness") return cmd_compactness(c, dir, log);
  if (cmd == "gelation") return cmd_gelation(c, dir, log);
  fail(Status::Config, "unknown command '" + cmd + "'");
}

int guarded(const std::string& cmd, const RunConfig& c, const fs::path& dir, const Log& log) {
  try {
    return dispatch(cmd, c, dir, log);
  } catch (const Error& e) {
    log(std::string("error: ") + e.what());
    return exit_for(e.status());
  } catch (const fs::filesystem_error& e) {
    log(std::string("error: ") + e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitTolerance;
  }
}

int run_sweep(const CommandOptions& opt, const RunConfig& base, const fs::path& dir, const Log& log) {
  const std::size_t n = base.sweep.size();
  std::vector<int> codes(n, kExitOk);
  std::vector<std::string> dirs(n);
  std::vector<std::string> logs(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      std::ostringstream name;
      name << "sweep_" << std::setw(3) << std::setfill('0') << i;
      fs::path sub = dir / name.str();
      dirs[i] = sub.string();
      std::string buf;
      Log local = [&buf](const std::string& m) { buf += m + "\n"; };
      try {
        RunConfig c = io::apply_patch(base, base.sweep[i]);
        codes[i] = guarded(opt.command, c, sub, local);
      } catch (const Error& e) {
        local(std::string("error: ") + e.what());
        codes[i] = exit_for(e.status());
      }
      logs[i] = std::move(buf);
    }
  };
  int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitOk;
  json entries = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (!logs[i].empty()) log("[sweep " + std::to_string(i) + "] " + logs[i]);
    code = worse(code, codes[i]);
    entries.push_back({{"index", i}, {"directory", fs::path(dirs[i]).filename().string()}, {"exit_code", codes[i]},
                       {"override", base.sweep[i]}});
  }
  fs::create_directories(dir);
  write_json(dir / "sweep.json", json{{"config_hash", base.hash}, {"command", opt.command}, {"entries", entries}});
  return code;
}

}  // namespace

std::string resolve_output_dir(const std::string& cli_out, const std::string& config_dir, const std::string& config_path) {
  if (!cli_out.empty()) return cli_out;
  fs::path name = config_dir.empty() ? fs::path(config_path).stem() : fs::path(config_dir);
  if (name.is_absolute()) return name.string();
  const char* root = std::getenv("COAG_OUTPUT_ROOT");
  fs::path base = root && *root ? fs::path(root) : fs::current_path();
  return (base / name).string();
}

int run_command(const CommandOptions& opt) {
  Log log = opt.log ? opt.log : Log([](const std::string& m) { std::cerr << m << (m.empty() || m.back() != '\n' ? "\n" : ""); });
  if (opt.command != "simulate" && opt.command != "validate" && opt.command != "compactness" &&
      opt.command != "gelation") {
    log("error: unknown command '" + opt.command + "'");
    return kExitConfig;
  }
  RunConfig cfg;
  try {
    cfg = io::load_config(opt.config_path);
  } catch (const Error& e) {
    log(std::string("error: ") + e.what());
    return kExitConfig;
  }
  fs::path dir;
  try {
    dir = resolve_output_dir(opt.out_dir, cfg.out_dir, opt.config_path);
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitConfig;
  }
  if (!cfg.sweep.empty()) return run_sweep(opt, cfg, dir, log);
  return guarded(opt.command, cfg, dir, log);
}

}  // namespace coag::app
