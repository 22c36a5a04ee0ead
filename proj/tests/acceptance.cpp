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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any fails.
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "compactness.hpp"
#include "diagnostics.hpp"
#include "fast_gain.hpp"
#include "gen.hpp"
#include "oracle.hpp"
#include "solver.hpp"

using namespace coag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::vector<const Trajectory*> suite;  // runs checked for moment monotonicity

void report(int id, const std::string& what, const std::function<Outcome()>& body, double limit_s = 0.0) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " [runtime limit " + std::to_string(static_cast<int>(limit_s)) + " s exceeded]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %s: %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", what.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SolverConfig config(Kernel k, double t_end, double every, double rtol = 1e-8, double atol = 1e-10) {
  SolverConfig c;
  c.kernel = std::move(k);
  c.t_end = t_end;
  for (int i = 1; i * every < t_end - 1e-12; ++i) c.snapshot_times.push_back(i * every);
  c.scheme.rel_tol = rtol;
  c.scheme.abs_tol = atol;
  return c;
}

SizeDistribution mono(int n) { return init_distribution(gen::discrete(n), InitSpec{}); }

double m1_drift(const Trajectory& t) {
  double worst = 0.0;
  for (double m : t.moments.m1) worst = std::max(worst, std::abs(m - t.moments.m1.front()) / t.moments.m1.front());
  return worst;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  Trajectory c1, c2, c3, c4a, c4b, c8, c9a, c9b, c9c, c9d, c10a, c10b;

  report(1, "constant kernel against the closed form on N = 256", [&] {
    c1 = integrate(mono(256), config(Kernel::constant(2.0), 1.0, 0.1, 1e-10, 1e-14));
    suite.push_back(&c1);
    const auto& f = c1.snapshots.back();
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double t = 1.0;
      double exact = std::pow(t, i - 1) / std::pow(1.0 + t, i + 1);
      worst = std::max(worst, std::abs(f.density[static_cast<std::size_t>(i - 1)] - exact) / exact);
    }
    return Outcome{worst <= 1e-6, fmt("max relative error %.3e over i <= 10", worst)};
  }, 10.0);

  report(2, "additive kernel with the fast gain on N = 4096", [&] {
    c2 = integrate(mono(4096), config(Kernel::additive(), 1.0, 0.1, 1e-10, 1e-14));
    suite.push_back(&c2);
    double e = std::abs(c2.moments.m0.back() - std::exp(-1.0)) / std::exp(-1.0);
    double drift = m1_drift(c2);
    bool ok = e <= 1e-4 && drift <= 1e-8 && c2.log.fast_path;
    return Outcome{ok, fmt("M0 error %.3e, M1 drift %.3e, fast path %g", e, drift, c2.log.fast_path ? 1.0 : 0.0)};
  }, 60.0);

  report(3, "multiplicative kernel on N = 2^14 with gel-time detection", [&] {
    c3 = integrate(mono(1 << 14), config(Kernel::multiplicative(), 2.0, 0.05));
    suite.push_back(&c3);
    double m2 = std::nan("");
    for (std::size_t i = 0; i < c3.moments.size(); ++i)
      if (std::abs(c3.moments.times[i] - 0.5) < 1e-12) m2 = c3.moments.m2[i];
    double e = std::abs(m2 - 2.0) / 2.0;
    auto det = gelation_detect(c3, Kernel::multiplicative(), {});
    double tg = det.t_gel_detected ? *det.t_gel_detected : std::nan("");
    bool ok = e <= 1e-3 && tg >= 0.95 && tg <= 1.05;
    return Outcome{ok, fmt("M2(0.5) error %.3e, detected T_gel %.6f", e, tg)};
  }, 120.0);

  report(4, "mass conservation for constant and additive kernels up to t = 5", [&] {
    c4a = integrate(mono(1024), config(Kernel::constant(2.0), 5.0, 0.25, 1e-10, 1e-14));
    c4b = integrate(mono(4096), config(Kernel::additive(), 5.0, 0.25, 1e-10, 1e-14));
    suite.push_back(&c4a);
    suite.push_back(&c4b);
    double a = m1_drift(c4a), b = m1_drift(c4b);
    bool ok = a <= 1e-8 && b <= 1e-8 && !c4a.flagged() && !c4b.flagged();
    return Outcome{ok, fmt("M1 drift constant %.3e, additive %.3e", a, b)};
  });

  report(6, "construction on the 2/c tail", [&] {
    std::vector<double> al(6, 1.0), be;
    for (int m = 0; m < 6; ++m) be.push_back(std::pow(4.0, -m));
    auto phi = dlvp_construct([](double c) { return 2.0 / c; }, al, be);
    bool ok = phi.exact;
    for (std::size_t m = 1; m < phi.N.size(); ++m) ok = ok && phi.N[m] == 2 * (std::int64_t{1} << (2 * m));
    for (std::size_t m = 0; m < phi.dphi_q.size(); ++m)
      ok = ok && phi.dphi_q[m] == Rational(static_cast<Rational::int_t>(7 * m + 1), 7);
    auto chk = vp_check(phi, random_triples(1000, 1.5 * static_cast<double>(phi.N.back()), 4.0, 42));
    std::size_t viol = 0;
    for (const auto& c : chk.checks) viol += c.violations;
    ok = ok && chk.checks.size() == 7 && viol == 0;
    return Outcome{ok, fmt("breakpoints and exact derivatives match, %g inequality families, %g violations",
                           static_cast<double>(chk.checks.size()), static_cast<double>(viol))};
  });

  report(7, "eta limit equals the extrapolated modulus on three synthetic families", [&] {
    double worst = 0.0;
    for (const char* name : {"bounded", "concentrating", "inverse_sqrt"}) {
      auto f = synthetic_family(name, 1024, 64);
      double mx = 0.0;
      for (const auto& m : f.members)
        for (double v : m) mx = std::max(mx, std::abs(v));
      std::vector<double> th;
      for (int k = 29; k >= 0; --k) th.push_back(2.0 * mx * std::ldexp(1.0, -k));
      worst = std::max(worst, std::abs(eta_limit(f, th).estimate - eta_modulus_extrapolated(f)));
    }
    return Outcome{worst <= 1e-12, fmt("max difference %.3e", worst)};
  });

  report(8, "gelation functional for (xy)^{3/4} up to t = 2", [&] {
    RadialRate r = RadialRate::power_law(0.75);
    auto c = config(Kernel::product(r), 2.0, 0.05);
    c.boundary = Boundary::Absorbing;
    c8 = integrate(mono(4096), c);
    suite.push_back(&c8);
    auto g = gelation_functional(c8, r, XiChoice::power_shifted(0.25));
    double beta = 0.25 * boost::math::beta(0.25, 0.25);
    double q = std::abs(g.I_xi - beta);
    bool ok = q <= 1e-6 && g.margin.pass() && g.margin.min_margin > 0.0;
    return Outcome{ok, fmt("I_xi %.10f (Beta identity gap %.2e), min margin %.4f", g.I_xi, q, g.margin.min_margin)};
  });

  report(9, "bound monitors on their designated runs", [&] {
    c9a = integrate(mono(256), config(Kernel::constant(2.0), 1.0, 0.05, 1e-10, 1e-13));
    c9b = integrate(mono(1024), config(Kernel::additive(), 1.0, 0.05, 1e-10, 1e-13));
    c9c = integrate(mono(1024), config(Kernel::multiplicative(), 0.5, 0.05, 1e-10, 1e-13));
    c9d = integrate(mono(512), config(Kernel::product(RadialRate::power_law(0.5)), 3.0, 0.1, 1e-10, 1e-13));
    for (auto* t : {&c9a, &c9b, &c9c, &c9d}) suite.push_back(t);
    auto phi = bound_monitor(c9a, Kernel::constant(2.0), BoundKind::PhiGronwall);
    auto psi = bound_monitor(c9b, Kernel::additive(), BoundKind::PsiMoment);
    auto l2 = bound_monitor(c9c, Kernel::multiplicative(), BoundKind::ProductL2);
    auto cmp = comparison_ode(c9d, RadialRate::power_law(0.5));
    std::size_t viol = cmp.margin.violations;
    for (const auto* b : {&phi, &psi, &l2})
      for (const auto& s : b->series) viol += s.violations;
    double mins[4] = {phi.min_margin(), psi.min_margin(), l2.min_margin(), cmp.margin.min_margin};
    bool ok = viol == 0 && *std::min_element(mins, mins + 4) > 0.0;
    char buf[256];
    std::snprintf(buf, sizeof buf, "margins phi %.3g, psi %.3g, product_l2 %.3g, comparison %.3g; %zu violations",
                  mins[0], mins[1], mins[2], mins[3], viol);
    return Outcome{ok, buf};
  });

  report(10, "uniqueness envelopes for perturbed constant-kernel runs", [&] {
    auto init = mono(256);
    auto c = config(Kernel::constant(2.0), 1.0, 0.05, 1e-10, 1e-14);
    c10a = integrate(init, c);
    auto p = init;
    p.density[1] += 1e-3;  // unit-width cell: 1e-3 in L1
    c10b = integrate(p, c);
    suite.push_back(&c10a);
    suite.push_back(&c10b);
    auto w = uniqueness_distance(c10a, c10b, Kernel::constant(2.0), DistanceKind::weighted_l1(1.5, 0.0));
    auto d = uniqueness_distance(c10a, c10b, Kernel::constant(2.0), DistanceKind::cdf_weighted(1.0));
    // t = 0 is an equality; every later snapshot carries a margin.
    bool ok = w.margin.pass() && d.margin.pass() && w.margin.evaluated + 1 == w.times.size() &&
              d.margin.evaluated + 1 == d.times.size();
    return Outcome{ok, fmt("weighted-L1 min margin %.3g, CDF-weighted min margin %.3g", w.margin.min_margin,
                           d.margin.min_margin)};
  });

  report(11, "fast gain against the direct sum on random states", [&] {
    gen::Rng r(2024);
    std::vector<Kernel> ks{Kernel::constant(2.0), Kernel::additive(), Kernel::multiplicative(),
                           Kernel::product(RadialRate::power_law(0.75))};
    double worst = 0.0;
    int count = 0;
    for (int n : {32, 256, 2048}) {
      auto g = gen::discrete(n);
      int states = n == 2048 ? 34 : 33;
      for (int s = 0; s < states; ++s, ++count) {
        auto d = gen::distribution(r, g);
        const Kernel& k = ks[static_cast<std::size_t>(count) % ks.size()];
        auto fast = fast_gain(d, k);
        auto ref = oracle::direct_gain([&](double x, double y) { return k.eval(x, y); }, d.density);
        double peak = *std::max_element(ref.begin(), ref.end()), diff = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) diff = std::max(diff, std::abs(fast[i] - ref[i]));
        worst = std::max(worst, diff / peak);
      }
    }
    return Outcome{worst <= 1e-12 && count == 100,
                   fmt("%g states, max relative difference %.3e (max-norm)", count, worst)};
  });

  report(12, "repeated simulate runs give byte-identical CSV", [&] {
    auto dir = fs::temp_directory_path() / ("coag_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::ofstream(dir / "run.json") << R"({
      "kernel": {"family": "power_sum", "params": {"alpha": 0.3, "beta": 0.6}},
      "grid": {"kind": "sectional", "N": 96, "span": [1e-2, 1e5]},
      "init": {"family": "exponential"},
      "solver": {"t_end": 2.0, "snapshots": {"every": 0.25}},
      "diagnostics": {"checks": [{"name": "moment_monotonicity"}]}})";
    bool ok = true;
    std::string detail;
    for (const char* out : {"a", "b"}) {
      app::CommandOptions o;
      o.command = "simulate";
      o.config_path = (dir / "run.json").string();
      o.out_dir = (dir / out).string();
      o.log = [](const std::string&) {};
      int rc = app::run_command(o);
      if (rc != 0) {
        ok = false;
        detail += "exit code " + std::to_string(rc) + "; ";
      }
    }
    int files = 0;
    for (const char* f : {"moments.csv", "snapshots.csv", "checks.csv"}) {
      auto a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
      if (a.empty() || a != b) {
        ok = false;
        detail += std::string(f) + " differs; ";
      } else {
        ++files;
      }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return Outcome{ok, detail + std::to_string(files) + " CSV files identical"};
  });

  report(5, "moment monotonicity along every run above", [&] {
    std::size_t pairs = 0, viol = 0;
    for (const Trajectory* t : suite) {
      const auto& m = t->moments;
      for (std::size_t i = 1; i < m.size(); ++i) {
        if (m.gel_mass[i] > 0.0) break;  // absorbing runs: only until mass leaves the grid
        ++pairs;
        if (m.m05[i] > m.m05[i - 1] * (1.0 + 1e-9)) ++viol;
        if (m.m2[i] < m.m2[i - 1] * (1.0 - 1e-9)) ++viol;
      }
    }
    return Outcome{viol == 0 && pairs > 0,
                   fmt("%g runs, %g snapshot pairs, %g violations", static_cast<double>(suite.size()),
                       static_cast<double>(pairs), static_cast<double>(viol))};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
