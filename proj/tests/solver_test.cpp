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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "fast_gain.hpp"
#include "gen.hpp"
#include "oracle.hpp"
#include "solver.hpp"

using namespace coag;

namespace {

SizeDistribution mono(GridPtr g) { return init_distribution(std::move(g), InitSpec{}); }

SolverConfig config(Kernel k, double t_end, std::vector<double> snaps = {}) {
  SolverConfig c;
  c.kernel = std::move(k);
  c.t_end = t_end;
  c.snapshot_times = std::move(snaps);
  return c;
}

std::vector<double> every(double dt, double t_end) {
  std::vector<double> s;
  for (int i = 1; i * dt < t_end - 1e-12; ++i) s.push_back(i * dt);
  return s;
}

}  // namespace

TEST_CASE("zero distribution has no gain and no loss") {
  SizeDistribution d;
  d.grid = gen::discrete(16);
  d.density.assign(16, 0.0);
  for (const auto& k : gen::closed_form_kernels()) {
    auto r = rates(d, k);
    for (std::size_t i = 0; i < 16; ++i) {
      REQUIRE(r.gain[i] == 0.0);
      REQUIRE(r.loss[i] == 0.0);
    }
  }
}

TEST_CASE("single-pair gain on monomers") {
  auto d = mono(gen::discrete(8));
  CHECK(fast_gain(d, Kernel::multiplicative())[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fast_gain(d, Kernel::additive())[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rates(d, Kernel::multiplicative()).gain[1] == 0.5);
  CHECK(rates(d, Kernel::additive()).gain[1] == 1.0);
}

TEST_CASE("fast gain refuses what it cannot factor") {
  auto d = mono(gen::discrete(8));
  CHECK_THROWS_AS(fast_gain(d, Kernel::tabulated({1.0, 8.0}, {1.0, 2.0, 2.0, 3.0})), Error);
  CHECK_THROWS_AS(fast_gain(d, truncate(Kernel::multiplicative(), 4.0, TruncationMode::Cap)), Error);
  SizeDistribution s;
  s.grid = gen::geometric(1.0, 100.0, 8);
  s.density.assign(8, 1.0);
  CHECK_THROWS_AS(fast_gain(s, Kernel::constant(2.0)), Error);
}

TEST_CASE("property: fast gain matches the independent direct sum") {
  gen::Rng r(21);
  std::vector<Kernel> ks{Kernel::constant(2.0), Kernel::additive(), Kernel::multiplicative(),
                         Kernel::power_sum(0.5, 0.25), Kernel::product(RadialRate::power_law(0.75)),
                         Kernel::brownian()};
  for (int trial = 0; trial < 48; ++trial) {
    int n = r.integer(2, 96);
    auto g = gen::discrete(n);
    auto d = gen::distribution(r, g);
    const Kernel& k = ks[static_cast<std::size_t>(trial) % ks.size()];
    auto fast = fast_gain(d, k);
    auto ref = oracle::direct_gain([&](double x, double y) { return k.eval(x, y); }, d.density);
    double peak = *std::max_element(ref.begin(), ref.end());
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(fast[i] - ref[i]) <= 1e-12 * std::max(std::abs(ref[i]), peak));
  }
}

TEST_CASE("constant kernel against the frozen brute-force values") {
  // Frozen from the 64-species RK4 oracle at h = 1e-3 (tests/oracle.hpp).
  const double f_ref[5] = {0.25000000000001266, 0.12499999999998054, 0.062500000000011519, 0.031249999999998859,
                           0.015624999999999471};
  auto c = config(Kernel::constant(2.0), 1.0);
  c.scheme.rel_tol = 1e-10;
  c.scheme.abs_tol = 1e-14;
  auto t = integrate(mono(gen::discrete(256)), c);
  REQUIRE_FALSE(t.flagged());
  const auto& last = t.snapshots.back();
  CHECK(last.time == 1.0);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(last.density[i] - f_ref[i]) / f_ref[i] <= 1e-6);
  CHECK(moment(last, 0.0) == doctest::Approx(0.50000000000000255).epsilon(1e-6));
}

TEST_CASE("additive kernel number decay") {
  auto c = config(Kernel::additive(), 1.0);
  auto t = integrate(mono(gen::discrete(1024)), c);
  REQUIRE_FALSE(t.flagged());
  CHECK(t.log.fast_path);
  CHECK(std::abs(t.moments.m0.back() - std::exp(-1.0)) / std::exp(-1.0) <= 1e-4);
}

TEST_CASE("multiplicative kernel before gelation") {
  auto c = config(Kernel::multiplicative(), 0.5);
  auto t = integrate(mono(gen::discrete(2048)), c);
  REQUIRE_FALSE(t.flagged());
  CHECK(std::abs(t.moments.m2.back() - 2.0) / 2.0 <= 1e-3);
  CHECK(std::abs(t.moments.m1.back() - 1.0) <= 1e-6);
  // Frozen oracle values at t = 0.5: f1 = e^{-1/2}, f2 = e^{-1}/4.
  CHECK(t.snapshots.back().density[0] == doctest::Approx(0.60653065971263653).epsilon(1e-6));
  CHECK(t.snapshots.back().density[1] == doctest::Approx(0.091969860292834507).epsilon(1e-6));
}

TEST_CASE("stiffness at the gel point flags the trajectory and keeps the partial run") {
  auto c = config(Kernel::multiplicative(), 2.0, every(0.1, 2.0));
  auto t = integrate(mono(gen::discrete(512)), c);
  CHECK(t.flag == TrajectoryFlag::GelationStiffness);
  CHECK(t.stop_time < 2.0);
  // With 512 sizes the leak guard trips before T_gel = 1.
  CHECK(t.stop_time > 0.5);
  CHECK(t.snapshots.size() >= 6);
  CHECK_FALSE(t.flag_message.empty());
}

TEST_CASE("fixed-step RK4 agrees with the adaptive scheme") {
  auto c = config(Kernel::constant(2.0), 1.0);
  c.scheme.kind = Scheme::Kind::RK4Fixed;
  c.scheme.dt = 1e-3;
  auto t = integrate(mono(gen::discrete(128)), c);
  CHECK(t.snapshots.back().density[0] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("property: trajectory invariants along random runs") {
  gen::Rng r(31);
  std::vector<Kernel> ks{Kernel::constant(2.0), Kernel::additive(), Kernel::power_sum(0.3, 0.6),
                         Kernel::brownian(), Kernel::multiplicative()};
  for (int trial = 0; trial < 10; ++trial) {
    const Kernel& k = ks[static_cast<std::size_t>(trial) % ks.size()];
    bool sectional = r.coin();
    GridPtr g = sectional ? gen::geometric(1.0, 1e4, r.integer(40, 80)) : gen::discrete(r.integer(64, 256));
    SizeDistribution init;
    init.grid = g;
    init.density.assign(g->size(), 0.0);
    for (int i = 0; i < 4; ++i) init.density[static_cast<std::size_t>(r.integer(0, 7))] += r.uniform(0.1, 1.0);
    auto c = config(k, r.uniform(0.2, 1.0), every(0.05, 1.0));
    c.boundary = r.coin() ? Boundary::Absorbing : Boundary::Conservative;
    c.scheme.rel_tol = 1e-9;
    c.scheme.abs_tol = 1e-13;
    auto t = integrate(init, c);
    const auto& m = t.moments;
    double m1_0 = m.m1.front();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& s = t.snapshots[i];
      double peak = *std::max_element(s.density.begin(), s.density.end());
      for (double v : s.density) REQUIRE(v >= -1e-14 * peak);
      double bookkeeping = m.m1[i] + m.gel_mass[i] - m1_0;
      REQUIRE(std::abs(bookkeeping) <= 10.0 * 1e-9 * m1_0 + t.suppressed_mass);
      if (i == 0) continue;
      REQUIRE(m.m0[i] <= m.m0[i - 1] * (1.0 + 1e-9));
      if (c.boundary == Boundary::Conservative || m.gel_mass[i] == 0.0) {
        REQUIRE(m.m05[i] <= m.m05[i - 1] * (1.0 + 1e-9));
        REQUIRE(m.m2[i] >= m.m2[i - 1] * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("property: capped trajectories are Cauchy in the cap level") {
  auto g = gen::discrete(128);
  auto init = mono(g);
  double diff[3];
  double caps[4] = {8.0, 16.0, 32.0, 64.0};
  std::vector<SizeDistribution> ends;
  for (double n : caps) {
    auto c = config(Kernel::multiplicative(), 0.5);
    c.truncation_n = n;
    ends.push_back(integrate(init, c).snapshots.back());
  }
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j) s += std::abs(ends[i + 1].density[j] - ends[i].density[j]);
    diff[i] = s;
  }
  CHECK(diff[1] < diff[0]);
  CHECK(diff[2] < diff[1]);
}

TEST_CASE("invalid solver input") {
  auto c = config(Kernel::constant(2.0), -1.0);
  CHECK_THROWS_AS(integrate(mono(gen::discrete(8)), c), Error);
}
