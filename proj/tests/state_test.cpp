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

#include <cmath>

#include "error.hpp"
#include "gen.hpp"
#include "state.hpp"

using namespace coag;

TEST_CASE("moments of simple distributions") {
  auto g = gen::discrete(100);
  InitSpec mono;
  auto d = init_distribution(g, mono);
  CHECK(d.density[0] == 1.0);
  for (std::size_t i = 1; i < d.size(); ++i) REQUIRE(d.density[i] == 0.0);
  CHECK(moment(d, 0.0) == 1.0);
  CHECK(moment(d, 1.0) == 1.0);

  InitSpec two;
  two.size = 2.0;
  auto d2 = init_distribution(gen::discrete(10), two);
  CHECK(d2.density[1] == 1.0);
}

TEST_CASE("exponential initial data on a fine geometric grid") {
  auto g = gen::geometric(1e-3, 1e3, 1024);
  InitSpec e;
  e.family = InitSpec::Family::Exponential;
  auto d = init_distribution(g, e);
  CHECK(std::abs(moment(d, 1.0) - 1.0) <= 1e-6);
  CHECK(moment(d, 2.0) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(moment(d, 0.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("off-grid monodisperse size is refused") {
  InitSpec s;
  s.size = 2.5;
  CHECK_THROWS_AS(init_distribution(gen::discrete(10), s), Error);
}

TEST_CASE("regrid") {
  gen::Rng r(5);
  auto g = gen::geometric(1e-2, 1e2, 64);
  auto d = gen::distribution(r, g);
  auto same = regrid(d, g);
  REQUIRE(same.density == d.density);

  // A size-3 monomer onto pivots {2, 4} splits evenly.
  auto src = gen::discrete(3);
  InitSpec s;
  s.size = 3.0;
  auto d3 = init_distribution(src, s);
  auto tgt = std::make_shared<const SizeGrid>(SizeGrid::sectional({1.0, 3.0, 5.0}, {2.0, 4.0}));
  auto out = regrid(d3, tgt);
  auto n = out.numbers();
  CHECK(n[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(n[1] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(regrid(d, nullptr), Error);
}

TEST_CASE("property: refine then coarsen keeps number and mass up to what leaves the pivot range") {
  gen::Rng r(6);
  for (int trial = 0; trial < 50; ++trial) {
    int bins = r.integer(8, 64);
    auto coarse = gen::geometric(1e-2, 1e2, bins);
    auto fine = gen::geometric(1e-3, 1e3, bins * 4);
    auto d = gen::distribution(r, coarse);
    RegridReport rep1, rep2;
    auto up = regrid(d, fine, &rep1);
    auto down = regrid(up, coarse, &rep2);
    double lost_n = rep1.underflow_number + rep1.overflow_number + rep2.underflow_number + rep2.overflow_number;
    double lost_m = rep1.underflow_mass + rep1.overflow_mass + rep2.underflow_mass + rep2.overflow_mass;
    REQUIRE(rep1.underflow_number + rep1.overflow_number == 0.0);
    CHECK(moment(down, 0.0) + lost_n == doctest::Approx(moment(d, 0.0)).epsilon(1e-12));
    CHECK(moment(down, 1.0) + lost_m == doctest::Approx(moment(d, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("property: regrid accounts for all mass") {
  gen::Rng r(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto src = gen::geometric(1e-3, 1e3, r.integer(16, 128));
    auto dst = gen::geometric(r.log_uniform(1e-2, 1.0), r.log_uniform(10.0, 1e2), r.integer(8, 64));
    auto d = gen::distribution(r, src);
    RegridReport rep;
    auto out = regrid(d, dst, &rep);
    double before = moment(d, 1.0);
    double after = moment(out, 1.0) + rep.underflow_mass + rep.overflow_mass;
    REQUIRE(std::abs(after - before) <= 1e-12 * before);
  }
}

TEST_CASE("property: moments are linear and strictly monotone in the density") {
  gen::Rng r(8);
  auto g = gen::geometric(1e-2, 1e3, 48);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = gen::distribution(r, g), b = gen::distribution(r, g);
    double mu = r.uniform(-0.5, 3.0), s = r.uniform(0.1, 5.0);
    SizeDistribution c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.density[i] = a.density[i] + s * b.density[i];
    REQUIRE(moment(c, mu) == doctest::Approx(moment(a, mu) + s * moment(b, mu)).epsilon(1e-12));
    // Bump one cell by enough to clear rounding in the total.
    SizeDistribution bump = a;
    auto i = static_cast<std::size_t>(r.integer(0, static_cast<int>(a.size()) - 1));
    double w = g->edges[i + 1] - g->edges[i];
    bump.density[i] += std::max(1e-3, 1e-9 * moment(a, mu) / (std::pow(g->pivots[i], mu) * w));
    REQUIRE(moment(bump, mu) > moment(a, mu));
  }
}

TEST_CASE("property: Hoelder interpolation between moments") {
  gen::Rng r(9);
  auto g = gen::geometric(1e-2, 1e3, 64);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = gen::distribution(r, g);
    double m1 = r.uniform(-0.5, 1.0), m3 = m1 + r.uniform(0.5, 2.0), m2 = r.uniform(m1, m3);
    double w = (m3 - m2) / (m3 - m1);
    double bound = std::pow(moment(d, m1), w) * std::pow(moment(d, m3), 1.0 - w);
    REQUIRE(moment(d, m2) <= bound * (1.0 + 1e-12));
  }
}
