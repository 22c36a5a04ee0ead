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
#include "oracle.hpp"
#include "reference.hpp"

using namespace coag;

TEST_CASE("constant kernel closed form sums to the known moments") {
  for (double t : {0.5, 1.0, 2.0}) {
    auto r = exact_solution(Kernel::constant(2.0), t, 4000);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      m0 += r.values[i];
      m1 += static_cast<double>(i + 1) * r.values[i];
    }
    CHECK(m0 == doctest::Approx(1.0 / (1.0 + t)).epsilon(1e-12));
    CHECK(m1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.moments.m0 == doctest::Approx(1.0 / (1.0 + t)).epsilon(1e-15));
    CHECK(r.values[0] == doctest::Approx(1.0 / ((1.0 + t) * (1.0 + t))).epsilon(1e-15));
  }
}

TEST_CASE("brute-force integration confirms the closed forms") {
  auto brute_c = oracle::integrate([](double, double) { return 2.0; }, [] {
    std::vector<double> f(64, 0.0);
    f[0] = 1.0;
    return f;
  }(), 1.0, 1e-3);
  auto exact_c = exact_solution(Kernel::constant(2.0), 1.0, 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(brute_c[i] - exact_c.values[i]) / exact_c.values[i] <= 1e-9);

  // 256 sizes: the mass beyond the last one stays below 1e-20 up to t = 0.5.
  std::vector<double> f0(256, 0.0);
  f0[0] = 1.0;
  auto brute_m = oracle::integrate([](double x, double y) { return x * y; }, f0, 0.5, 1e-3);
  auto exact_m = exact_solution(Kernel::multiplicative(), 0.5, 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(brute_m[i] - exact_m.values[i]) / exact_m.values[i] <= 1e-9);
  CHECK(oracle::moment(brute_m, 0.0) == doctest::Approx(exact_m.moments.m0).epsilon(1e-8));

  auto brute_a = oracle::integrate([](double x, double y) { return x + y; }, f0, 0.5, 1e-3);
  auto exact_a = exact_solution(Kernel::additive(), 0.5);
  CHECK(oracle::moment(brute_a, 0.0) == doctest::Approx(exact_a.moments.m0).epsilon(1e-8));
}

TEST_CASE("time zero is the monodisperse state") {
  for (const Kernel& k : {Kernel::constant(2.0), Kernel::multiplicative()}) {
    auto r = exact_solution(k, 0.0, 5);
    CHECK(r.values[0] == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(r.values[static_cast<std::size_t>(i)] == 0.0);
  }
  auto a = exact_solution(Kernel::additive(), 0.0);
  CHECK(a.moments.m0 == 1.0);
  CHECK(a.moments.m2 == 1.0);
}

TEST_CASE("multiplicative oracle stops at the gel point") {
  auto r = exact_solution(Kernel::multiplicative(), 0.99);
  CHECK(r.valid_until == 1.0);
  try {
    exact_solution(Kernel::multiplicative(), 1.0);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::Domain);
  }
  CHECK_THROWS_AS(moment_oracle(Kernel::multiplicative(), {1.0, 1.0, 2.0}, 0.5), Error);
  CHECK_THROWS_AS(exact_solution(Kernel::constant(2.0), -1.0), Error);
}

TEST_CASE("moment oracle") {
  auto m = moment_oracle(Kernel::constant(2.0), {1.0, 1.0, 1.0}, 1.0);
  CHECK(m.m0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.m1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.m2 == doctest::Approx(3.0).epsilon(1e-10));
  auto a = moment_oracle(Kernel::additive(), {1.0, 1.0, 1.0}, 1.0);
  CHECK(a.m0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  auto p = moment_oracle(Kernel::multiplicative(), {1.0, 1.0, 1.0}, 0.5);
  CHECK(p.m2 == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("kernels without an oracle") {
  CHECK_FALSE(has_oracle(Kernel::brownian()));
  try {
    exact_solution(Kernel::brownian(), 1.0);
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.status() == Status::Unsupported);
  }
}
