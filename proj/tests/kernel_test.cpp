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
#include <limits>

#include "error.hpp"
#include "gen.hpp"
#include "kernel.hpp"

using namespace coag;

TEST_CASE("kernel evaluation at documented points") {
  CHECK(Kernel::brownian().eval(1.0, 8.0) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(Kernel::constant(2.0).eval(3.0, 17.0) == 2.0);
  CHECK(Kernel::constant(2.0).eval(1e-3, 1e6) == 2.0);
  CHECK(Kernel::power_sum(0.0, 1.0).eval(2.0, 3.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(Kernel::additive().eval(2.0, 3.0) == 5.0);
  CHECK(Kernel::multiplicative().eval(3.0, 4.0) == 12.0);
  CHECK(Kernel::product(RadialRate::power_law(0.75)).eval(16.0, 16.0) == doctest::Approx(64.0).epsilon(1e-14));
}

TEST_CASE("non-positive sizes are a domain error") {
  for (const auto& k : gen::closed_form_kernels()) {
    CHECK_THROWS_AS(k.eval(0.0, 1.0), Error);
    CHECK_THROWS_AS(k.eval(1.0, -2.0), Error);
  }
}

TEST_CASE("truncation examples") {
  Kernel m = truncate(Kernel::multiplicative(), 10.0, TruncationMode::Cap);
  CHECK(m.eval(3.0, 4.0) == 10.0);
  Kernel p = truncate(Kernel::product(RadialRate::identity()), 2.0, TruncationMode::ProductCap);
  CHECK(p.eval(3.0, 5.0) == 4.0);
  CHECK(truncate(Kernel::product(RadialRate::identity()), 2.0, TruncationMode::Cap).eval(3.0, 5.0) == 2.0);
  CHECK_THROWS_AS(truncate(Kernel::additive(), 2.0, TruncationMode::ProductCap), Error);
  CHECK_THROWS_AS(truncate(Kernel::additive(), 0.0, TruncationMode::Cap), Error);
}

TEST_CASE("infinite cap leaves the kernel unchanged") {
  gen::Rng r(11);
  for (const auto& k : gen::closed_form_kernels()) {
    Kernel t = truncate(k, std::numeric_limits<double>::infinity(), TruncationMode::Cap);
    for (int i = 0; i < 200; ++i) {
      double x = r.log_uniform(1e-2, 1e5), y = r.log_uniform(1e-2, 1e5);
      CHECK(t.eval(x, y) == k.eval(x, y));
    }
  }
}

TEST_CASE("property: closed-form kernels are exactly symmetric") {
  gen::Rng r(1);
  for (const auto& k : gen::closed_form_kernels()) {
    for (int i = 0; i < 10000; ++i) {
      double x = r.log_uniform(1e-3, 1e6), y = r.log_uniform(1e-3, 1e6);
      REQUIRE(k.eval(x, y) == k.eval(y, x));
    }
  }
}

TEST_CASE("property: truncation is monotone in the level, bounded by the kernel and by the cap") {
  gen::Rng r(2);
  for (const auto& k : gen::closed_form_kernels()) {
    for (int i = 0; i < 500; ++i) {
      double x = r.log_uniform(1e-2, 1e4), y = r.log_uniform(1e-2, 1e4);
      double n1 = r.log_uniform(1e-2, 1e6), n2 = n1 * r.uniform(1.0, 10.0);
      double a = truncate(k, n1, TruncationMode::Cap).eval(x, y);
      double b = truncate(k, n2, TruncationMode::Cap).eval(x, y);
      REQUIRE(a <= b);
      REQUIRE(b <= k.eval(x, y));
      REQUIRE(a <= n1);
    }
  }
}

TEST_CASE("classification of the reference families") {
  auto c = classify(Kernel::constant(2.0), 1.0, 1e4);
  REQUIRE(c.bounded_kappa0);
  CHECK(*c.bounded_kappa0 == doctest::Approx(2.0));

  auto a = classify(Kernel::additive(), 1.0, 1e4);
  REQUIRE(a.linear_kappa1);
  CHECK(*a.linear_kappa1 == doctest::Approx(1.0));
  CHECK_FALSE(a.gelling_lambda);

  auto m = classify(Kernel::multiplicative(), 1.0, 1e4);
  REQUIRE(m.product_r);
  CHECK(m.product_r->form == RadialRate::Form::Identity);
  REQUIRE(m.gelling_lambda);
  CHECK(*m.gelling_lambda == doctest::Approx(2.0));
  REQUIRE(m.gelling_kappa_m);
  CHECK(*m.gelling_kappa_m == doctest::Approx(1.0));
}

TEST_CASE("property: a Linear classification bounds every sampled point") {
  gen::Rng r(3);
  for (const auto& k : gen::closed_form_kernels()) {
    GrowthClass g;
    try {
      g = classify(k, 1e-1, 1e4);
    } catch (const Error&) {
      continue;
    }
    if (!g.linear_kappa1) continue;
    for (int i = 0; i < 2000; ++i) {
      double x = r.log_uniform(1e-1, 1e4), y = r.log_uniform(1e-1, 1e4);
      REQUIRE(k.eval(x, y) <= *g.linear_kappa1 * (2.0 + x + y) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("tabulated kernels must be symmetric") {
  CHECK_THROWS_AS(Kernel::tabulated({1.0, 2.0}, {1.0, 2.0, 3.0, 4.0}), Error);
  Kernel k = Kernel::tabulated({1.0, 2.0}, {1.0, 2.0, 2.0, 4.0});
  CHECK(k.eval(1.3, 1.7) == k.eval(1.7, 1.3));
  CHECK_NOTHROW(classify(k, 1.0, 2.0));
}

TEST_CASE("omega_R values") {
  CHECK(omega_R(Kernel::constant(2.0), 1.0, 10.0) == doctest::Approx(0.2));
  CHECK(omega_R(Kernel::additive(), 1.0, 10.0) == doctest::Approx(1.1));
  // Brownian decays roughly like y^{-2/3}; check the trend on three decades.
  Kernel b = Kernel::brownian();
  double w2 = omega_R(b, 1.0, 1e2), w4 = omega_R(b, 1.0, 1e4), w6 = omega_R(b, 1.0, 1e6);
  CHECK(w4 < w2);
  CHECK(w6 < w4);
  CHECK(w6 < 0.1 * w2);
}

TEST_CASE("separable decomposition exists for the fast families only") {
  std::vector<double> x{1, 2, 3, 4};
  CHECK(separable_terms(Kernel::constant(2.0), x).has_value());
  CHECK(separable_terms(Kernel::additive(), x).has_value());
  CHECK(separable_terms(Kernel::multiplicative(), x).has_value());
  CHECK_FALSE(separable_terms(truncate(Kernel::multiplicative(), 2.0, TruncationMode::Cap), x).has_value());
}
