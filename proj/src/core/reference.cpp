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

#include "reference.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace coag {

bool has_oracle(const Kernel& k) {
  if (k.cap) return false;
  return k.family == Kernel::Family::Constant || k.family == Kernel::Family::Additive ||
         k.family == Kernel::Family::Multiplicative;
}

OracleResult exact_solution(const Kernel& k, double t, int sizes) {
  if (!has_oracle(k)) fail(Status::Unsupported, "no closed-form oracle for kernel " + k.name());
  if (!(t >= 0.0)) fail(Status::Domain, "oracle time must be non-negative");
  OracleResult r;
  r.t = t;
  r.valid_until = std::numeric_limits<double>::infinity();
  r.moments.m1 = 1.0;
  switch (k.family) {
    case Kernel::Family::Constant: {
      // tau = c t / 2 reduces general c to the unit-rate solution.
      const double tau = 0.5 * k.c * t;
      r.kind = OracleResult::Kind::FullDistribution;
      r.moments.m0 = 1.0 / (1.0 + tau);
      r.moments.m2 = 1.0 + k.c * t;
      const double q = tau / (1.0 + tau), a = 1.0 / ((1.0 + tau) * (1.0 + tau));
      double p = a;
      for (int i = 1; i <= sizes; ++i) {
        r.values.push_back(p);
        p *= q;
      }
      break;
    }
    case Kernel::Family::Additive:
      r.kind = OracleResult::Kind::MomentsOnly;
      r.moments.m0 = std::exp(-t);
      r.moments.m2 = std::exp(2.0 * t);
      break;
    case Kernel::Family::Multiplicative: {
      r.valid_until = 1.0;
      if (t >= 1.0) {
        std::ostringstream os;
        os << "multiplicative oracle valid only for t in [0, 1) (gelation at T_gel = 1); got t = " << t;
        fail(Status::Domain, os.str());
      }
      r.kind = sizes > 0 ? OracleResult::Kind::FullDistribution : OracleResult::Kind::MomentsOnly;
      r.moments.m0 = 1.0 - 0.5 * t;
      r.moments.m2 = 1.0 / (1.0 - t);
      for (int i = 1; i <= sizes; ++i) {
        // i^{i-2} t^{i-1} e^{-i t} / i!
        double lg = (i - 2) * std::log(static_cast<double>(i)) - i * t - std::lgamma(i + 1.0);
        double v = t == 0.0 ? (i == 1 ? 1.0 : 0.0) : std::exp(lg + (i - 1) * std::log(t));
        r.values.push_back(v);
      }
      break;
    }
    default:
      break;
  }
  return r;
}

OracleMoments moment_oracle(const Kernel& k, const OracleMoments& init, double t) {
  if (!has_oracle(k)) fail(Status::Unsupported, "no closed moment system for kernel " + k.name());
  if (!(t >= 0.0)) fail(Status::Domain, "oracle time must be non-negative");
  const double c = k.c;
  const auto fam = k.family;
  if (fam == Kernel::Family::Multiplicative && init.m2 > 0.0 && t >= 1.0 / init.m2) {
    std::ostringstream os;
    os << "second moment blows up at t = " << 1.0 / init.m2 << "; requested t = " << t;
    fail(Status::Domain, os.str());
  }
  auto f = [&](const double* y, double* dy) {
    switch (fam) {
      case Kernel::Family::Constant:
        dy[0] = -0.5 * c * y[0] * y[0];
        dy[1] = 0.0;
        dy[2] = c * y[1] * y[1];
        break;
      case Kernel::Family::Additive:
        dy[0] = -y[0] * y[1];
        dy[1] = 0.0;
        dy[2] = 2.0 * y[1] * y[2];
        break;
      default:
        dy[0] = -0.5 * y[1] * y[1];
        dy[1] = 0.0;
        dy[2] = y[2] * y[2];
        break;
    }
  };
  double y[3] = {init.m0, init.m1, init.m2};
  double s = 0.0;
  while (s < t) {
    double d[3];
    f(y, d);
    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
      if (y[i] != 0.0) scale = std::max(scale, std::fabs(d[i] / y[i]));
    double h = std::min(t - s, scale > 0.0 ? 2e-3 / scale : t - s);
    h = std::min(h, 1e-3);
    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    f(y, k1);
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(tmp, k2);
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(tmp, k3);
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * k3[i];
    f(tmp, k4);
    for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s = (h == t - s) ? t : s + h;
  }
  return {y[0], y[1], y[2]};
}

}  // namespace coag
