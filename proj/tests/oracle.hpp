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

#ifndef COAG_TESTS_ORACLE_HPP
#define COAG_TESTS_ORACLE_HPP

// Brute-force reference: the discrete system on sizes 1..n integrated with classical RK4 at a
// fixed small step, independent of the library's solver. Products beyond n are dropped.
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using KernelFn = std::function<double(double, double)>;

inline std::vector<double> discrete_rhs(const KernelFn& K, const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double r = K(static_cast<double>(i + 1), static_cast<double>(j + 1)) * f[i] * f[j];
      d[i] -= r;
      std::size_t k = i + j + 1;  // size (i+1)+(j+1) sits at index i+j+1
      if (k < n) d[k] += 0.5 * r;
    }
  }
  return d;
}

inline std::vector<double> integrate(const KernelFn& K, std::vector<double> f, double t_end, double h) {
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  const double dt = t_end / static_cast<double>(steps);
  std::vector<double> y(f.size());
  for (std::size_t s = 0; s < steps; ++s) {
    auto k1 = discrete_rhs(K, f);
    for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] + 0.5 * dt * k1[i];
    auto k2 = discrete_rhs(K, y);
    for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] + 0.5 * dt * k2[i];
    auto k3 = discrete_rhs(K, y);
    for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i] + dt * k3[i];
    auto k4 = discrete_rhs(K, y);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return f;
}

inline double moment(const std::vector<double>& f, double mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(static_cast<double>(i + 1), mu) * f[i];
  return s;
}

// O(N^2) gain on sizes 1..n: half the rate of all pairs landing on each size.
inline std::vector<double> direct_gain(const KernelFn& K, const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j + 1 < n; ++j)
      g[i + j + 1] += 0.5 * K(static_cast<double>(i + 1), static_cast<double>(j + 1)) * f[i] * f[j];
  return g;
}

}  // namespace oracle

#endif
