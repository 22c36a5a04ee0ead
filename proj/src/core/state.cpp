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

#include "state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace coag {

namespace {

void finish_sectional(SizeGrid& g) {
  std::size_t n = g.pivots.size();
  g.widths.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.widths[i] = g.edges[i + 1] - g.edges[i];
}

}  // namespace

SizeGrid SizeGrid::discrete(int n) {
  if (n < 1) fail(Status::InvalidArgument, "discrete grid needs N >= 1");
  SizeGrid g;
  g.kind = Kind::DiscreteInteger;
  g.spacing = Spacing::Linear;
  std::size_t m = static_cast<std::size_t>(n);
  g.pivots.resize(m);
  g.widths.assign(m, 1.0);
  g.edges.resize(m + 1);
  for (std::size_t i = 0; i < m; ++i) g.pivots[i] = static_cast<double>(i + 1);
  for (std::size_t i = 0; i <= m; ++i) g.edges[i] = static_cast<double>(i) + 0.5;
  return g;
}

SizeGrid SizeGrid::geometric(double lo, double ratio, int bins) {
  if (!(lo > 0.0) || !(ratio > 1.0) || bins < 1)
    fail(Status::InvalidArgument, "geometric grid needs lo > 0, ratio > 1, bins >= 1");
  SizeGrid g;
  g.kind = Kind::Sectional;
  g.spacing = Spacing::Geometric;
  g.ratio = ratio;
  std::size_t m = static_cast<std::size_t>(bins);
  g.edges.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) g.edges[i] = lo * std::pow(ratio, static_cast<double>(i));
  g.pivots.resize(m);
  for (std::size_t i = 0; i < m; ++i) g.pivots[i] = std::sqrt(g.edges[i] * g.edges[i + 1]);
  finish_sectional(g);
  return g;
}

SizeGrid SizeGrid::geometric_span(double lo, double hi, int bins) {
  if (!(lo > 0.0) || !(hi > lo) || bins < 1)
    fail(Status::InvalidArgument, "geometric span needs 0 < lo < hi and bins >= 1");
  SizeGrid g = geometric(lo, std::pow(hi / lo, 1.0 / bins), bins);
  g.edges.back() = hi;
  g.pivots.back() = std::sqrt(g.edges[g.edges.size() - 2] * hi);
  finish_sectional(g);
  return g;
}

SizeGrid SizeGrid::linear(double lo, double hi, int bins) {
  if (!(lo > 0.0) || !(hi > lo) || bins < 1)
    fail(Status::InvalidArgument, "linear grid needs 0 < lo < hi and bins >= 1");
  SizeGrid g;
  g.kind = Kind::Sectional;
  g.spacing = Spacing::Linear;
  std::size_t m = static_cast<std::size_t>(bins);
  g.edges.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) g.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  g.pivots.resize(m);
  for (std::size_t i = 0; i < m; ++i) g.pivots[i] = std::sqrt(g.edges[i] * g.edges[i + 1]);
  finish_sectional(g);
  return g;
}

SizeGrid SizeGrid::sectional(std::vector<double> edges, std::vector<double> pivots) {
  if (edges.size() < 2 || pivots.size() + 1 != edges.size())
    fail(Status::InvalidArgument, "sectional grid needs n+1 edges for n pivots, n >= 1");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) fail(Status::InvalidArgument, "sectional edges must be strictly increasing");
    if (!(pivots[i] > edges[i] && pivots[i] < edges[i + 1]))
      fail(Status::InvalidArgument, "sectional pivot must lie strictly inside its cell");
  }
  if (!(edges[0] >= 0.0)) fail(Status::InvalidArgument, "sectional edges must be non-negative");
  SizeGrid g;
  g.kind = Kind::Sectional;
  g.spacing = Spacing::Custom;
  g.edges = std::move(edges);
  g.pivots = std::move(pivots);
  finish_sectional(g);
  return g;
}

bool SizeGrid::same_as(const SizeGrid& o) const {
  return kind == o.kind && pivots == o.pivots && widths == o.widths;
}

std::vector<double> SizeDistribution::numbers() const {
  std::vector<double> n(density.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = density[i] * grid->widths[i];
  return n;
}

SizeDistribution SizeDistribution::from_numbers(GridPtr g, const std::vector<double>& n, double t) {
  SizeDistribution d;
  d.density.resize(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) d.density[i] = n[i] / g->widths[i];
  d.grid = std::move(g);
  d.time = t;
  return d;
}

double moment_of_numbers(const SizeGrid& g, const std::vector<double>& n, double mu) {
  if (!(mu >= -1.0 && mu <= 3.0)) {
    std::ostringstream os;
    os << "moment exponent " << mu << " outside supported range [-1, 3]";
    fail(Status::Domain, os.str());
  }
  double s = 0.0;
  if (mu == 0.0) {
    for (double v : n) s += v;
  } else if (mu == 1.0) {
    for (std::size_t i = 0; i < n.size(); ++i) s += g.pivots[i] * n[i];
  } else if (mu == 2.0) {
    for (std::size_t i = 0; i < n.size(); ++i) s += g.pivots[i] * g.pivots[i] * n[i];
  } else if (mu == 0.5) {
    for (std::size_t i = 0; i < n.size(); ++i) s += std::sqrt(g.pivots[i]) * n[i];
  } else {
    for (std::size_t i = 0; i < n.size(); ++i) s += std::pow(g.pivots[i], mu) * n[i];
  }
  return s;
}

double moment(const SizeDistribution& d, double mu) {
  const SizeGrid& g = *d.grid;
  double s = 0.0;
  if (!(mu >= -1.0 && mu <= 3.0)) return moment_of_numbers(g, {}, mu);
  for (std::size_t i = 0; i < d.density.size(); ++i) {
    double x = g.pivots[i];
    double w = (mu == 0.0) ? 1.0 : (mu == 1.0 ? x : (mu == 2.0 ? x * x : (mu == 0.5 ? std::sqrt(x) : std::pow(x, mu))));
    s += w * d.density[i] * g.widths[i];
  }
  return s;
}

namespace {

// Two-point split of (number, mean size v) onto the pivot pair bracketing v.
// Returns false when v falls outside [p_0, p_last].
bool apportion(const std::vector<double>& p, double v, double number, std::vector<double>& out) {
  std::size_t n = p.size();
  if (v < p.front() || v > p.back()) return false;
  auto it = std::lower_bound(p.begin(), p.end(), v);
  std::size_t j = static_cast<std::size_t>(it - p.begin());
  if (j < n && p[j] == v) {
    out[j] += number;
    return true;
  }
  std::size_t i = j - 1;
  double a = (p[j] - v) / (p[j] - p[i]);
  out[i] += a * number;
  out[j] += (1.0 - a) * number;
  return true;
}

}  // namespace

SizeDistribution init_distribution(GridPtr grid, const InitSpec& spec) {
  if (!grid || grid->size() == 0) fail(Status::InvalidArgument, "initial distribution needs a non-empty grid");
  const SizeGrid& g = *grid;
  std::vector<double> n(g.size(), 0.0);
  switch (spec.family) {
    case InitSpec::Family::Monodisperse: {
      if (!(spec.size > 0.0) || !(spec.total > 0.0))
        fail(Status::InvalidArgument, "monodisperse size and number must be positive");
      std::size_t hit = g.size();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (std::fabs(g.pivots[i] - spec.size) <= 1e-12 * spec.size) hit = i;
      if (hit == g.size()) {
        std::ostringstream os;
        os << "monodisperse size " << spec.size << " is not a pivot of the grid";
        fail(Status::Domain, os.str());
      }
      n[hit] = spec.total;
      break;
    }
    case InitSpec::Family::Exponential: {
      if (!(spec.mean > 0.0) || !(spec.total > 0.0))
        fail(Status::InvalidArgument, "exponential mean and number must be positive");
      double m = spec.mean, N0 = spec.total;
      if (g.kind == SizeGrid::Kind::DiscreteInteger) {
        for (std::size_t i = 0; i < g.size(); ++i) n[i] = N0 / m * std::exp(-g.pivots[i] / m);
        break;
      }
      // Exact cell number and mass of N0/m e^{-x/m}, then two-point apportionment
      // of the cell mean size, so that both moments are captured to round-off.
      for (std::size_t i = 0; i < g.size(); ++i) {
        double a = g.edges[i], b = g.edges[i + 1];
        double ea = std::exp(-a / m), eb = std::exp(-b / m);
        double num = N0 * (ea - eb);
        double mass = N0 * ((a + m) * ea - (b + m) * eb);
        if (!(num > 0.0)) continue;
        double v = mass / num;
        if (!apportion(g.pivots, v, num, n)) {
          // Below the first or above the last pivot: keep the mass.
          std::size_t k = v < g.pivots.front() ? 0 : g.size() - 1;
          n[k] += mass / g.pivots[k];
        }
      }
      break;
    }
    case InitSpec::Family::Tabulated: {
      if (spec.values.size() != g.size())
        fail(Status::InvalidArgument, "tabulated initial density length does not match the grid");
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(spec.values[i] >= 0.0) || !std::isfinite(spec.values[i]))
          fail(Status::InvalidArgument, "tabulated initial density must be finite and non-negative");
        n[i] = spec.values[i] * g.widths[i];
      }
      break;
    }
  }
  return SizeDistribution::from_numbers(std::move(grid), n, 0.0);
}

SizeDistribution regrid(const SizeDistribution& d, GridPtr target, RegridReport* report) {
  if (!target || target->size() == 0) fail(Status::InvalidArgument, "regrid target grid is degenerate");
  RegridReport rep;
  if (d.grid->same_as(*target)) {
    SizeDistribution out = d;
    out.grid = std::move(target);
    if (report) *report = rep;
    return out;
  }
  const auto src = d.numbers();
  std::vector<double> n(target->size(), 0.0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == 0.0) continue;
    double v = d.grid->pivots[i];
    if (apportion(target->pivots, v, src[i], n)) continue;
    if (v < target->pivots.front()) {
      rep.underflow_number += src[i];
      rep.underflow_mass += src[i] * v;
    } else {
      rep.overflow_number += src[i];
      rep.overflow_mass += src[i] * v;
    }
  }
  if (report) *report = rep;
  return SizeDistribution::from_numbers(std::move(target), n, d.time);
}

void MomentSeries::push(double t, const SizeDistribution& d, double gel) {
  times.push_back(t);
  m0.push_back(moment(d, 0.0));
  m05.push_back(moment(d, 0.5));
  m1.push_back(moment(d, 1.0));
  m2.push_back(moment(d, 2.0));
  gel_mass.push_back(gel);
}

}  // namespace coag
