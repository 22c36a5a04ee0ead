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

#ifndef COAG_CORE_STATE_HPP
#define COAG_CORE_STATE_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace coag {

struct SizeGrid {
  enum class Kind { DiscreteInteger, Sectional };
  enum class Spacing { Linear, Geometric, Custom };

  Kind kind = Kind::DiscreteInteger;
  Spacing spacing = Spacing::Custom;
  double ratio = 0.0;
  std::vector<double> edges;  // size()+1 entries; discrete sites use i -/+ 1/2
  std::vector<double> pivots;
  std::vector<double> widths;

  static SizeGrid discrete(int n);
  // Geometric edges lo * ratio^i, i = 0..bins.
  static SizeGrid geometric(double lo, double ratio, int bins);
  static SizeGrid geometric_span(double lo, double hi, int bins);
  static SizeGrid linear(double lo, double hi, int bins);
  static SizeGrid sectional(std::vector<double> edges, std::vector<double> pivots);

  std::size_t size() const { return pivots.size(); }
  bool same_as(const SizeGrid& o) const;
};

using GridPtr = std::shared_ptr<const SizeGrid>;

struct SizeDistribution {
  GridPtr grid;
  std::vector<double> density;
  double time = 0.0;

  std::size_t size() const { return density.size(); }
  // Number of particles in each cell (density times width).
  std::vector<double> numbers() const;
  static SizeDistribution from_numbers(GridPtr g, const std::vector<double>& n, double t);
};

double moment(const SizeDistribution& d, double mu);
double moment_of_numbers(const SizeGrid& g, const std::vector<double>& n, double mu);

struct InitSpec {
  enum class Family { Monodisperse, Exponential, Tabulated };
  Family family = Family::Monodisperse;
  double size = 1.0;
  double mean = 1.0;
  double total = 1.0;  // particle number
  std::vector<double> values;
};

SizeDistribution init_distribution(GridPtr grid, const InitSpec& spec);

struct RegridReport {
  double underflow_number = 0.0;
  double underflow_mass = 0.0;
  double overflow_number = 0.0;
  double overflow_mass = 0.0;
};

SizeDistribution regrid(const SizeDistribution& d, GridPtr target, RegridReport* report = nullptr);

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> m0, m05, m1, m2, gel_mass;

  std::size_t size() const { return times.size(); }
  void push(double t, const SizeDistribution& d, double gel);
};

}  // namespace coag

#endif
