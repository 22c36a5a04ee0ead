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

#ifndef COAG_CORE_KERNEL_HPP
#define COAG_CORE_KERNEL_HPP

#include <optional>
#include <string>
#include <vector>

namespace coag {

// Radial factor r of a product kernel K(x,y) = r(x) r(y).
struct RadialRate {
  enum class Form { PowerLaw, SqrtLog, Identity, Tabulated };

  Form form = Form::Identity;
  double exponent = 1.0;      // PowerLaw: scale * x^exponent
  double scale = 1.0;
  double offset = 2.0;        // SqrtLog: sqrt(offset + x) * ln(offset + x)^log_exponent
  double log_exponent = 0.5;
  std::vector<double> tab_x;  // Tabulated: piecewise linear, constant beyond the ends
  std::vector<double> tab_r;
  std::optional<double> cap;

  static RadialRate identity();
  static RadialRate power_law(double p, double scale = 1.0);
  static RadialRate sqrt_log(double offset, double log_exponent);
  static RadialRate tabulated(std::vector<double> xs, std::vector<double> rs);

  double raw(double x) const;
  double operator()(double x) const;
  double derivative(double x) const;
  std::string describe() const;
};

struct Kernel {
  enum class Family { Constant, Additive, Multiplicative, PowerSum, Product, Brownian, Tabulated };

  Family family = Family::Constant;
  double c = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  RadialRate r;
  // Tabulated: symmetric matrix on tab_x (row-major), bilinear in (ln x, ln y).
  std::vector<double> tab_x;
  std::vector<double> tab_v;
  std::optional<double> cap;

  static Kernel constant(double c);
  static Kernel additive();
  static Kernel multiplicative();
  static Kernel power_sum(double alpha, double beta);
  static Kernel product(RadialRate r);
  static Kernel brownian();
  static Kernel tabulated(std::vector<double> xs, std::vector<double> values);
  // "cubic_sum": (x^{1/3}+y^{1/3})^3, "shear_diff": (x^{1/3}+y^{1/3})^2 |x^{1/3}-y^{1/3}|
  static Kernel tabulated_preset(const std::string& name, double x_min, double x_max, int n);

  double eval(double x, double y) const;
  double eval_uncapped(double x, double y) const;
  std::string name() const;
  // Product families expose their radial factor (Multiplicative -> identity, Constant -> sqrt c).
  std::optional<RadialRate> radial() const;
};

enum class TruncationMode { Cap, ProductCap };

Kernel truncate(const Kernel& k, double n, TruncationMode mode);

struct GrowthClass {
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  bool numeric = false;

  std::optional<double> bounded_kappa0;
  std::optional<double> sublinear_kappa;  // K <= kappa (1+x)(1+y)
  bool omega_decays = false;
  std::optional<double> linear_kappa1;    // K <= kappa1 (2+x+y)
  std::optional<RadialRate> product_r;
  std::optional<double> gelling_lambda;   // K >= kappa_m^2 (xy)^{lambda/2}
  std::optional<double> gelling_kappa_m;

  std::vector<std::string> labels() const;
};

// Classifies on [lo, hi]; `samples` is the per-axis density for numeric certification.
GrowthClass classify(const Kernel& k, double lo, double hi, int samples = 64);

double omega_R(const Kernel& k, double R, double y);

// Separable decomposition on a pivot list. A paired term contributes
// coeff (u(x)v(y) + v(x)u(y)); an unpaired one coeff u(x)u(y).
struct SeparableTerm {
  double coeff = 1.0;
  std::vector<double> u;
  std::vector<double> v;
  bool paired = false;
};
// Empty when the family (or an active cap) does not factor.
std::optional<std::vector<SeparableTerm>> separable_terms(const Kernel& k,
                                                          const std::vector<double>& x);

}  // namespace coag

#endif
