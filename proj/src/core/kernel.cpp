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

#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace coag {

namespace {

// Linear interpolation in ln x on a sorted abscissa; returns the bracketing index and weight.
std::pair<std::size_t, double> locate_log(const std::vector<double>& xs, double x) {
  if (x < xs.front() || x > xs.back()) {
    std::ostringstream os;
    os << "size " << x << " outside tabulated range [" << xs.front() << ", " << xs.back() << "]";
    fail(Status::Domain, os.str());
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = (it == xs.end()) ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (i + 1 >= xs.size()) i = xs.size() - 2;
  double w = (std::log(x) - std::log(xs[i])) / (std::log(xs[i + 1]) - std::log(xs[i]));
  return {i, w};
}

void require_positive(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    std::ostringstream os;
    os << "kernel evaluated at non-positive size (" << x << ", " << y << ")";
    fail(Status::Domain, os.str());
  }
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace

RadialRate RadialRate::identity() { return RadialRate{}; }

RadialRate RadialRate::power_law(double p, double s) {
  if (!(s > 0.0)) fail(Status::InvalidArgument, "power-law scale must be positive");
  RadialRate r;
  r.form = Form::PowerLaw;
  r.exponent = p;
  r.scale = s;
  return r;
}

RadialRate RadialRate::sqrt_log(double offset, double log_exponent) {
  if (!(offset > 1.0)) fail(Status::InvalidArgument, "sqrt-log offset must exceed 1");
  RadialRate r;
  r.form = Form::SqrtLog;
  r.offset = offset;
  r.log_exponent = log_exponent;
  return r;
}

RadialRate RadialRate::tabulated(std::vector<double> xs, std::vector<double> rs) {
  if (xs.size() < 2 || xs.size() != rs.size())
    fail(Status::InvalidArgument, "tabulated radial rate needs matching lists of length >= 2");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || (i > 0 && !(xs[i] > xs[i - 1])))
      fail(Status::InvalidArgument, "tabulated radial abscissae must be positive and increasing");
    if (!(rs[i] > 0.0)) fail(Status::InvalidArgument, "tabulated radial values must be positive");
  }
  RadialRate r;
  r.form = Form::Tabulated;
  r.tab_x = std::move(xs);
  r.tab_r = std::move(rs);
  return r;
}

double RadialRate::raw(double x) const {
  switch (form) {
    case Form::Identity:
      return x;
    case Form::PowerLaw:
      return scale * std::pow(x, exponent);
    case Form::SqrtLog:
      return std::sqrt(offset + x) * std::pow(std::log(offset + x), log_exponent);
    case Form::Tabulated: {
      if (x <= tab_x.front()) return tab_r.front();
      if (x >= tab_x.back()) return tab_r.back();
      auto it = std::upper_bound(tab_x.begin(), tab_x.end(), x);
      std::size_t i = static_cast<std::size_t>(it - tab_x.begin()) - 1;
      double w = (x - tab_x[i]) / (tab_x[i + 1] - tab_x[i]);
      return (1.0 - w) * tab_r[i] + w * tab_r[i + 1];
    }
  }
  return 0.0;
}

double RadialRate::operator()(double x) const {
  double v = raw(x);
  return cap ? std::min(v, *cap) : v;
}

double RadialRate::derivative(double x) const {
  if (cap && raw(x) >= *cap) return 0.0;
  switch (form) {
    case Form::Identity:
      return 1.0;
    case Form::PowerLaw:
      return scale * exponent * std::pow(x, exponent - 1.0);
    case Form::SqrtLog: {
      double u = offset + x, L = std::log(u);
      return std::pow(L, log_exponent) / (2.0 * std::sqrt(u)) +
             std::sqrt(u) * log_exponent * std::pow(L, log_exponent - 1.0) / u;
    }
    case Form::Tabulated: {
      if (x < tab_x.front() || x >= tab_x.back()) return 0.0;
      auto it = std::upper_bound(tab_x.begin(), tab_x.end(), x);
      std::size_t i = static_cast<std::size_t>(it - tab_x.begin()) - 1;
      return (tab_r[i + 1] - tab_r[i]) / (tab_x[i + 1] - tab_x[i]);
    }
  }
  return 0.0;
}

std::string RadialRate::describe() const {
  std::ostringstream os;
  switch (form) {
    case Form::Identity:
      os << "identity";
      break;
    case Form::PowerLaw:
      os << "power_law(p=" << exponent << ",scale=" << scale << ")";
      break;
    case Form::SqrtLog:
      os << "sqrt_log(offset=" << offset << ",exponent=" << log_exponent << ")";
      break;
    case Form::Tabulated:
      os << "tabulated(" << tab_x.size() << ")";
      break;
  }
  if (cap) os << "^cap" << *cap;
  return os.str();
}

Kernel Kernel::constant(double c) {
  if (!(c > 0.0)) fail(Status::InvalidArgument, "constant kernel rate must be positive");
  Kernel k;
  k.family = Family::Constant;
  k.c = c;
  return k;
}

Kernel Kernel::additive() {
  Kernel k;
  k.family = Family::Additive;
  return k;
}

Kernel Kernel::multiplicative() {
  Kernel k;
  k.family = Family::Multiplicative;
  return k;
}

Kernel Kernel::power_sum(double alpha, double beta) {
  Kernel k;
  k.family = Family::PowerSum;
  k.alpha = alpha;
  k.beta = beta;
  return k;
}

Kernel Kernel::product(RadialRate r) {
  Kernel k;
  k.family = Family::Product;
  k.r = std::move(r);
  return k;
}

Kernel Kernel::brownian() {
  Kernel k;
  k.family = Family::Brownian;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> xs, std::vector<double> values) {
  std::size_t n = xs.size();
  if (n < 2 || values.size() != n * n)
    fail(Status::InvalidArgument, "tabulated kernel needs n >= 2 abscissae and an n*n value table");
  for (std::size_t i = 0; i < n; ++i)
    if (!(xs[i] > 0.0) || (i > 0 && !(xs[i] > xs[i - 1])))
      fail(Status::InvalidArgument, "tabulated kernel abscissae must be positive and increasing");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(Status::InvalidArgument, "tabulated kernel values must be finite and non-negative");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = values[i * n + j], b = values[j * n + i];
      if (std::fabs(a - b) > 1e-12 * std::max(std::fabs(a), std::fabs(b)))
        fail(Status::InvalidArgument, "tabulated kernel table must be symmetric");
    }
  Kernel k;
  k.family = Family::Tabulated;
  k.tab_x = std::move(xs);
  k.tab_v = std::move(values);
  return k;
}

Kernel Kernel::tabulated_preset(const std::string& name, double x_min, double x_max, int n) {
  if (!(x_min > 0.0) || !(x_max > x_min) || n < 2)
    fail(Status::InvalidArgument, "tabulated preset needs 0 < x_min < x_max and n >= 2");
  auto xs = log_space(x_min, x_max, n);
  std::vector<double> v(xs.size() * xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      double a = std::cbrt(xs[i]), b = std::cbrt(xs[j]);
      double val;
      if (name == "cubic_sum")
        val = (a + b) * (a + b) * (a + b);
      else if (name == "shear_diff")
        val = (a + b) * (a + b) * std::fabs(a - b);
      else
        fail(Status::InvalidArgument, "unknown tabulated preset '" + name + "'");
      v[i * xs.size() + j] = val;
    }
  // Exact symmetry regardless of rounding in the two evaluation orders.
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) v[j * xs.size() + i] = v[i * xs.size() + j];
  return tabulated(std::move(xs), std::move(v));
}

double Kernel::eval_uncapped(double x, double y) const {
  require_positive(x, y);
  switch (family) {
    case Family::Constant:
      return c;
    case Family::Additive:
      return x + y;
    case Family::Multiplicative:
      return x * y;
    case Family::PowerSum:
      return std::pow(x, alpha) * std::pow(y, beta) + std::pow(x, beta) * std::pow(y, alpha);
    case Family::Product:
      return r(x) * r(y);
    case Family::Brownian: {
      double a = std::cbrt(x), b = std::cbrt(y);
      return (a + b) * (1.0 / a + 1.0 / b);
    }
    case Family::Tabulated: {
      // Order the arguments so that K(x,y) and K(y,x) share one code path.
      double lo = std::min(x, y), hi = std::max(x, y);
      auto [i, wi] = locate_log(tab_x, lo);
      auto [j, wj] = locate_log(tab_x, hi);
      std::size_t n = tab_x.size();
      auto at = [&](std::size_t a, std::size_t b) { return tab_v[a * n + b]; };
      return (1 - wi) * (1 - wj) * at(i, j) + wi * (1 - wj) * at(i + 1, j) +
             (1 - wi) * wj * at(i, j + 1) + wi * wj * at(i + 1, j + 1);
    }
  }
  return 0.0;
}

double Kernel::eval(double x, double y) const {
  double v = eval_uncapped(x, y);
  return cap ? std::min(v, *cap) : v;
}

std::string Kernel::name() const {
  std::ostringstream os;
  switch (family) {
    case Family::Constant:
      os << "constant(c=" << c << ")";
      break;
    case Family::Additive:
      os << "additive";
      break;
    case Family::Multiplicative:
      os << "multiplicative";
      break;
    case Family::PowerSum:
      os << "power_sum(alpha=" << alpha << ",beta=" << beta << ")";
      break;
    case Family::Product:
      os << "product(" << r.describe() << ")";
      break;
    case Family::Brownian:
      os << "brownian";
      break;
    case Family::Tabulated:
      os << "tabulated(" << tab_x.size() << "x" << tab_x.size() << ")";
      break;
  }
  if (cap) os << "^cap" << *cap;
  return os.str();
}

std::optional<RadialRate> Kernel::radial() const {
  if (cap) return std::nullopt;
  switch (family) {
    case Family::Product:
      return r;
    case Family::Multiplicative:
      return RadialRate::identity();
    case Family::Constant:
      return RadialRate::power_law(0.0, std::sqrt(c));
    case Family::PowerSum:
      if (alpha == beta) return RadialRate::power_law(alpha, std::sqrt(2.0));
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

Kernel truncate(const Kernel& k, double n, TruncationMode mode) {
  if (!(n > 0.0)) fail(Status::InvalidArgument, "truncation level must be positive");
  Kernel out = k;
  if (mode == TruncationMode::Cap) {
    if (std::isinf(n)) return out;
    out.cap = out.cap ? std::min(*out.cap, n) : n;
    return out;
  }
  if (k.family != Kernel::Family::Product)
    fail(Status::InvalidArgument, "product truncation requires a product kernel, got " + k.name());
  if (std::isinf(n)) return out;
  out.r.cap = out.r.cap ? std::min(*out.r.cap, n) : n;
  return out;
}

std::vector<std::string> GrowthClass::labels() const {
  std::vector<std::string> out;
  if (bounded_kappa0) out.push_back("Bounded");
  if (sublinear_kappa) out.push_back("SublinearFactored");
  if (linear_kappa1) out.push_back("Linear");
  if (product_r) out.push_back("ProductForm");
  if (gelling_lambda) out.push_back("Gelling");
  return out;
}

namespace {

// Numeric certification on a log-spaced square sample of [lo, hi]^2.
GrowthClass classify_numeric(const Kernel& k, double lo, double hi, int samples) {
  GrowthClass g;
  g.domain_lo = lo;
  g.domain_hi = hi;
  g.numeric = true;
  auto xs = log_space(lo, hi, std::max(samples, 64));
  std::size_t n = xs.size();
  std::vector<double> K(n * n);
  double kmax = 0.0, kmin = std::numeric_limits<double>::infinity();
  double sub = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = k.eval(xs[i], xs[j]);
      K[i * n + j] = v;
      kmax = std::max(kmax, v);
      kmin = std::min(kmin, v);
      sub = std::max(sub, v / ((1 + xs[i]) * (1 + xs[j])));
      lin = std::max(lin, v / (2 + xs[i] + xs[j]));
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = K[i * n + j], b = K[j * n + i];
      if (std::fabs(a - b) > 1e-12 * std::max({std::fabs(a), std::fabs(b), 1e-300}))
        fail(Status::InvalidArgument, "kernel " + k.name() + " is not symmetric on the sample");
    }
  // Growth exponent from the diagonal by least squares in log-log.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = K[i * n + i];
    if (d <= 0.0) continue;
    double lx = std::log(xs[i]), ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  double lambda = 0.0;
  if (m >= 2 && (m * sxx - sx * sx) > 0) lambda = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double slack = 0.05;
  if (lambda < slack) g.bounded_kappa0 = kmax;
  g.sublinear_kappa = sub;
  if (lambda <= 1.0 + slack) g.linear_kappa1 = lin;
  // omega decay: sup_x K(x,y)/y must fall between the two largest decades of y.
  double R = std::min(hi, std::max(lo, 1.0));
  double y1 = hi, y0 = std::max(lo, hi / 10.0);
  if (y1 > y0) {
    double w1 = omega_R(k, R, y1), w0 = omega_R(k, R, y0);
    g.omega_decays = w1 < w0 * (1.0 - 1e-9);
  }
  // Rank one test: K(x,y)^2 = K(x,x) K(y,y).
  bool rank1 = true;
  for (std::size_t i = 0; i < n && rank1; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double a = K[i * n + j] * K[i * n + j], b = K[i * n + i] * K[j * n + j];
      if (std::fabs(a - b) > 1e-9 * std::max(a, b)) {
        rank1 = false;
        break;
      }
    }
  if (rank1 && kmin > 0.0) {
    std::vector<double> rv(n);
    for (std::size_t i = 0; i < n; ++i) rv[i] = std::sqrt(K[i * n + i]);
    g.product_r = RadialRate::tabulated(xs, rv);
  }
  if (lambda > 1.0 + slack && lambda <= 2.0 + slack) {
    double lam = std::min(lambda, 2.0);
    double km2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        km2 = std::min(km2, K[i * n + j] / std::pow(xs[i] * xs[j], lam / 2.0));
    if (km2 > 0.0) {
      g.gelling_lambda = lam;
      g.gelling_kappa_m = std::sqrt(km2);
    }
  }
  return g;
}

GrowthClass classify_power_law_product(double p, double s, const RadialRate& r) {
  GrowthClass g;
  double s2 = s * s;
  g.product_r = r;
  g.sublinear_kappa = s2;
  g.omega_decays = p < 1.0;
  if (p == 0.0) g.bounded_kappa0 = s2;
  if (2.0 * p <= 1.0) g.linear_kappa1 = s2 * std::max(2.0 * p, 1.0 - 2.0 * p) / 2.0;
  if (2.0 * p > 1.0 && 2.0 * p <= 2.0) {
    g.gelling_lambda = 2.0 * p;
    g.gelling_kappa_m = s;
  }
  return g;
}

}  // namespace

GrowthClass classify(const Kernel& k, double lo, double hi, int samples) {
  if (!(lo > 0.0) || !(hi > lo)) fail(Status::InvalidArgument, "classification domain must satisfy 0 < lo < hi");
  if (k.cap || (k.family == Kernel::Family::Product && k.r.cap)) {
    Kernel base = k;
    base.cap.reset();
    base.r.cap.reset();
    GrowthClass g = classify(base, lo, hi, samples);
    g.gelling_lambda.reset();
    g.gelling_kappa_m.reset();
    double n = k.cap ? *k.cap : (*k.r.cap) * (*k.r.cap);
    if (k.cap && k.family == Kernel::Family::Product && k.r.cap) n = std::min(n, (*k.r.cap) * (*k.r.cap));
    g.bounded_kappa0 = g.bounded_kappa0 ? std::min(*g.bounded_kappa0, n) : n;
    g.sublinear_kappa = g.sublinear_kappa ? std::min(*g.sublinear_kappa, n) : n;
    g.linear_kappa1 = g.linear_kappa1 ? std::min(*g.linear_kappa1, n / 2.0) : n / 2.0;
    g.omega_decays = true;
    if (k.cap) g.product_r.reset();
    else if (g.product_r) g.product_r = k.r;
    return g;
  }
  GrowthClass g;
  switch (k.family) {
    case Kernel::Family::Constant:
      g = classify_power_law_product(0.0, std::sqrt(k.c), RadialRate::power_law(0.0, std::sqrt(k.c)));
      g.bounded_kappa0 = k.c;
      g.sublinear_kappa = k.c;
      g.linear_kappa1 = k.c / 2.0;
      break;
    case Kernel::Family::Additive:
      g.sublinear_kappa = 1.0;
      g.omega_decays = false;
      g.linear_kappa1 = 1.0;
      break;
    case Kernel::Family::Multiplicative:
      g = classify_power_law_product(1.0, 1.0, RadialRate::identity());
      break;
    case Kernel::Family::PowerSum: {
      double a = k.alpha, b = k.beta, lam = a + b;
      if (a < 0.0 || b < 0.0 || a > 1.0 || b > 1.0) {
        g = classify_numeric(k, lo, hi, samples);
        break;
      }
      g.sublinear_kappa = 2.0;
      g.omega_decays = std::max(a, b) < 1.0;
      if (a == 0.0 && b == 0.0) g.bounded_kappa0 = 2.0;
      if (lam <= 1.0) g.linear_kappa1 = std::max(lam, 1.0 - lam);
      if (a == b) g.product_r = RadialRate::power_law(a, std::sqrt(2.0));
      if (lam > 1.0) {
        g.gelling_lambda = lam;
        g.gelling_kappa_m = std::sqrt(2.0);
      }
      break;
    }
    case Kernel::Family::Product:
      if (k.r.form == RadialRate::Form::Identity) {
        g = classify_power_law_product(1.0, 1.0, k.r);
      } else if (k.r.form == RadialRate::Form::PowerLaw && k.r.exponent >= 0.0 && k.r.exponent <= 1.0) {
        g = classify_power_law_product(k.r.exponent, k.r.scale, k.r);
      } else {
        g = classify_numeric(k, lo, hi, samples);
        g.product_r = k.r;
      }
      break;
    case Kernel::Family::Brownian: {
      double m = std::pow(lo, -1.0 / 3.0);
      g.sublinear_kappa = 2.0 + std::pow(2.0, 5.0 / 3.0) / 3.0 * m;
      g.linear_kappa1 = 1.0 + 2.0 / 3.0 * m;
      g.omega_decays = true;
      break;
    }
    case Kernel::Family::Tabulated:
      g = classify_numeric(k, lo, hi, samples);
      break;
  }
  g.domain_lo = lo;
  g.domain_hi = hi;
  return g;
}

double omega_R(const Kernel& k, double R, double y) {
  if (!(R > 0.0) || !(y > 0.0)) fail(Status::Domain, "omega_R requires R > 0 and y > 0");
  if (!k.cap) {
    switch (k.family) {
      case Kernel::Family::Constant:
        return k.c / y;
      case Kernel::Family::Additive:
        return (R + y) / y;
      case Kernel::Family::Multiplicative:
        return R;
      case Kernel::Family::PowerSum:
        if (k.alpha >= 0.0 && k.beta >= 0.0)
          return (std::pow(R, k.alpha) * std::pow(y, k.beta) + std::pow(R, k.beta) * std::pow(y, k.alpha)) / y;
        break;
      case Kernel::Family::Product:
        if (!k.r.cap && (k.r.form == RadialRate::Form::Identity ||
                         (k.r.form == RadialRate::Form::PowerLaw && k.r.exponent >= 0.0)))
          return k.r(R) * k.r(y) / y;
        break;
      default:
        break;
    }
  }
  // Brownian and the rest: 256 log-spaced samples over (R*1e-6, R]; for Brownian the
  // supremum over all of (0,R) is infinite, so the sample's lower end is the domain.
  auto xs = log_space(R * 1e-6, R, 256);
  double best = 0.0;
  for (double x : xs) {
    double v;
    try {
      v = k.eval(x, y);
    } catch (const Error&) {
      continue;
    }
    best = std::max(best, v / y);
  }
  return best;
}

std::optional<std::vector<SeparableTerm>> separable_terms(const Kernel& k, const std::vector<double>& x) {
  if (k.cap) return std::nullopt;
  std::size_t n = x.size();
  auto powv = [&](double p) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (p == 0.0) ? 1.0 : (p == 1.0 ? x[i] : std::pow(x[i], p));
    return v;
  };
  std::vector<SeparableTerm> t;
  switch (k.family) {
    case Kernel::Family::Constant:
      t.push_back({k.c, powv(0), powv(0), false});
      break;
    case Kernel::Family::Additive:
      t.push_back({1.0, powv(1), powv(0), true});
      break;
    case Kernel::Family::Multiplicative:
      t.push_back({1.0, powv(1), powv(1), false});
      break;
    case Kernel::Family::PowerSum:
      if (k.alpha == k.beta)
        t.push_back({2.0, powv(k.alpha), powv(k.alpha), false});
      else
        t.push_back({1.0, powv(k.alpha), powv(k.beta), true});
      break;
    case Kernel::Family::Product: {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = k.r(x[i]);
      t.push_back({1.0, r, r, false});
      break;
    }
    case Kernel::Family::Brownian:
      t.push_back({2.0, powv(0), powv(0), false});
      t.push_back({1.0, powv(1.0 / 3.0), powv(-1.0 / 3.0), true});
      break;
    case Kernel::Family::Tabulated:
      return std::nullopt;
  }
  return t;
}

}  // namespace coag
