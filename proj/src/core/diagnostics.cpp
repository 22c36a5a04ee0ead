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

#include "diagnostics.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace coag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Kernel uncapped(const Kernel& k) {
  Kernel b = k;
  b.cap.reset();
  b.r.cap.reset();
  return b;
}

std::pair<double, double> grid_span(const Trajectory& tr) {
  if (tr.snapshots.empty()) fail(Status::InvalidArgument, "trajectory has no snapshots");
  const auto& g = *tr.snapshots.front().grid;
  return {g.pivots.front(), std::max(g.pivots.back(), 2.0 * g.pivots.front())};
}

GrowthClass classify_on(const Kernel& k, const Trajectory& tr) {
  auto [lo, hi] = grid_span(tr);
  return classify(uncapped(k), lo, hi);
}

double l1_diff(const SizeDistribution& a, const SizeDistribution& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a.density[i] - b.density[i]) * a.grid->widths[i];
  return s;
}

}  // namespace

void MarginSeries::add(double t, double l, double r, bool counted) {
  times.push_back(t);
  lhs.push_back(l);
  rhs.push_back(r);
  double scale = std::max({std::fabs(l), std::fabs(r), 1e-300});
  double m = (r - l) / scale;
  if (std::isnan(m)) m = -kInf;
  if (m < -slack) ++violations;
  if (!counted) return;
  if (evaluated == 0 || m < min_margin) min_margin = m;
  ++evaluated;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

// ---- weak form -------------------------------------------------------------

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::Identity:
      return x;
    case Kind::MinWithA:
      return std::min(x, A);
    case Kind::Tabulated: {
      if (tab_x.empty()) return 0.0;
      if (x <= tab_x.front()) return tab_v.front();
      if (x >= tab_x.back()) return tab_v.back();
      auto it = std::upper_bound(tab_x.begin(), tab_x.end(), x);
      std::size_t j = static_cast<std::size_t>(it - tab_x.begin());
      double w = (x - tab_x[j - 1]) / (tab_x[j] - tab_x[j - 1]);
      return (1.0 - w) * tab_v[j - 1] + w * tab_v[j];
    }
  }
  return 0.0;
}

std::string TestFunction::describe() const {
  switch (kind) {
    case Kind::One:
      return "one";
    case Kind::Identity:
      return "identity";
    case Kind::MinWithA: {
      std::ostringstream os;
      os << "min_with_A(" << A << ")";
      return os.str();
    }
    case Kind::Tabulated:
      return "tabulated";
  }
  return "?";
}

double theta_rate(const SizeDistribution& d, const Kernel& k, const TestFunction& theta, Boundary b) {
  RateSplit s = rates(d, k, b);
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) r += theta(d.grid->pivots[i]) * (s.gain[i] - s.loss[i]);
  return r;
}

WeakFormResidual weak_form_residual(const Trajectory& traj, const Kernel& kernel, const TestFunction& theta) {
  if (theta.kind == TestFunction::Kind::Tabulated && theta.tab_x.size() != theta.tab_v.size())
    fail(Status::InvalidArgument, "tabulated test function needs matching x and value lists");
  WeakFormResidual out;
  out.theta = theta;
  std::vector<double> q, rate;
  for (const auto& s : traj.snapshots) {
    double v = 0.0;
    auto n = s.numbers();
    for (std::size_t i = 0; i < n.size(); ++i) v += theta(s.grid->pivots[i]) * n[i];
    q.push_back(v);
    rate.push_back(theta_rate(s, kernel, theta, traj.boundary));
  }
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    double t0 = traj.snapshots[k - 1].time, t1 = traj.snapshots[k].time;
    double pred = 0.5 * (t1 - t0) * (rate[k] + rate[k - 1]);
    out.t0.push_back(t0);
    out.t1.push_back(t1);
    out.change.push_back(q[k] - q[k - 1]);
    out.predicted.push_back(pred);
    out.residual.push_back(q[k] - q[k - 1] - pred);
    out.max_abs = std::max(out.max_abs, std::fabs(out.residual.back()));
  }
  return out;
}

FluxSplit flux_decomposition(const SizeDistribution& d, const Kernel& k, double A) {
  const SizeGrid& g = *d.grid;
  if (!(A > 0.0) || A < g.edges.front() || A > g.edges.back())
    fail(Status::Domain, "flux decomposition level A must lie within the grid span");
  auto n = d.numbers();
  const std::size_t N = n.size();
  FluxSplit f;
  for (std::size_t i = 0; i < N; ++i) {
    if (n[i] == 0.0) continue;
    const double x = g.pivots[i];
    for (std::size_t j = 0; j < N; ++j) {
      if (n[j] == 0.0) continue;
      const double y = g.pivots[j];
      const double w = k.eval(x, y) * n[i] * n[j];
      if (x <= A && y <= A) {
        if (x + y > A) f.I1 += 0.5 * (x + y - A) * w;
      } else if (x <= A && y > A) {
        f.I2 += x * w;
      } else if (x > A && y > A) {
        f.I3 += 0.5 * A * w;
      }
      double th = std::min(x + y, A) - std::min(x, A) - std::min(y, A);
      f.theta_rate += 0.5 * th * w;
    }
  }
  return f;
}

// ---- bound monitors --------------------------------------------------------

std::string bound_name(BoundKind b) {
  switch (b) {
    case BoundKind::PhiGronwall:
      return "phi_gronwall";
    case BoundKind::PsiMoment:
      return "psi_moment";
    case BoundKind::ProductL2:
      return "product_l2";
    case BoundKind::EquiContinuity:
      return "equicontinuity";
  }
  return "?";
}

bool BoundReport::pass() const {
  for (const auto& s : series)
    if (!s.pass()) return false;
  return true;
}

double BoundReport::min_margin() const {
  double m = kInf;
  for (const auto& s : series)
    if (s.evaluated) m = std::min(m, s.min_margin);
  return m;
}

BoundReport bound_monitor(const Trajectory& traj, const Kernel& kernel, BoundKind which, const BoundParams& p) {
  if (traj.snapshots.empty()) fail(Status::InvalidArgument, "trajectory has no snapshots");
  GrowthClass gc = classify_on(kernel, traj);
  const auto& f0 = traj.snapshots.front();
  const double M0 = moment(f0, 0.0), M1 = moment(f0, 1.0);
  BoundReport rep;
  rep.kind = which;
  switch (which) {
    case BoundKind::PhiGronwall: {
      if (!gc.sublinear_kappa)
        fail(Status::Unsupported, "the Phi-integral Gronwall bound needs K <= kappa (1+x)(1+y)");
      rep.constant = 2.0 * *gc.sublinear_kappa * (1.0 + p.R) * (1.0 + p.R) * M0;
      MarginSeries s{"phi_integral_gronwall"};
      double base = phi_integral(p.phi, f0, p.R);
      for (const auto& d : traj.snapshots)
        s.add(d.time, phi_integral(p.phi, d, p.R), base * std::exp(rep.constant * d.time), d.time > 0.0);
      rep.series.push_back(std::move(s));
      break;
    }
    case BoundKind::PsiMoment: {
      if (!gc.linear_kappa1) fail(Status::Unsupported, "the psi-moment bound needs K <= kappa1 (2+x+y)");
      rep.constant = 2.0 * *gc.linear_kappa1 * (M0 + M1);
      MarginSeries s{"psi_moment_gronwall"};
      auto psi = [](const SizeDistribution& d) {
        auto n = d.numbers();
        double v = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) {
          double a = 1.0 + d.grid->pivots[i];
          v += a * a * n[i];
        }
        return v;
      };
      double base = psi(f0);
      for (const auto& d : traj.snapshots) s.add(d.time, psi(d), base * std::exp(rep.constant * d.time), d.time > 0.0);
      rep.series.push_back(std::move(s));
      break;
    }
    case BoundKind::ProductL2: {
      auto r = uncapped(kernel).radial();
      if (!r || !gc.product_r) fail(Status::Unsupported, "the L2 product bounds need K = r(x) r(y)");
      if (p.radial_cap) r->cap = *p.radial_cap;
      if (!(p.A > 0.0)) fail(Status::Domain, "tail level A must be positive");
      std::vector<double> t, full, tail;
      for (const auto& d : traj.snapshots) {
        auto n = d.numbers();
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i) {
          double x = d.grid->pivots[i], v = (*r)(x) * n[i];
          a += v;
          if (x >= p.A) b += v;
        }
        t.push_back(d.time);
        full.push_back(a * a);
        tail.push_back(b * b);
      }
      auto cf = cumulative_trapezoid(t, full), ct = cumulative_trapezoid(t, tail);
      rep.constant = 2.0 * M0;
      MarginSeries s1{"radial_l2_full"}, s2{"radial_l2_tail"};
      s2.note = "A = " + std::to_string(p.A);
      for (std::size_t i = 0; i < t.size(); ++i) {
        s1.add(t[i], cf[i], 2.0 * M0, t[i] > 0.0);
        s2.add(t[i], ct[i], 2.0 * M1 / p.A, t[i] > 0.0);
      }
      rep.series.push_back(std::move(s1));
      rep.series.push_back(std::move(s2));
      break;
    }
    case BoundKind::EquiContinuity: {
      const double norm11 = M0 + M1;
      MarginSeries s{"time_equicontinuity"};
      std::function<double(double)> bound;
      if (gc.sublinear_kappa) {
        rep.constant = 1.5 * *gc.sublinear_kappa * norm11 * norm11;
        double c = rep.constant;
        bound = [c](double dt) { return c * dt; };
        s.note = "Lipschitz";
      } else if (auto r = uncapped(kernel).radial(); r && gc.product_r) {
        if (p.radial_cap) r->cap = *p.radial_cap;
        double mR = 0.0;
        const auto& g = *f0.grid;
        for (double x : g.pivots)
          if (x < p.R) mR = std::max(mR, (*r)(x) / (1.0 + x));
        for (int i = 0; i <= 1000; ++i) {
          double x = p.R * i / 1000.0;
          if (x > 0.0 && x < p.R) mR = std::max(mR, (*r)(x) / (1.0 + x));
        }
        double c = std::pow(2.0 * norm11, 1.5) * mR, tail = 2.0 * M1 / p.R;
        rep.constant = c;
        bound = [c, tail](double dt) { return c * std::sqrt(dt) + tail; };
        s.note = "square-root modulus with R = " + std::to_string(p.R);
      } else {
        fail(Status::Unsupported, "equicontinuity needs a sublinear or product kernel");
      }
      const auto& sn = traj.snapshots;
      for (std::size_t k = 1; k < sn.size(); ++k) {
        s.add(sn[k].time, l1_diff(sn[k], sn[k - 1]), bound(sn[k].time - sn[k - 1].time));
        if (k > 1) s.add(sn[k].time, l1_diff(sn[k], sn[0]), bound(sn[k].time - sn[0].time));
      }
      rep.series.push_back(std::move(s));
      break;
    }
  }
  return rep;
}

// ---- comparison ODE --------------------------------------------------------

ComparisonReport comparison_ode(const Trajectory& traj, const RadialRate& r) {
  if (traj.snapshots.empty()) fail(Status::InvalidArgument, "trajectory has no snapshots");
  // Concavity and positivity on log samples.
  std::vector<double> xs;
  for (int i = 0; i <= 240; ++i) xs.push_back(std::pow(10.0, -3.0 + 9.0 * i / 240.0));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(r(xs[i]) > 0.0)) fail(Status::Domain, "comparison ODE needs a positive radial rate");
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    double w = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
    double chord = (1.0 - w) * r(xs[i - 1]) + w * r(xs[i + 1]);
    if (r(xs[i]) < chord * (1.0 - 1e-10)) fail(Status::Domain, "comparison ODE needs a concave radial rate");
  }
  ComparisonReport rep;
  {
    boost::math::quadrature::tanh_sinh<double> q;
    const double L = std::log(1e6);
    rep.divergence_integral = q.integrate(
        [&](double s) {
          double x = std::exp(s), v = r(x);
          return x / (v * v);
        },
        0.0, L);
    auto h = [&](double x) {
      double v = r(x);
      return x * std::log(x) / (v * v);
    };
    rep.hypothesis_ok = h(1e6) >= h(1e5) * (1.0 - 1e-3);
    if (!rep.hypothesis_ok)
      fail(Status::Domain, "int_1^inf dx / r(x)^2 does not diverge on [1, 1e6]; the comparison ODE may blow up");
  }
  const double M1 = traj.moments.m1.front();
  double Y = traj.moments.m2.front();
  rep.margin.name = "second_moment_comparison";
  auto rhs = [&](double y) {
    if (M1 <= 0.0) return 0.0;
    double v = r(std::max(y, 0.0) / M1);
    return M1 * M1 * v * v;
  };
  double t = traj.moments.times.front();
  for (std::size_t k = 0; k < traj.moments.size(); ++k) {
    double target = traj.moments.times[k];
    while (!rep.blowup_time && t < target) {
      double f = rhs(Y);
      double h = target - t;
      if (f > 0.0 && Y > 0.0) h = std::min(h, 0.01 * Y / f);
      if (M1 > 0.0 && Y <= 0.0) h = std::min(h, 1e-3);
      double k1 = rhs(Y), k2 = rhs(Y + 0.5 * h * k1), k3 = rhs(Y + 0.5 * h * k2), k4 = rhs(Y + h * k3);
      Y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = (h == target - t) ? target : t + h;
      if (!std::isfinite(Y) || Y > 1e150) rep.blowup_time = t;
    }
    double y = rep.blowup_time ? kInf : Y;
    rep.times.push_back(target);
    rep.Y.push_back(y);
    rep.M2.push_back(traj.moments.m2[k]);
    rep.margin.add(target, traj.moments.m2[k], y, target > traj.moments.times.front());
  }
  if (rep.blowup_time) rep.note = "comparison solution blew up at t = " + std::to_string(*rep.blowup_time);
  return rep;
}

// ---- gelation --------------------------------------------------------------

namespace {

bool ratio_admissible(const RadialRate& r, std::string* why) {
  if (r.cap) {
    *why = "a capped radial rate makes int dA / (r(A) sqrt(A)) diverge";
    return false;
  }
  switch (r.form) {
    case RadialRate::Form::Identity:
      return true;
    case RadialRate::Form::PowerLaw:
      if (r.exponent > 0.5 && r.exponent <= 1.0) return true;
      *why = "ratio-shifted xi needs a radial exponent in (1/2, 1]";
      return false;
    case RadialRate::Form::SqrtLog:
      if (r.log_exponent > 1.0) return true;
      *why = "ratio-shifted xi needs a log exponent above 1";
      return false;
    case RadialRate::Form::Tabulated:
      *why = "a tabulated radial rate is constant beyond its table";
      return false;
  }
  return false;
}

}  // namespace

double xi_eval(const XiChoice& xi, const RadialRate& r, double x) {
  if (xi.kind == XiChoice::Kind::PowerShifted) {
    if (x <= 1.0) return 0.0;
    return xi.exponent == 0.0 ? 1.0 : std::pow(x - 1.0, xi.exponent);
  }
  return std::max(0.0, x / r(x) - 1.0 / r(1.0));
}

double xi_integral(const XiChoice& xi, const RadialRate& r) {
  if (xi.kind == XiChoice::Kind::PowerShifted) {
    const double e = xi.exponent;
    // Step function at A = 1: the point mass gives I = 1.
    if (e == 0.0) return 1.0;
    if (!(e > 0.0 && e < 0.5)) {
      std::ostringstream os;
      os << "xi exponent " << e << " gives a divergent I_xi (needs 0 < e < 1/2)";
      fail(Status::Domain, os.str());
    }
    // A = 1 + u^{1/e} removes the endpoint singularity: I = int_0^inf (1 + u^{1/e})^{-1/2} du.
    boost::math::quadrature::exp_sinh<double> q;
    double err = 0.0;
    double v = q.integrate([e](double u) { return 1.0 / std::sqrt(1.0 + std::pow(u, 1.0 / e)); }, 0.0, kInf,
                           std::sqrt(std::numeric_limits<double>::epsilon()), &err);
    if (!std::isfinite(v)) fail(Status::Numerical, "I_xi quadrature failed");
    return v;
  }
  std::string why;
  if (!ratio_admissible(r, &why)) fail(Status::Domain, why);
  boost::math::quadrature::exp_sinh<double> q;
  double v = q.integrate([&r](double s) { return 1.0 / (r(1.0 + s) * std::sqrt(1.0 + s)); }, 0.0, kInf);
  if (!std::isfinite(v)) fail(Status::Numerical, "I_xi quadrature failed");
  return -1.0 / r(1.0) + 0.5 * v;
}

GelationReport gelation_functional(const Trajectory& traj, const RadialRate& r, const XiChoice& xi) {
  if (traj.snapshots.empty()) fail(Status::InvalidArgument, "trajectory has no snapshots");
  GelationReport rep;
  rep.method = xi.kind == XiChoice::Kind::PowerShifted ? "power_shifted" : "ratio_shifted";
  rep.I_xi = xi_integral(xi, r);
  if (xi.kind == XiChoice::Kind::PowerShifted && xi.exponent == 0.0)
    rep.note = "I_xi = 1 by the point-mass convention for the step function";
  const double M1 = traj.moments.m1.front();
  rep.bound = 2.0 * rep.I_xi * rep.I_xi * M1;
  std::vector<double> t, sq;
  const auto& g = *traj.snapshots.front().grid;
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = r(g.pivots[i]) * xi_eval(xi, r, g.pivots[i]);
  for (const auto& d : traj.snapshots) {
    auto n = d.numbers();
    double s = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) s += w[i] * n[i];
    t.push_back(d.time);
    sq.push_back(s * s);
  }
  rep.times = t;
  rep.functional_values = cumulative_trapezoid(t, sq);
  rep.margin.name = "xi_functional_bound";
  for (std::size_t i = 0; i < t.size(); ++i) rep.margin.add(t[i], rep.functional_values[i], rep.bound);
  return rep;
}

std::optional<double> t_gel_upper_bound(const Kernel& kernel, double m0, double m1, double lo, double hi) {
  if (!(m1 > 0.0)) return std::nullopt;
  GrowthClass gc = classify(uncapped(kernel), lo, hi);
  if (!gc.gelling_lambda || !gc.gelling_kappa_m) return std::nullopt;
  const double lam = *gc.gelling_lambda, km = *gc.gelling_kappa_m;
  if (!(lam > 1.0 && lam <= 2.0)) return std::nullopt;
  double I = xi_integral(XiChoice::power_shifted((2.0 - lam) / 2.0), RadialRate::identity());
  double l2 = std::pow(2.0, 4.0 - lam) * (m0 + I * I * m1) / (km * km);
  return l2 / (m1 * m1);
}

namespace {

double interp(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x <= t.front()) return y.front();
  if (x >= t.back()) return y.back();
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t j = static_cast<std::size_t>(it - t.begin());
  double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
  return (1.0 - w) * y[j - 1] + w * y[j];
}

// Least-squares slope and intercept.
std::pair<double, double> linfit(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {b, (sy - b * sx) / n};
}

}  // namespace

GelationReport gelation_detect(const Trajectory& traj, const Kernel& kernel, const DetectPolicy& policy,
                               const Trajectory* baseline) {
  GelationReport rep;
  const auto& ms = traj.moments;
  if (ms.size() == 0) fail(Status::InvalidArgument, "trajectory has no moments");
  rep.times = ms.times;
  auto [lo, hi] = grid_span(traj);
  try {
    rep.t_gel_upper_bound = t_gel_upper_bound(kernel, ms.m0.front(), ms.m1.front(), lo, hi);
  } catch (const Error&) {
  }
  if (policy.kind == DetectPolicy::Kind::MassDrop) {
    rep.method = "mass_drop";
    if (!(policy.threshold > 0.0)) fail(Status::Domain, "mass-drop threshold must be positive");
    const double M10 = ms.m1.front();
    for (std::size_t k = 0; k < ms.size(); ++k) {
      double drift = 0.0;
      if (baseline && baseline->moments.size() > 0)
        drift = baseline->moments.m1.front() - interp(baseline->moments.times, baseline->moments.m1, ms.times[k]);
      double loss = M10 - ms.m1[k] - drift;
      rep.functional_values.push_back(loss / M10);
      if (!rep.t_gel_detected && loss > policy.threshold * M10) {
        if (k == 0) {
          rep.t_gel_detected = ms.times[0];
        } else {
          double a = rep.functional_values[k - 1], b = rep.functional_values[k];
          double w = (policy.threshold - a) / (b - a);
          rep.t_gel_detected = ms.times[k - 1] + std::clamp(w, 0.0, 1.0) * (ms.times[k] - ms.times[k - 1]);
        }
      }
    }
    if (!rep.t_gel_detected) rep.note = "no mass loss above threshold";
    return rep;
  }

  rep.method = "m2_extrapolation";
  std::vector<double> t, u;
  for (std::size_t k = 0; k < ms.size(); ++k)
    if (ms.m2[k] > 0.0 && std::isfinite(ms.m2[k])) {
      t.push_back(ms.times[k]);
      u.push_back(1.0 / ms.m2[k]);
    }
  rep.functional_values = u;
  if (t.size() < 4) {
    rep.note = "too few snapshots for extrapolation";
    return rep;
  }
  std::size_t kmin = static_cast<std::size_t>(std::min_element(u.begin(), u.end()) - u.begin());
  std::size_t w = std::min<std::size_t>(5, kmin + 1);
  if (w < 4) {
    rep.note = "second moment peaks too early to extrapolate";
    return rep;
  }
  std::vector<double> wt(t.begin() + static_cast<std::ptrdiff_t>(kmin + 1 - w), t.begin() + static_cast<std::ptrdiff_t>(kmin + 1));
  std::vector<double> wu(u.begin() + static_cast<std::ptrdiff_t>(kmin + 1 - w), u.begin() + static_cast<std::ptrdiff_t>(kmin + 1));
  // Local blow-up estimates T = t - u/u' should be stationary for a finite-time singularity.
  std::vector<double> et, eT;
  for (std::size_t j = 1; j + 1 < w; ++j) {
    double h0 = wt[j] - wt[j - 1], h1 = wt[j + 1] - wt[j];
    double du = (-h1 / (h0 * (h0 + h1))) * wu[j - 1] + ((h1 - h0) / (h0 * h1)) * wu[j] +
                (h0 / (h1 * (h0 + h1))) * wu[j + 1];
    if (!(du < 0.0)) {
      rep.note = "1/M2 is not decreasing near its minimum";
      return rep;
    }
    et.push_back(wt[j]);
    eT.push_back(wt[j] - wu[j] / du);
  }
  double slope = linfit(et, eT).first;
  if (std::fabs(slope) > 0.5) {
    std::ostringstream os;
    os << "second-moment growth is not a finite-time blow-up (drift of the local estimate " << slope << ")";
    rep.note = os.str();
    return rep;
  }
  auto [b, a] = linfit(wt, wu);
  if (!(b < 0.0)) {
    rep.note = "1/M2 fit is not decreasing";
    return rep;
  }
  rep.t_gel_detected = -a / b;
  return rep;
}

// ---- uniqueness ------------------------------------------------------------

double weighted_l1_distance(const SizeDistribution& a, const SizeDistribution& b, double scale, double power) {
  auto na = a.numbers(), nb = b.numbers();
  double s = 0.0;
  for (std::size_t i = 0; i < na.size(); ++i) s += std::fabs(na[i] - nb[i]) * scale * std::pow(a.grid->pivots[i], power);
  return s;
}

double cdf_distance(const SizeDistribution& a, const SizeDistribution& b, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) fail(Status::Domain, "CDF distance weight exponent must lie in (0, 1]");
  if (!a.grid->same_as(*b.grid)) fail(Status::InvalidArgument, "distributions live on different grids");
  auto na = a.numbers(), nb = b.numbers();
  const auto& p = a.grid->pivots;
  // E is constant on (p_{k-1}, p_k] with value sum_{i >= k} (na - nb); p_{-1} = 0.
  double E = 0.0, s = 0.0;
  for (std::size_t k = na.size(); k-- > 0;) {
    E += na[k] - nb[k];
    double left = k == 0 ? 0.0 : std::pow(p[k - 1], lambda);
    s += std::fabs(E) * (std::pow(p[k], lambda) - left) / lambda;
  }
  return s;
}

double uniqueness_c5(const Kernel& k, double lambda) {
  if (k.cap) fail(Status::Unsupported, "the CDF envelope constant is derived for uncapped kernels");
  switch (k.family) {
    case Kernel::Family::Constant:
      if (!(lambda > 0.0 && lambda <= 1.0)) fail(Status::Domain, "lambda must lie in (0, 1]");
      return 0.0;
    case Kernel::Family::Additive:
    case Kernel::Family::PowerSum: {
      double a = k.family == Kernel::Family::Additive ? 1.0 : k.alpha;
      double b = k.family == Kernel::Family::Additive ? 0.0 : k.beta;
      if (a < 0.0 || b < 0.0 || !(a + b > 0.0 && a + b <= 1.0))
        fail(Status::Unsupported, "the CDF envelope needs alpha, beta >= 0 with homogeneity in (0, 1]");
      if (std::fabs(lambda - (a + b)) > 1e-12)
        fail(Status::Domain, "the CDF weight exponent must equal the kernel homogeneity");
      return 2.0;
    }
    default:
      fail(Status::Unsupported, "no derived CDF envelope constant for kernel " + k.name());
  }
}

UniquenessReport uniqueness_distance(const Trajectory& f1, const Trajectory& f2, const Kernel& kernel,
                                     const DistanceKind& kind) {
  if (f1.snapshots.empty() || f1.snapshots.size() != f2.snapshots.size())
    fail(Status::InvalidArgument, "trajectories need the same snapshot count");
  if (!f1.snapshots.front().grid->same_as(*f2.snapshots.front().grid))
    fail(Status::InvalidArgument, "trajectories live on different grids");
  const double tmax = std::max(1.0, f1.snapshots.back().time);
  for (std::size_t k = 0; k < f1.snapshots.size(); ++k)
    if (std::fabs(f1.snapshots[k].time - f2.snapshots[k].time) > 1e-12 * tmax)
      fail(Status::InvalidArgument, "trajectories need matching snapshot times");

  UniquenessReport rep;
  rep.kind = kind;
  const auto& g = *f1.snapshots.front().grid;
  const std::size_t N = g.size();
  if (kind.kind == DistanceKind::Kind::WeightedL1) {
    rep.margin.name = "weighted_l1_envelope";
    if (!(kind.scale > 0.0) || kind.power < 0.0 || kind.power > 1.0)
      fail(Status::Domain, "phi = scale x^p needs scale > 0 and p in [0, 1] for subadditivity");
    auto phi = [&](double x) { return kind.scale * std::pow(x, kind.power); };
    std::size_t stride = std::max<std::size_t>(1, N / 512);
    for (std::size_t i = 0; i < N; i += stride)
      for (std::size_t j = i; j < N; j += stride) {
        double x = g.pivots[i], y = g.pivots[j];
        if (kernel.eval(x, y) > phi(x) * phi(y) * (1.0 + 1e-12))
          fail(Status::Unsupported, "K(x,y) <= phi(x) phi(y) fails on the grid");
      }
    for (std::size_t k = 0; k < f1.snapshots.size(); ++k) {
      const auto &a = f1.snapshots[k], &b = f2.snapshots[k];
      auto na = a.numbers(), nb = b.numbers();
      double r = 0.0;
      for (std::size_t i = 0; i < N; ++i) r += phi(g.pivots[i]) * phi(g.pivots[i]) * (na[i] + nb[i]);
      rep.times.push_back(a.time);
      rep.d.push_back(weighted_l1_distance(a, b, kind.scale, kind.power));
      rep.rate.push_back(r);
    }
  } else {
    rep.margin.name = "cdf_weighted_envelope";
    rep.C5 = uniqueness_c5(kernel, kind.lambda);
    for (std::size_t k = 0; k < f1.snapshots.size(); ++k) {
      const auto &a = f1.snapshots[k], &b = f2.snapshots[k];
      auto na = a.numbers(), nb = b.numbers();
      double m = 0.0;
      for (std::size_t i = 0; i < N; ++i) m += std::pow(g.pivots[i], kind.lambda) * (na[i] + nb[i]);
      rep.times.push_back(a.time);
      rep.d.push_back(cdf_distance(a, b, kind.lambda));
      rep.rate.push_back(0.5 * rep.C5 * m);
    }
    if (rep.C5 == 0.0) rep.note = "constant kernel: d_x K = 0, envelope is d(0)";
  }
  auto integ = cumulative_trapezoid(rep.times, rep.rate);
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    rep.envelope.push_back(rep.d.front() * std::exp(integ[k]));
    rep.margin.add(rep.times[k], rep.d[k], rep.envelope[k], k > 0);
  }
  return rep;
}

std::optional<std::string> snapshot_warning(const SolverConfig& cfg) {
  bool gelling = false;
  try {
    gelling = classify(uncapped(cfg.kernel), 1.0, 1e6).gelling_lambda.has_value();
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!gelling) return std::nullopt;
  auto s = snapshot_schedule(cfg);
  if (s.size() >= 16) return std::nullopt;
  std::ostringstream os;
  os << "gelling kernel with only " << s.size()
     << " snapshots; gelation detection and functional quadrature need a denser schedule";
  return os.str();
}

}  // namespace coag
