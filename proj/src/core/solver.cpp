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

#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "error.hpp"
#include "fast_gain.hpp"

namespace coag {

std::string flag_name(TrajectoryFlag f) {
  switch (f) {
    case TrajectoryFlag::None:
      return "none";
    case TrajectoryFlag::StepUnderflow:
      return "step_underflow";
    case TrajectoryFlag::StepBudget:
      return "step_budget";
    case TrajectoryFlag::GelationStiffness:
      return "gelation_stiffness";
  }
  return "unknown";
}

double default_cap(const Kernel& k, const SizeGrid& g) {
  Kernel base = k;
  base.cap.reset();
  double m = 0.0;
  std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    m = std::max(m, base.eval(g.pivots[i], g.pivots[i]));
    m = std::max(m, base.eval(g.pivots[0], g.pivots[i]));
    m = std::max(m, base.eval(g.pivots[n - 1], g.pivots[i]));
  }
  return m;
}

namespace {

// Right-hand side on the state (numbers per cell, gel mass, suppressed mass).
class RhsEngine {
 public:
  RhsEngine(GridPtr grid, const Kernel& k, Boundary b, GainPath path)
      : grid_(std::move(grid)), k_(k), b_(b), n_(grid_->size()) {
    const SizeGrid& g = *grid_;
    discrete_ = g.kind == SizeGrid::Kind::DiscreteInteger;
    if (path != GainPath::Direct && discrete_) {
      Kernel probe = k_;
      bool cap_inactive = !probe.cap || *probe.cap >= default_cap(probe, g);
      if (cap_inactive) {
        probe.cap.reset();
        terms_ = separable_terms(probe, g.pivots);
      }
      if (terms_ && (path == GainPath::Fast || n_ >= 512)) {
        conv_ = std::make_unique<Convolver>(n_);
        a_.resize(n_);
        b_buf_.resize(n_);
        conv_out_.resize(2 * n_ - 1);
        pu_.resize(n_);
        pv_.resize(n_);
      } else {
        terms_.reset();
      }
    }
    if (path == GainPath::Fast && !conv_)
      fail(Status::Unsupported, "fast gain path needs a discrete grid and a separable kernel, got " + k_.name());
    if (!conv_ && n_ <= 2048) {
      kmat_.resize(n_ * (n_ + 1) / 2);
      if (!discrete_) {
        dest_.resize(kmat_.size());
        frac_.resize(kmat_.size());
      }
      std::size_t idx = 0;
      for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t q = j; q < n_; ++q, ++idx) {
          kmat_[idx] = k_.eval(g.pivots[j], g.pivots[q]);
          if (!discrete_) locate(g.pivots[j] + g.pivots[q], dest_[idx], frac_[idx]);
        }
    }
    gain_.resize(n_);
    lf_.resize(n_);
  }

  bool fast() const { return conv_ != nullptr; }

  // Upper estimate of the largest loss rate sum_k K(x_j, x_k) |n_k| over the end cells,
  // which bounds the stiff part of the spectrum for the families in use.
  double stiffness(const double* y) const {
    const auto& x = grid_->pivots;
    double lo = 0.0, hi = 0.0;
    for (std::size_t q = 0; q < n_; ++q) {
      double a = std::fabs(y[q]);
      if (a == 0.0) continue;
      lo += k_.eval(x[0], x[q]) * a;
      hi += k_.eval(x[n_ - 1], x[q]) * a;
    }
    return std::max(lo, hi);
  }
  std::size_t size() const { return n_; }

  void eval(const double* y, double* dy, RateSplit* split = nullptr) {
    if (conv_)
      eval_fast(y);
    else
      eval_direct(y, split != nullptr);
    for (std::size_t i = 0; i < n_; ++i) dy[i] = std::max(gain_[i], 0.0) - y[i] * lf_[i];
    dy[n_] = b_ == Boundary::Absorbing ? over_ : 0.0;
    dy[n_ + 1] = b_ == Boundary::Conservative ? over_ : 0.0;
    if (split) {
      split->gain = gain_;
      split->loss_factor = lf_;
      split->loss.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) split->loss[i] = y[i] * lf_[i];
      split->gel_rate = dy[n_];
      split->suppressed_rate = dy[n_ + 1];
    }
  }

 private:
  void locate(double v, std::int32_t& dest, double& frac) const {
    const auto& p = grid_->pivots;
    if (v > p.back()) {
      dest = -1;
      frac = 0.0;
      return;
    }
    auto it = std::lower_bound(p.begin(), p.end(), v);
    std::size_t j = static_cast<std::size_t>(it - p.begin());
    if (p[j] == v || j == 0) {
      dest = static_cast<std::int32_t>(j);
      frac = 1.0;
      return;
    }
    dest = static_cast<std::int32_t>(j - 1);
    frac = (p[j] - v) / (p[j] - p[j - 1]);
  }

  void eval_direct(const double* y, bool full) {
    const auto& x = grid_->pivots;
    std::fill(gain_.begin(), gain_.end(), 0.0);
    std::fill(lf_.begin(), lf_.end(), 0.0);
    over_ = 0.0;
    const bool absorb = b_ == Boundary::Absorbing;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double nj = y[j];
      if (nj == 0.0 && !full) {
        idx += n_ - j;
        continue;
      }
      for (std::size_t q = j; q < n_; ++q, ++idx) {
        const double nq = y[q];
        const double K = kmat_.empty() ? k_.eval(x[j], x[q]) : kmat_[idx];
        const double rate = (q == j) ? 0.5 * K * nj * nj : K * nj * nq;
        std::int32_t d;
        double a;
        if (discrete_) {
          std::size_t t = j + q + 1;
          d = t < n_ ? static_cast<std::int32_t>(t) : -1;
          a = 1.0;
        } else if (!dest_.empty()) {
          d = dest_[idx];
          a = frac_[idx];
        } else {
          locate(x[j] + x[q], d, a);
        }
        if (d < 0) {
          over_ += rate * (x[j] + x[q]);
          if (!absorb) continue;
        } else {
          gain_[static_cast<std::size_t>(d)] += a * rate;
          if (a < 1.0) gain_[static_cast<std::size_t>(d) + 1] += (1.0 - a) * rate;
        }
        lf_[j] += K * nq;
        if (q != j) lf_[q] += K * nj;
      }
    }
  }

  void eval_fast(const double* y) {
    std::fill(gain_.begin(), gain_.end(), 0.0);
    std::fill(lf_.begin(), lf_.end(), 0.0);
    over_ = 0.0;
    const bool absorb = b_ == Boundary::Absorbing;
    const std::size_t n = n_;
    for (const auto& t : *terms_) {
      for (std::size_t i = 0; i < n; ++i) {
        a_[i] = t.u[i] * y[i];
        b_buf_[i] = t.v[i] * y[i];
      }
      conv_->convolve(a_.data(), t.paired ? b_buf_.data() : a_.data(), conv_out_.data());
      const double w = t.paired ? t.coeff : 0.5 * t.coeff;
      for (std::size_t m = 1; m < n; ++m) gain_[m] += w * conv_out_[m - 1];
      for (std::size_t c = n - 1; c + 1 < 2 * n; ++c) over_ += w * conv_out_[c] * static_cast<double>(c + 2);
      double su = 0.0, sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        su += a_[i];
        sv += b_buf_[i];
        pu_[i] = su;
        pv_[i] = sv;
      }
      for (std::size_t j = 0; j < n; ++j) {
        double PU, PV;
        if (absorb) {
          PU = pu_[n - 1];
          PV = pv_[n - 1];
        } else if (j + 2 <= n) {
          PU = pu_[n - 2 - j];
          PV = pv_[n - 2 - j];
        } else {
          PU = PV = 0.0;
        }
        lf_[j] += t.paired ? t.coeff * (t.u[j] * PV + t.v[j] * PU) : t.coeff * t.u[j] * PU;
      }
    }
  }

  GridPtr grid_;
  Kernel k_;
  Boundary b_;
  std::size_t n_;
  bool discrete_ = false;
  std::vector<double> kmat_;
  std::vector<std::int32_t> dest_;
  std::vector<double> frac_;
  std::optional<std::vector<SeparableTerm>> terms_;
  std::unique_ptr<Convolver> conv_;
  std::vector<double> a_, b_buf_, conv_out_, pu_, pv_;
  std::vector<double> gain_, lf_;
  double over_ = 0.0;
};

Kernel effective_kernel(const Kernel& k, const SizeGrid& g, const SolverConfig& cfg) {
  if (cfg.truncation_n) return truncate(k, *cfg.truncation_n, TruncationMode::Cap);
  if (k.cap || !cfg.default_cap) return k;
  double lo = g.pivots.front(), hi = std::max(g.pivots.back(), lo * 2.0);
  bool bounded = false;
  try {
    bounded = classify(k, lo, hi).bounded_kappa0.has_value();
  } catch (const Error&) {
  }
  if (bounded) return k;
  return truncate(k, default_cap(k, g), TruncationMode::Cap);
}

bool is_gelling(const Kernel& k, const SizeGrid& g) {
  Kernel base = k;
  base.cap.reset();
  base.r.cap.reset();
  double lo = g.pivots.front(), hi = std::max(g.pivots.back(), lo * 2.0);
  try {
    return classify(base, lo, hi).gelling_lambda.has_value();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

RateSplit rates(const SizeDistribution& d, const Kernel& k, Boundary b) {
  RhsEngine eng(d.grid, k, b, GainPath::Direct);
  std::vector<double> y = d.numbers();
  y.push_back(0.0);
  y.push_back(0.0);
  std::vector<double> dy(y.size());
  RateSplit s;
  eng.eval(y.data(), dy.data(), &s);
  return s;
}

std::vector<double> snapshot_schedule(const SolverConfig& cfg) {
  std::vector<double> s{0.0};
  for (double t : cfg.snapshot_times)
    if (t > 0.0 && t < cfg.t_end) s.push_back(t);
  s.push_back(cfg.t_end);
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  for (double t : s)
    if (out.empty() || t - out.back() > 1e-14 * cfg.t_end) out.push_back(t);
  out.back() = cfg.t_end;
  return out;
}

Trajectory integrate(const SizeDistribution& init, const SolverConfig& cfg) {
  if (!(cfg.t_end > 0.0)) fail(Status::InvalidArgument, "t_end must be positive");
  if (cfg.scheme.kind == Scheme::Kind::RK4Fixed && !(cfg.scheme.dt > 0.0))
    fail(Status::InvalidArgument, "fixed step dt must be positive");
  if (cfg.scheme.kind == Scheme::Kind::RK45Adaptive && !(cfg.scheme.rel_tol > 0.0 || cfg.scheme.abs_tol > 0.0))
    fail(Status::InvalidArgument, "adaptive tolerances must be positive");
  for (double v : init.density)
    if (!(v >= 0.0) || !std::isfinite(v)) fail(Status::InvalidArgument, "initial density must be finite and non-negative");

  const SizeGrid& g = *init.grid;
  const std::size_t n = g.size();
  Trajectory tr;
  tr.kernel = effective_kernel(cfg.kernel, g, cfg);
  tr.boundary = cfg.boundary;
  const bool watch_gel = cfg.boundary == Boundary::Conservative && is_gelling(cfg.kernel, g);

  RhsEngine eng(init.grid, tr.kernel, cfg.boundary, cfg.gain_path);
  tr.log.fast_path = eng.fast();
  const std::size_t dim = n + 2;
  std::vector<double> y = init.numbers();
  y.push_back(0.0);
  y.push_back(0.0);
  std::vector<double> w(dim, 1.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 + g.pivots[i];

  const double m1_0 = moment(init, 1.0);
  const auto sched = snapshot_schedule(cfg);
  auto record = [&](double t) {
    std::vector<double> num(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    SizeDistribution s = SizeDistribution::from_numbers(init.grid, num, t);
    tr.moments.push(t, s, y[n]);
    tr.gel_mass.push_back(y[n]);
    tr.snapshots.push_back(std::move(s));
  };
  record(0.0);
  std::size_t next = 1;

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), yt(dim), yn(dim);
  auto f = [&](const std::vector<double>& in, std::vector<double>& out) {
    eng.eval(in.data(), out.data());
    ++tr.log.rhs_evals;
  };
  auto wnorm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += w[i] * std::fabs(v[i]);
    return s;
  };
  // Post-step clamp of round-off negatives, logged.
  auto clamp = [&]() {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, y[i] / g.widths[i]);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (y[i] < 0.0) {
        double rel = mx > 0.0 ? (-y[i] / g.widths[i]) / mx : 1.0;
        tr.log.max_clamped = std::max(tr.log.max_clamped, rel);
        ++tr.log.clamp_events;
        y[i] = 0.0;
        any = true;
      }
    return any;
  };

  double t = 0.0;
  const double h_min = 1e-12 * cfg.t_end;
  f(y, k1);
  double h;
  if (cfg.scheme.kind == Scheme::Kind::RK4Fixed) {
    h = cfg.scheme.dt;
  } else {
    double d0 = wnorm(y), d1 = wnorm(k1);
    h = (d1 > 0.0 && d0 > 0.0) ? 0.01 * d0 / d1 : 1e-6 * cfg.t_end;
    h = std::min({h, 0.01 * cfg.t_end, std::max(cfg.scheme.rel_tol, 1e-6) * cfg.t_end * 1e3});
    h = std::max(h, 1e-9 * cfg.t_end);
  }
  tr.log.min_dt = std::numeric_limits<double>::infinity();
  std::uint64_t steps = 0;

  while (next < sched.size()) {
    if (steps++ >= cfg.max_steps) {
      tr.flag = TrajectoryFlag::StepBudget;
      tr.flag_message = "step budget exhausted";
      break;
    }
    const double target = sched[next];
    double step = std::min(h, target - t);
    bool hits = step >= target - t;
    if (cfg.scheme.kind == Scheme::Kind::RK4Fixed) {
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + 0.5 * step * k1[i];
      f(yt, k2);
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + 0.5 * step * k2[i];
      f(yt, k3);
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + step * k3[i];
      f(yt, k4);
      for (std::size_t i = 0; i < dim; ++i) y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      bool finite = true;
      for (double v : y) finite = finite && std::isfinite(v);
      if (!finite) {
        tr.flag = TrajectoryFlag::StepUnderflow;
        tr.flag_message = "non-finite state with fixed step; reduce dt";
        break;
      }
      ++tr.log.accepted;
    } else {
      static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                              a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                              a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                              a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                              b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                              e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                              e7 = -1.0 / 40;
      const double s = step;
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + s * a21 * k1[i];
      f(yt, k2);
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + s * (a31 * k1[i] + a32 * k2[i]);
      f(yt, k3);
      for (std::size_t i = 0; i < dim; ++i) yt[i] = y[i] + s * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(yt, k4);
      for (std::size_t i = 0; i < dim; ++i)
        yt[i] = y[i] + s * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(yt, k5);
      for (std::size_t i = 0; i < dim; ++i)
        yt[i] = y[i] + s * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      f(yt, k6);
      for (std::size_t i = 0; i < dim; ++i)
        yn[i] = y[i] + s * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      f(yn, k7);
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double e = s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err += w[i] * std::fabs(e);
        scale += w[i] * std::max(std::fabs(y[i]), std::fabs(yn[i]));
      }
      err /= cfg.scheme.abs_tol + cfg.scheme.rel_tol * scale;
      if (!std::isfinite(err)) err = 1e10;
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      if (err > 1.0) {
        ++tr.log.rejected;
        h = s * std::min(fac, 0.9);
        if (h < h_min) {
          tr.flag = TrajectoryFlag::StepUnderflow;
          tr.flag_message = "step size fell below 1e-12 t_end";
          break;
        }
        continue;
      }
      ++tr.log.accepted;
      y.swap(yn);
      k1.swap(k7);
      if (!hits || fac < 1.0) h = s * fac;
      else h = std::max(h, s * fac);
    }
    tr.log.min_dt = std::min(tr.log.min_dt, step);
    if (cfg.scheme.kind == Scheme::Kind::RK45Adaptive) {
      // Keep h lambda inside the real stability interval of the 4(5) pair.
      double lam = eng.stiffness(y.data());
      if (lam > 0.0) h = std::min(h, 3.0 / lam);
    }
    tr.log.last_dt = step;
    t = hits ? target : t + step;
    bool clamped = clamp();
    if (clamped || cfg.scheme.kind == Scheme::Kind::RK4Fixed) f(y, k1);
    if (hits) {
      record(t);
      ++next;
    }
    if (watch_gel && y[n + 1] > cfg.gel_leak_tolerance * m1_0) {
      tr.flag = TrajectoryFlag::GelationStiffness;
      tr.flag_message = "mass reaching the grid end exceeds tolerance: gelation stiffness";
      break;
    }
  }
  tr.stop_time = t;
  tr.suppressed_mass = y[n + 1];
  if (tr.flagged() && (tr.snapshots.empty() || tr.snapshots.back().time < t)) record(t);
  if (!std::isfinite(tr.log.min_dt)) tr.log.min_dt = 0.0;
  return tr;
}

}  // namespace coag
