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

#include "fast_gain.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "error.hpp"

namespace coag {

namespace {
// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Convolver::Impl {
  std::size_t len = 0;
  double* ra = nullptr;
  double* rb = nullptr;
  fftw_complex* ca = nullptr;
  fftw_complex* cb = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(ca);
    fftw_free(cb);
  }
};

Convolver::Convolver(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) fail(Status::InvalidArgument, "convolution length must be positive");
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  impl_->len = len;
  std::size_t nc = len / 2 + 1;
  impl_->ra = fftw_alloc_real(len);
  impl_->rb = fftw_alloc_real(len);
  impl_->ca = fftw_alloc_complex(nc);
  impl_->cb = fftw_alloc_complex(nc);
  if (!impl_->ra || !impl_->rb || !impl_->ca || !impl_->cb) fail(Status::Internal, "FFT buffer allocation failed");
  std::lock_guard<std::mutex> lock(plan_mutex());
  // ESTIMATE keeps planning deterministic across runs.
  impl_->fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), impl_->ra, impl_->ca, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(static_cast<int>(len), impl_->ca, impl_->ra, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) fail(Status::Internal, "FFT plan creation failed");
}

Convolver::~Convolver() = default;

void Convolver::convolve(const double* a, const double* b, double* out) {
  Impl& m = *impl_;
  std::size_t len = m.len, nc = len / 2 + 1;
  for (std::size_t i = 0; i < n_; ++i) {
    m.ra[i] = a[i];
    m.rb[i] = b[i];
  }
  for (std::size_t i = n_; i < len; ++i) m.ra[i] = m.rb[i] = 0.0;
  fftw_execute_dft_r2c(m.fwd, m.ra, m.ca);
  if (a == b) {
    for (std::size_t k = 0; k < nc; ++k) {
      double re = m.ca[k][0], im = m.ca[k][1];
      m.ca[k][0] = re * re - im * im;
      m.ca[k][1] = 2.0 * re * im;
    }
  } else {
    fftw_execute_dft_r2c(m.fwd, m.rb, m.cb);
    for (std::size_t k = 0; k < nc; ++k) {
      double re = m.ca[k][0] * m.cb[k][0] - m.ca[k][1] * m.cb[k][1];
      double im = m.ca[k][0] * m.cb[k][1] + m.ca[k][1] * m.cb[k][0];
      m.ca[k][0] = re;
      m.ca[k][1] = im;
    }
  }
  fftw_execute_dft_c2r(m.inv, m.ca, m.ra);
  double s = 1.0 / static_cast<double>(len);
  double peak = 0.0;
  for (std::size_t k = 0; k + 1 < 2 * n_; ++k) {
    out[k] = m.ra[k] * s;
    peak = std::max(peak, std::fabs(out[k]));
  }
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * peak;
  for (std::size_t k = 0; k + 1 < 2 * n_; ++k)
    if (std::fabs(out[k]) <= floor) out[k] = 0.0;
}

std::vector<double> fast_gain(const SizeDistribution& d, const Kernel& k) {
  const SizeGrid& g = *d.grid;
  if (g.kind != SizeGrid::Kind::DiscreteInteger)
    fail(Status::Unsupported, "fast gain requires a discrete integer grid");
  auto terms = separable_terms(k, g.pivots);
  if (!terms) fail(Status::Unsupported, "kernel " + k.name() + " has no separable form for the fast path");
  std::size_t n = g.size();
  std::vector<double> gain(n, 0.0), a(n), b(n), conv(2 * n - 1);
  Convolver cv(n);
  for (const auto& t : *terms) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = t.u[i] * d.density[i];
      b[i] = t.v[i] * d.density[i];
    }
    cv.convolve(a.data(), t.paired ? b.data() : a.data(), conv.data());
    double w = t.paired ? t.coeff : 0.5 * t.coeff;
    // conv[c] collects sizes (i+1)+(j+1) = c+2, i.e. cell c+1.
    for (std::size_t m = 1; m < n; ++m) gain[m] += w * conv[m - 1];
  }
  return gain;
}

}  // namespace coag
