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

#ifndef COAG_CORE_FAST_GAIN_HPP
#define COAG_CORE_FAST_GAIN_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "kernel.hpp"
#include "state.hpp"

namespace coag {

// Linear convolution of two length-n real sequences via a real FFT of length >= 2n.
// One instance owns its buffers; use one per thread.
class Convolver {
 public:
  explicit Convolver(std::size_t n);
  ~Convolver();
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  std::size_t n() const { return n_; }
  // out receives 2n-1 entries: out[k] = sum_{i+j=k} a[i] b[j].
  // Entries below the transform's round-off floor (a small multiple of machine epsilon
  // times the largest entry) are set to zero so that empty cells stay exactly empty.
  void convolve(const double* a, const double* b, double* out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

// Gain term on a discrete grid computed through the separable decomposition of the
// kernel; products beyond the largest size are dropped. Throws Unsupported when the
// grid is not DiscreteInteger or the kernel does not factor.
std::vector<double> fast_gain(const SizeDistribution& d, const Kernel& k);

}  // namespace coag

#endif
