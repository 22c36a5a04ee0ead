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

#ifndef COAG_CORE_REFERENCE_HPP
#define COAG_CORE_REFERENCE_HPP

#include <optional>
#include <string>
#include <vector>

#include "kernel.hpp"

namespace coag {

struct OracleMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

struct OracleResult {
  enum class Kind { FullDistribution, MomentsOnly };
  Kind kind = Kind::MomentsOnly;
  double t = 0.0;
  std::vector<double> values;  // number of clusters of size i+1
  OracleMoments moments;
  double valid_until = 0.0;    // +inf when unrestricted
};

// Monodisperse unit-size initial data. Constant(c), Additive and Multiplicative only.
OracleResult exact_solution(const Kernel& k, double t, int sizes = 0);

// Integrates the closed moment system from the given initial moments.
OracleMoments moment_oracle(const Kernel& k, const OracleMoments& init, double t);

bool has_oracle(const Kernel& k);

}  // namespace coag

#endif
