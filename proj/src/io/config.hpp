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

#ifndef COAG_IO_CONFIG_HPP
#define COAG_IO_CONFIG_HPP

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compactness.hpp"
#include "diagnostics.hpp"
#include "kernel.hpp"
#include "solver.hpp"
#include "state.hpp"

namespace coag::io {

// Maps JSON pointers (/solver/t_end, /diagnostics/checks/0) to 1-based source lines.
class LineIndex {
 public:
  LineIndex() = default;
  explicit LineIndex(const std::string& text);
  int line(const std::string& pointer) const;

 private:
  std::map<std::string, int> lines_;
};

struct GridSpec {
  enum class Kind { Discrete, Geometric, Linear };
  Kind kind = Kind::Discrete;
  int n = 256;
  double lo = 1.0, hi = 1e3;
  double ratio = 0.0;  // geometric: used when > 0, otherwise span
  GridPtr build() const;
};

struct CheckSpec {
  std::string name;
  nlohmann::json params;  // validated at load time
  int line = 0;
};

struct ValidateSpec {
  double tolerance = 1e-6;
  std::map<std::string, double> tolerances;  // per quantity overrides
  int sizes = 10;
};

struct GelationSpec {
  DetectPolicy policy;
  bool baseline = false;
  XiChoice xi = XiChoice::power_shifted(0.25);
  std::optional<RadialRate> radial;
};

struct CompactnessSpec {
  enum class Source { Snapshots, Synthetic };
  Source source = Source::Snapshots;
  std::string synthetic = "inverse_sqrt";  // bounded | concentrating | inverse_sqrt
  int cells = 1024;
  int members = 64;
  enum class Tail { Family, Table, Power };
  Tail tail = Tail::Family;
  std::map<double, double> table;
  double power_coeff = 2.0, power_exponent = -1.0;
  std::vector<double> thresholds;
  std::vector<double> alphas, betas;
  int terms = 6;
  int samples = 1000;
  std::uint64_t seed = 42;
  std::int64_t max_threshold = std::int64_t{1} << 53;
};

struct RunConfig {
  nlohmann::json raw;
  std::string path;
  std::string hash;  // FNV-1a of the canonical dump

  bool has_kernel = false, has_grid = false, has_init = false, has_solver = false;
  Kernel kernel;
  std::optional<double> cap;
  TruncationMode truncation = TruncationMode::Cap;
  GridSpec grid;
  InitSpec init;
  SolverConfig solver;
  std::vector<CheckSpec> checks;
  ValidateSpec validate;
  GelationSpec gelation;
  std::optional<CompactnessSpec> compactness;
  std::string out_dir;
  bool csv = true, json = true;
  std::vector<nlohmann::json> sweep;

  // Kernel after the configured truncation; the solver adds its default cap.
  Kernel run_kernel() const;
};

// Throws Error(Status::Config) with "path:line: message" on any schema violation.
RunConfig parse_config(const std::string& text, const std::string& path = "<config>");
RunConfig load_config(const std::string& path);
// Applies a sweep entry as a JSON merge patch and re-validates.
RunConfig apply_patch(const RunConfig& base, const nlohmann::json& patch);

Kernel parse_kernel(const nlohmann::json& j);
RadialRate parse_radial(const nlohmann::json& j);

}  // namespace coag::io

#endif
