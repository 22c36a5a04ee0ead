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

#ifndef COAG_IO_REPORTS_HPP
#define COAG_IO_REPORTS_HPP

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "compactness.hpp"
#include "diagnostics.hpp"
#include "solver.hpp"

namespace coag::io {

using nlohmann::json;

json to_json(const MarginSeries& m);
json to_json(const WeakFormResidual& w);
json to_json(const FluxSplit& f);
json to_json(const BoundReport& b);
json to_json(const ComparisonReport& c);
json to_json(const GelationReport& g);
json to_json(const UniquenessReport& u);
json to_json(const VPFunction& v);
json to_json(const VPReport& r);
json to_json(const EtaLimit& e);
json to_json(const GrowthClass& g);
json to_json(const StepLog& s);
json to_json(const RadialRate& r);
json kernel_json(const Kernel& k);

// Flat rows: check,t,lhs,rhs,margin,verdict
void write_margin_csv_header(std::ostream& os);
void write_margin_csv(std::ostream& os, const MarginSeries& m);

void write_moments_csv(std::ostream& os, const MomentSeries& m);
void write_snapshots_csv(std::ostream& os, const std::vector<SizeDistribution>& snaps);

}  // namespace coag::io

#endif
