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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "format.hpp"

namespace coag::io {

using nlohmann::json;

// ---- line index ------------------------------------------------------------

LineIndex::LineIndex(const std::string& text) {
  struct Frame {
    bool object;
    std::string path;
    std::string key;
    int index;
  };
  std::vector<Frame> stack;
  int line = 1;
  bool expect_key = false;
  bool value_pending = true;  // next token starts a value
  auto here = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.path + "/" + (f.object ? f.key : std::to_string(f.index));
  };
  auto mark_value = [&]() {
    if (!value_pending) return;
    value_pending = false;
    if (!stack.empty() && !stack.back().object) lines_.emplace(here(), line);
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') continue;
    if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          s += text[++i];
          continue;
        }
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (expect_key && !stack.empty() && stack.back().object) {
        stack.back().key = s;
        lines_.emplace(here(), line);
        expect_key = false;
      } else {
        mark_value();
      }
      continue;
    }
    switch (c) {
      case '{':
      case '[': {
        mark_value();
        std::string p = here();
        stack.push_back({c == '{', p, "", 0});
        expect_key = c == '{';
        value_pending = c == '[';
        break;
      }
      case '}':
      case ']':
        if (!stack.empty()) stack.pop_back();
        value_pending = false;
        expect_key = false;
        break;
      case ':':
        value_pending = true;
        break;
      case ',':
        if (!stack.empty()) {
          if (stack.back().object) {
            expect_key = true;
          } else {
            ++stack.back().index;
            value_pending = true;
          }
        }
        break;
      default:
        mark_value();
        break;
    }
  }
}

int LineIndex::line(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    auto cut = p.find_last_of('/');
    if (cut == std::string::npos || p.empty()) return 1;
    p = p.substr(0, cut);
    if (p.empty()) return 1;
  }
}

// ---- schema helpers --------------------------------------------------------

namespace {

struct Ctx {
  const LineIndex* index = nullptr;
  std::string file;

  [[noreturn]] void error(const std::string& ptr, const std::string& msg) const {
    std::ostringstream os;
    os << file << ":" << (index ? index->line(ptr) : 1) << ": " << (ptr.empty() ? "/" : ptr) << ": " << msg;
    fail(Status::Config, os.str());
  }
};

class Node {
 public:
  Node(const json& j, std::string ptr, const Ctx& c) : j_(j), ptr_(std::move(ptr)), c_(c) {}

  const json& raw() const { return j_; }
  const std::string& ptr() const { return ptr_; }
  [[noreturn]] void error(const std::string& msg) const { c_.error(ptr_, msg); }

  void expect_object() const {
    if (!j_.is_object()) error("expected an object");
  }
  void allow(std::initializer_list<const char*> keys) const {
    expect_object();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) c_.error(ptr_ + "/" + it.key(), "unknown key '" + it.key() + "'");
  }
  bool has(const char* k) const { return j_.is_object() && j_.contains(k) && !j_.at(k).is_null(); }
  Node at(const char* k) const {
    if (!has(k)) error(std::string("missing required key '") + k + "'");
    return Node(j_.at(k), ptr_ + "/" + k, c_);
  }
  Node at(std::size_t i) const { return Node(j_.at(i), ptr_ + "/" + std::to_string(i), c_); }
  // Missing optional sections read as an empty object.
  Node section(const char* k) const {
    static const json empty = json::object();
    return has(k) ? at(k) : Node(empty, ptr_ + "/" + k, c_);
  }

  double num() const {
    if (!j_.is_number()) error("expected a number");
    double v = j_.get<double>();
    if (!std::isfinite(v)) error("expected a finite number");
    return v;
  }
  double num(const char* k, double def) const { return has(k) ? at(k).num() : def; }
  double positive(const char* k, double def) const {
    double v = num(k, def);
    if (!(v > 0.0)) at(k).error("must be positive");
    return v;
  }
  long long integer() const {
    if (!j_.is_number_integer() && !(j_.is_number() && std::floor(j_.get<double>()) == j_.get<double>()))
      error("expected an integer");
    return j_.get<long long>();
  }
  long long integer(const char* k, long long def) const { return has(k) ? at(k).integer() : def; }
  bool boolean(const char* k, bool def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_boolean()) at(k).error("expected true or false");
    return j_.at(k).get<bool>();
  }
  std::string str() const {
    if (!j_.is_string()) error("expected a string");
    return j_.get<std::string>();
  }
  std::string str(const char* k, const std::string& def) const { return has(k) ? at(k).str() : def; }
  std::string choice(const char* k, const std::string& def, std::initializer_list<const char*> opts) const {
    std::string v = str(k, def);
    for (const char* o : opts)
      if (v == o) return v;
    std::string all;
    for (const char* o : opts) all += std::string(all.empty() ? "" : ", ") + o;
    at(k).error("unknown value '" + v + "' (expected one of: " + all + ")");
  }
  std::vector<double> nums() const {
    if (!j_.is_array()) error("expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j_.size(); ++i) v.push_back(at(i).num());
    return v;
  }
  std::size_t size() const { return j_.size(); }

 private:
  const json& j_;
  std::string ptr_;
  const Ctx& c_;
};

RadialRate radial_from(const Node& n) {
  n.allow({"form", "exponent", "scale", "offset", "log_exponent", "x", "r", "cap"});
  std::string form = n.choice("form", "power_law", {"power_law", "sqrt_log", "identity", "tabulated"});
  RadialRate r;
  if (form == "identity") {
    r = RadialRate::identity();
  } else if (form == "power_law") {
    r = RadialRate::power_law(n.num("exponent", 0.5), n.positive("scale", 1.0));
  } else if (form == "sqrt_log") {
    r = RadialRate::sqrt_log(n.num("offset", 2.0), n.num("log_exponent", 0.5));
  } else {
    auto xs = n.at("x").nums(), rs = n.at("r").nums();
    try {
      r = RadialRate::tabulated(xs, rs);
    } catch (const Error& e) {
      n.error(e.what());
    }
  }
  if (n.has("cap")) r.cap = n.positive("cap", 1.0);
  return r;
}

Kernel kernel_from(const Node& n) {
  n.allow({"family", "params", "cap", "truncation"});
  std::string fam = n.choice("family", "", {"constant", "additive", "multiplicative", "power_sum", "product",
                                            "brownian", "tabulated"});
  Node p = n.section("params");
  try {
    if (fam == "constant") {
      p.allow({"c"});
      return Kernel::constant(p.positive("c", 2.0));
    }
    if (fam == "additive") {
      p.allow({});
      return Kernel::additive();
    }
    if (fam == "multiplicative") {
      p.allow({});
      return Kernel::multiplicative();
    }
    if (fam == "power_sum") {
      p.allow({"alpha", "beta"});
      return Kernel::power_sum(p.num("alpha", 0.5), p.num("beta", 0.5));
    }
    if (fam == "product") {
      p.allow({"radial"});
      return Kernel::product(radial_from(p.at("radial")));
    }
    if (fam == "brownian") {
      p.allow({});
      return Kernel::brownian();
    }
    p.allow({"preset", "x_min", "x_max", "n", "x", "values"});
    if (p.has("preset"))
      return Kernel::tabulated_preset(p.choice("preset", "", {"cubic_sum", "shear_diff"}), p.positive("x_min", 1.0),
                                      p.positive("x_max", 1e4), static_cast<int>(p.integer("n", 64)));
    return Kernel::tabulated(p.at("x").nums(), p.at("values").nums());
  } catch (const Error& e) {
    if (e.status() == Status::Config) throw;
    n.error(e.what());
  }
}

GridSpec grid_from(const Node& n) {
  n.allow({"kind", "N", "span", "ratio", "spacing"});
  GridSpec g;
  std::string kind = n.choice("kind", "discrete", {"discrete", "sectional"});
  long long N = n.integer("N", 256);
  if (N < 2 || N > (1 << 24)) n.at("N").error("grid size must lie in [2, 2^24]");
  g.n = static_cast<int>(N);
  if (kind == "discrete") {
    if (n.has("span") || n.has("ratio") || n.has("spacing")) n.error("discrete grids take only N");
    g.kind = GridSpec::Kind::Discrete;
    return g;
  }
  std::string sp = n.choice("spacing", "geometric", {"geometric", "linear"});
  g.kind = sp == "geometric" ? GridSpec::Kind::Geometric : GridSpec::Kind::Linear;
  Node span = n.at("span");
  auto v = span.nums();
  if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > v[0])) span.error("span must be [lo, hi] with 0 < lo < hi");
  g.lo = v[0];
  g.hi = v[1];
  if (n.has("ratio")) {
    if (g.kind != GridSpec::Kind::Geometric) n.at("ratio").error("ratio applies to geometric spacing only");
    g.ratio = n.num("ratio", 0.0);
    if (!(g.ratio > 1.0)) n.at("ratio").error("ratio must exceed 1");
  }
  return g;
}

InitSpec init_from(const Node& n) {
  n.allow({"family", "params"});
  std::string fam = n.choice("family", "monodisperse", {"monodisperse", "exponential", "tabulated"});
  Node p = n.section("params");
  InitSpec s;
  if (fam == "monodisperse") {
    p.allow({"size", "total"});
    s.family = InitSpec::Family::Monodisperse;
    s.size = p.positive("size", 1.0);
  } else if (fam == "exponential") {
    p.allow({"mean", "total"});
    s.family = InitSpec::Family::Exponential;
    s.mean = p.positive("mean", 1.0);
  } else {
    p.allow({"values"});
    s.family = InitSpec::Family::Tabulated;
    s.values = p.at("values").nums();
    for (double v : s.values)
      if (v < 0.0) p.at("values").error("densities must be non-negative");
  }
  if (fam != "tabulated") s.total = p.positive("total", 1.0);
  return s;
}

void solver_from(const Node& n, SolverConfig& c) {
  n.allow({"scheme", "dt", "rel_tol", "abs_tol", "boundary", "t_end", "snapshots", "gain_path", "max_steps",
           "default_cap", "gel_leak_tolerance"});
  std::string sch = n.choice("scheme", "rk45", {"rk45", "rk4"});
  c.scheme.kind = sch == "rk45" ? Scheme::Kind::RK45Adaptive : Scheme::Kind::RK4Fixed;
  c.scheme.dt = n.positive("dt", 1e-3);
  c.scheme.rel_tol = n.positive("rel_tol", 1e-8);
  c.scheme.abs_tol = n.positive("abs_tol", 1e-10);
  c.boundary = n.choice("boundary", "conservative", {"conservative", "absorbing"}) == "absorbing"
                   ? Boundary::Absorbing
                   : Boundary::Conservative;
  c.t_end = n.at("t_end").num();
  if (!(c.t_end > 0.0)) n.at("t_end").error("t_end must be positive");
  std::string gp = n.choice("gain_path", "auto", {"auto", "direct", "fast"});
  c.gain_path = gp == "auto" ? GainPath::Auto : (gp == "direct" ? GainPath::Direct : GainPath::Fast);
  long long ms = n.integer("max_steps", 50'000'000);
  if (ms < 1) n.at("max_steps").error("max_steps must be positive");
  c.max_steps = static_cast<std::uint64_t>(ms);
  c.default_cap = n.boolean("default_cap", true);
  c.gel_leak_tolerance = n.positive("gel_leak_tolerance", 1e-8);
  c.snapshot_times.clear();
  if (n.has("snapshots")) {
    Node s = n.at("snapshots");
    if (s.raw().is_array()) {
      c.snapshot_times = s.nums();
      for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
        if (!(c.snapshot_times[i] >= 0.0) || c.snapshot_times[i] > c.t_end)
          s.at(i).error("snapshot times must lie in [0, t_end]");
    } else {
      s.allow({"every", "count"});
      if (s.has("every") == s.has("count")) s.error("give exactly one of 'every' or 'count'");
      if (s.has("every")) {
        double dt = s.positive("every", 0.1);
        long long k = static_cast<long long>(std::floor(c.t_end / dt + 1e-9));
        if (k > 100000) s.at("every").error("too many snapshots");
        for (long long i = 1; i <= k; ++i) c.snapshot_times.push_back(static_cast<double>(i) * dt);
      } else {
        long long k = s.integer("count", 10);
        if (k < 1 || k > 100000) s.at("count").error("count must lie in [1, 100000]");
        for (long long i = 1; i <= k; ++i) c.snapshot_times.push_back(c.t_end * static_cast<double>(i) / static_cast<double>(k));
      }
    }
  }
}

XiChoice xi_from(const Node& n) {
  n.allow({"kind", "exponent"});
  std::string k = n.choice("kind", "power_shifted", {"power_shifted", "ratio_shifted"});
  if (k == "ratio_shifted") return XiChoice::ratio_shifted();
  return XiChoice::power_shifted(n.num("exponent", 0.25));
}

DetectPolicy policy_from(const Node& n, const char* key) {
  DetectPolicy p;
  p.kind = n.choice(key, "m2_extrapolation", {"m2_extrapolation", "mass_drop"}) == "mass_drop"
               ? DetectPolicy::Kind::MassDrop
               : DetectPolicy::Kind::M2Extrapolation;
  p.threshold = n.positive("threshold", 1e-3);
  return p;
}

void check_from(const Node& n, CheckSpec& c) {
  n.expect_object();
  c.name = n.at("name").str();
  const std::string& k = c.name;
  if (k == "weak_form") {
    n.allow({"name", "theta", "A", "tolerance"});
    n.choice("theta", "identity", {"one", "identity", "min_with_a"});
    n.positive("A", 1.0);
    n.positive("tolerance", 1e-3);
  } else if (k == "flux") {
    n.allow({"name", "A"});
    n.positive("A", 1.0);
  } else if (k == "phi_gronwall") {
    n.allow({"name", "R"});
    n.positive("R", 10.0);
  } else if (k == "psi_moment") {
    n.allow({"name"});
  } else if (k == "product_l2") {
    n.allow({"name", "A", "cap"});
    n.positive("A", 4.0);
    if (n.has("cap")) n.positive("cap", 1.0);
  } else if (k == "equicontinuity") {
    n.allow({"name", "R"});
    n.positive("R", 10.0);
  } else if (k == "comparison_ode") {
    n.allow({"name", "radial"});
    if (n.has("radial")) radial_from(n.at("radial"));
  } else if (k == "gelation_functional") {
    n.allow({"name", "xi", "radial"});
    if (n.has("xi")) xi_from(n.at("xi"));
    if (n.has("radial")) radial_from(n.at("radial"));
  } else if (k == "gelation_detect") {
    n.allow({"name", "policy", "threshold"});
    policy_from(n, "policy");
  } else if (k == "uniqueness") {
    n.allow({"name", "kind", "scale", "power", "lambda", "perturbation"});
    n.choice("kind", "weighted_l1", {"weighted_l1", "cdf_weighted"});
    n.positive("scale", 1.0);
    n.num("power", 1.0);
    n.positive("lambda", 1.0);
    n.positive("perturbation", 1e-3);
  } else if (k == "moment_monotonicity") {
    n.allow({"name", "slack"});
    n.positive("slack", 1e-9);
  } else {
    n.at("name").error("unknown check '" + k + "'");
  }
  c.params = n.raw();
}

CompactnessSpec compactness_from(const Node& n) {
  n.allow({"source", "synthetic", "cells", "members", "tail", "thresholds", "alphas", "betas", "terms", "samples",
           "seed", "max_threshold"});
  CompactnessSpec s;
  s.source = n.choice("source", "snapshots", {"snapshots", "synthetic"}) == "synthetic"
                 ? CompactnessSpec::Source::Synthetic
                 : CompactnessSpec::Source::Snapshots;
  s.synthetic = n.choice("synthetic", "inverse_sqrt", {"bounded", "concentrating", "inverse_sqrt"});
  s.cells = static_cast<int>(n.integer("cells", 1024));
  if (s.cells < 2 || s.cells > (1 << 22)) n.at("cells").error("cells must lie in [2, 2^22]");
  s.members = static_cast<int>(n.integer("members", 64));
  if (s.members < 1 || s.members > 4096) n.at("members").error("members must lie in [1, 4096]");
  if (n.has("tail")) {
    Node t = n.at("tail");
    if (t.raw().is_string()) {
      if (t.str() != "family") t.error("tail must be \"family\", {\"table\": ...} or {\"power\": ...}");
      s.tail = CompactnessSpec::Tail::Family;
    } else {
      t.allow({"table", "power"});
      if (t.has("table") == t.has("power")) t.error("give exactly one of 'table' or 'power'");
      if (t.has("table")) {
        s.tail = CompactnessSpec::Tail::Table;
        Node tb = t.at("table");
        if (!tb.raw().is_array() || tb.size() == 0) tb.error("table must be a non-empty array of [threshold, tail]");
        for (std::size_t i = 0; i < tb.size(); ++i) {
          auto row = tb.at(i).nums();
          if (row.size() != 2) tb.at(i).error("table rows are [threshold, tail]");
          s.table[row[0]] = row[1];
        }
      } else {
        s.tail = CompactnessSpec::Tail::Power;
        Node pw = t.at("power");
        pw.allow({"coeff", "exponent"});
        s.power_coeff = pw.positive("coeff", 2.0);
        s.power_exponent = pw.num("exponent", -1.0);
        if (!(s.power_exponent < 0.0)) pw.at("exponent").error("a tail must decay: exponent < 0");
      }
    }
  }
  if (n.has("thresholds")) {
    s.thresholds = n.at("thresholds").nums();
    if (s.thresholds.empty()) n.at("thresholds").error("thresholds must be non-empty");
    for (std::size_t i = 1; i < s.thresholds.size(); ++i)
      if (!(s.thresholds[i] > s.thresholds[i - 1])) n.at("thresholds").error("thresholds must be increasing");
  }
  s.terms = static_cast<int>(n.integer("terms", 6));
  if (s.terms < 2 || s.terms > 60) n.at("terms").error("terms must lie in [2, 60]");
  if (n.has("alphas")) s.alphas = n.at("alphas").nums();
  if (n.has("betas")) s.betas = n.at("betas").nums();
  if (s.alphas.empty()) s.alphas.assign(static_cast<std::size_t>(s.terms), 1.0);
  if (s.betas.empty())
    for (int m = 0; m < static_cast<int>(s.alphas.size()); ++m) s.betas.push_back(std::pow(4.0, -m));
  if (s.alphas.size() != s.betas.size()) n.error("alphas and betas must have the same length");
  s.samples = static_cast<int>(n.integer("samples", 1000));
  if (s.samples < 1) n.at("samples").error("samples must be positive");
  long long seed = n.integer("seed", 42);
  s.seed = static_cast<std::uint64_t>(seed);
  long long mt = n.integer("max_threshold", std::int64_t{1} << 53);
  if (mt < 2) n.at("max_threshold").error("max_threshold must be at least 2");
  s.max_threshold = mt;
  return s;
}

RunConfig build(const json& j, const std::string& path, const LineIndex& index) {
  Ctx ctx{&index, path};
  Node root(j, "", ctx);
  root.allow({"kernel", "grid", "init", "solver", "diagnostics", "validate", "gelation", "compactness", "output",
              "sweep"});
  RunConfig c;
  c.raw = j;
  c.path = path;
  c.hash = hex64(fnv1a(j.dump()));
  if (root.has("kernel")) {
    Node k = root.at("kernel");
    c.kernel = kernel_from(k);
    c.has_kernel = true;
    if (k.has("cap")) c.cap = k.positive("cap", 1.0);
    c.truncation = k.choice("truncation", "cap", {"cap", "product_cap"}) == "product_cap" ? TruncationMode::ProductCap
                                                                                          : TruncationMode::Cap;
    if (c.truncation == TruncationMode::ProductCap && c.kernel.family != Kernel::Family::Product)
      k.at("truncation").error("product_cap applies to product kernels only");
  }
  if (root.has("grid")) {
    c.grid = grid_from(root.at("grid"));
    c.has_grid = true;
  }
  if (root.has("init")) {
    c.init = init_from(root.at("init"));
    c.has_init = true;
  }
  if (root.has("solver")) {
    solver_from(root.at("solver"), c.solver);
    c.has_solver = true;
  }
  if (root.has("diagnostics")) {
    Node d = root.at("diagnostics");
    d.allow({"checks"});
    if (d.has("checks")) {
      Node list = d.at("checks");
      if (!list.raw().is_array()) list.error("checks must be an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        CheckSpec cs;
        cs.line = index.line(list.ptr() + "/" + std::to_string(i));
        check_from(list.at(i), cs);
        c.checks.push_back(std::move(cs));
      }
    }
  }
  if (root.has("validate")) {
    Node v = root.at("validate");
    v.allow({"tolerance", "tolerances", "sizes"});
    c.validate.tolerance = v.positive("tolerance", 1e-6);
    c.validate.sizes = static_cast<int>(v.integer("sizes", 10));
    if (c.validate.sizes < 0 || c.validate.sizes > 100000) v.at("sizes").error("sizes must lie in [0, 100000]");
    if (v.has("tolerances")) {
      Node t = v.at("tolerances");
      t.allow({"f", "M0", "M1", "M2"});
      for (const char* q : {"f", "M0", "M1", "M2"})
        if (t.has(q)) c.validate.tolerances[q] = t.positive(q, 1.0);
    }
  }
  if (root.has("gelation")) {
    Node g = root.at("gelation");
    g.allow({"policy", "threshold", "baseline", "xi", "radial"});
    c.gelation.policy = policy_from(g, "policy");
    c.gelation.baseline = g.boolean("baseline", false);
    if (g.has("xi")) c.gelation.xi = xi_from(g.at("xi"));
    if (g.has("radial")) c.gelation.radial = radial_from(g.at("radial"));
  }
  if (root.has("compactness")) c.compactness = compactness_from(root.at("compactness"));
  if (root.has("output")) {
    Node o = root.at("output");
    o.allow({"directory", "formats"});
    c.out_dir = o.str("directory", "");
    if (o.has("formats")) {
      Node f = o.at("formats");
      if (!f.raw().is_array()) f.error("formats must be an array");
      c.csv = c.json = false;
      for (std::size_t i = 0; i < f.size(); ++i) {
        std::string s = f.at(i).str();
        if (s == "csv") c.csv = true;
        else if (s == "json") c.json = true;
        else f.at(i).error("unknown format '" + s + "' (expected csv or json)");
      }
    }
  }
  if (root.has("sweep")) {
    Node s = root.at("sweep");
    if (!s.raw().is_array()) s.error("sweep must be an array of override objects");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.at(i).raw().is_object()) s.at(i).error("sweep entries must be objects");
      if (s.at(i).raw().contains("sweep")) s.at(i).error("sweep entries cannot nest sweeps");
      c.sweep.push_back(s.at(i).raw());
    }
  }
  if (c.has_init && c.has_grid && c.init.family == InitSpec::Family::Tabulated &&
      static_cast<int>(c.init.values.size()) != c.grid.n)
    root.at("init").error("tabulated init needs one value per grid cell");
  return c;
}

}  // namespace

GridPtr GridSpec::build() const {
  switch (kind) {
    case Kind::Discrete:
      return std::make_shared<const SizeGrid>(SizeGrid::discrete(n));
    case Kind::Geometric:
      if (ratio > 0.0) return std::make_shared<const SizeGrid>(SizeGrid::geometric(lo, ratio, n));
      return std::make_shared<const SizeGrid>(SizeGrid::geometric_span(lo, hi, n));
    case Kind::Linear:
      return std::make_shared<const SizeGrid>(SizeGrid::linear(lo, hi, n));
  }
  return nullptr;
}

Kernel RunConfig::run_kernel() const {
  if (cap) return truncate(kernel, *cap, truncation);
  return kernel;
}

RunConfig parse_config(const std::string& text, const std::string& path) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line.
    std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    int line = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i)
      if (text[i] == '\n') ++line;
    std::ostringstream os;
    os << path << ":" << line << ": malformed JSON: " << e.what();
    fail(Status::Config, os.str());
  }
  if (!j.is_object()) fail(Status::Config, path + ":1: top level must be an object");
  LineIndex idx(text);
  return build(j, path, idx);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Status::Io, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

RunConfig apply_patch(const RunConfig& base, const json& patch) {
  json j = base.raw;
  j.erase("sweep");
  j.merge_patch(patch);
  std::string text = j.dump(2);
  LineIndex idx(text);
  return build(j, base.path + " (sweep entry)", idx);
}

Kernel parse_kernel(const json& j) {
  LineIndex idx;
  Ctx ctx{&idx, "<kernel>"};
  return kernel_from(Node(j, "", ctx));
}

RadialRate parse_radial(const json& j) {
  LineIndex idx;
  Ctx ctx{&idx, "<radial>"};
  return radial_from(Node(j, "", ctx));
}

}  // namespace coag::io
