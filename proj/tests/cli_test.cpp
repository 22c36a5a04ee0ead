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

#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("coag_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
  // Exit status of the CLI; stdout and stderr go to files in the sandbox.
  int run(const std::string& args) const {
    std::string cmd = std::string("\"") + COAG_CLI_PATH + "\" " + args + " >\"" + (dir / "stdout.txt").string() +
                      "\" 2>\"" + (dir / "stderr.txt").string() + "\"";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  std::string read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

const char* kConstant = R"({
  "kernel": {"family": "constant", "params": {"c": 2}},
  "grid": {"kind": "discrete", "N": 128},
  "init": {"family": "monodisperse"},
  "solver": {"t_end": 1.0, "rel_tol": 1e-10, "abs_tol": 1e-14, "snapshots": {"every": 0.25}},
  "diagnostics": {"checks": [{"name": "weak_form"}, {"name": "moment_monotonicity"}]}
})";

}  // namespace

TEST_CASE("cli exit codes") {
  Sandbox s;
  auto ok = s.write("ok.json", kConstant);
  CHECK(s.run("simulate \"" + ok + "\" --out \"" + (s.dir / "a").string() + "\"") == 0);
  CHECK(s.run("validate \"" + ok + "\" --out \"" + (s.dir / "v").string() + "\"") == 0);

  auto tight = s.write("tight.json", R"({"kernel": {"family": "constant", "params": {"c": 2}},
    "grid": {"kind": "discrete", "N": 64}, "init": {"family": "monodisperse"},
    "solver": {"t_end": 0.5, "rel_tol": 1e-3, "abs_tol": 1e-3}, "validate": {"tolerance": 1e-14}})");
  CHECK(s.run("validate \"" + tight + "\" --out \"" + (s.dir / "t").string() + "\"") == 1);

  auto bad = s.write("bad.json", "{\n \"kernel\": {\"family\": \"constant\"},\n \"bogus\": 1\n}");
  CHECK(s.run("simulate \"" + bad + "\"") == 2);
  CHECK(s.read(s.dir / "stderr.txt").find("bad.json:3:") != std::string::npos);
  CHECK(s.run("simulate") == 2);
  CHECK(s.run("teleport \"" + ok + "\"") == 2);
  CHECK(s.run("simulate \"" + ok + "\" --jobs 0") == 2);

  auto gel = s.write("gel.json", R"({"kernel": {"family": "multiplicative"}, "grid": {"kind": "discrete", "N": 256},
    "init": {"family": "monodisperse"}, "solver": {"t_end": 2, "snapshots": {"every": 0.1}}})");
  CHECK(s.run("simulate \"" + gel + "\" --out \"" + (s.dir / "g").string() + "\"") == 3);

  auto br = s.write("br.json", R"({"kernel": {"family": "brownian"}, "grid": {"kind": "discrete", "N": 32},
    "init": {"family": "monodisperse"}, "solver": {"t_end": 0.5}})");
  CHECK(s.run("validate \"" + br + "\" --out \"" + (s.dir / "b").string() + "\"") == 4);

  auto ct = s.write("ct.json", R"({"compactness": {"tail": {"table": [[1, 1], [1000, 1]]}}})");
  CHECK(s.run("compactness \"" + ct + "\" --out \"" + (s.dir / "c").string() + "\"") == 5);

  CHECK(s.run("--version") == 0);
  CHECK_FALSE(s.read(s.dir / "stdout.txt").empty());
}

TEST_CASE("cli output is deterministic and carries provenance") {
  Sandbox s;
  auto ok = s.write("ok.json", kConstant);
  REQUIRE(s.run("simulate \"" + ok + "\" --out \"" + (s.dir / "a").string() + "\"") == 0);
  REQUIRE(s.run("simulate \"" + ok + "\" --out \"" + (s.dir / "b").string() + "\"") == 0);
  for (const char* f : {"moments.csv", "snapshots.csv", "checks.csv"}) {
    INFO(f);
    auto a = s.read(s.dir / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == s.read(s.dir / "b" / f));
  }
  auto header = s.read(s.dir / "a" / "moments.csv");
  CHECK(header.rfind("t,", 0) == 0);
  auto run = nlohmann::json::parse(s.read(s.dir / "a" / "run.json"));
  CHECK(run.contains("config_hash"));
  CHECK(run.contains("version"));
}

TEST_CASE("cli sweep writes one directory per entry") {
  Sandbox s;
  auto sw = s.write("sw.json", R"({"kernel": {"family": "additive"}, "grid": {"kind": "discrete", "N": 64},
    "init": {"family": "monodisperse"}, "solver": {"t_end": 0.5},
    "sweep": [{"grid": {"N": 32}}, {"grid": {"N": 128}}, {"solver": {"t_end": 0.25}}]})");
  REQUIRE(s.run("simulate \"" + sw + "\" --jobs 2 --out \"" + (s.dir / "sw").string() + "\"") == 0);
  auto idx = nlohmann::json::parse(s.read(s.dir / "sw" / "sweep.json"));
  REQUIRE(idx["entries"].is_array());
  CHECK(idx["entries"].size() == 3);
  for (int i = 0; i < 3; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "sweep_%03d", i);
    CHECK(fs::exists(s.dir / "sw" / name / "moments.csv"));
  }
}
