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

// Command-line front end. Talks to the library through the C API only.
#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "coag/coag.h"

int main(int argc, char** argv) {
  CLI::App app{"coag: Smoluchowski coagulation solver and analysis toolkit"};
  app.set_version_flag("--version", std::string(coag_version()));
  app.require_subcommand(1, 1);

  std::string config, out;
  int jobs = 1;
  for (const char* name : {"simulate", "validate", "compactness", "gelation"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config, "JSON run configuration")->required();
    sub->add_option("--jobs", jobs, "parallel sweep entries")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (default: $COAG_OUTPUT_ROOT/<name>)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    // Usage errors share the configuration exit code.
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  return coag_run_command(cmd.c_str(), config.c_str(), out.empty() ? nullptr : out.c_str(), jobs);
}
