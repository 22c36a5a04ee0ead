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

#ifndef COAG_APP_COMMANDS_HPP
#define COAG_APP_COMMANDS_HPP

#include <functional>
#include <string>

namespace coag::app {

// Public exit-code contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitTolerance = 1,
  kExitConfig = 2,
  kExitFlagged = 3,
  kExitUnsupported = 4,
  kExitConstructive = 5,
};

struct CommandOptions {
  std::string command;  // simulate | validate | compactness | gelation
  std::string config_path;
  std::string out_dir;  // empty: output.directory or the config stem under $COAG_OUTPUT_ROOT
  int jobs = 1;
  std::function<void(const std::string&)> log;  // diagnostics for the user; stderr when empty
};

int run_command(const CommandOptions& opt);

// Where a run writes its artifacts.
std::string resolve_output_dir(const std::string& cli_out, const std::string& config_dir, const std::string& config_path);

}  // namespace coag::app

#endif
