// Copyright 2026 The RedForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// The redforge command line.

#ifndef REDFORGE_TOOLS_CLI_H_
#define REDFORGE_TOOLS_CLI_H_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "redforge/orchestration.h"

namespace redforge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitUsage = 3,
};

struct CliEnvironment {
  // Defaults to std::getenv.
  std::function<const char*(const char*)> getenv;
  // Defaults to MakeTarget.
  TargetFactory target_factory;
  // Polled by `serve`; returning true shuts the server down.
  std::function<bool()> stop_requested;
};

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const CliEnvironment& env = {});

}  // namespace redforge::cli

#endif  // REDFORGE_TOOLS_CLI_H_
