// Copyright 2026 The ONRAP Authors
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

// Subcommands of the onrap tool. Each returns a process exit status.

#ifndef ONRAP_TOOLS_COMMANDS_H_
#define ONRAP_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace onrap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;        // I/O or unexpected failure
inline constexpr int kExitConfigError = 2;  // bad config, flag or input file

struct RunArgs {
  std::string config_path;  // empty: built-in defaults
  std::string out_dir = "onrap_out";
  std::optional<int> episodes;
  std::optional<std::string> planners;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> flow;
  std::optional<std::string> plots;
  std::optional<std::string> timing;
  std::optional<int> traces;
  bool grids = false;        // grid snapshot per cycle of traced episodes
  bool diagnostics = false;  // solver iteration CSV per cycle (ONRAP)
  bool quiet = false;
};

struct ReplayArgs {
  std::string trace_path;
  std::string out_dir;  // empty: next to the trace
  std::string plots = "on";
};

struct ValidateArgs {
  std::string config_path;
};

int Run(const RunArgs& args, std::ostream& out, std::ostream& err);
int Replay(const ReplayArgs& args, std::ostream& out, std::ostream& err);
int ValidateParams(const ValidateArgs& args, std::ostream& out,
                   std::ostream& err);

}  // namespace onrap::cli

#endif  // ONRAP_TOOLS_COMMANDS_H_
