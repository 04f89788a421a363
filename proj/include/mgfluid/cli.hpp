// Copyright 2026 The mgfluid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mgfluid::cli {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kUsage = 2,
  kThresholdFailed = 3,
};

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "MGFLUID_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "mgfluid_out";

// args excludes the program name, e.g. {"compare", "--config", "c.json"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgfluid::cli
