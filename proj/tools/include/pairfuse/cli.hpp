// Copyright 2026 The pairfuse Authors
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

#include <iosfwd>
#include <string>
#include <vector>

namespace pairfuse::cli {

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kVerificationFailure = 1;
inline constexpr int kUsageError = 2;

/// Environment variable naming the default directory for sweep output.
inline constexpr const char* kOutputDirEnv = "PAIRFUSE_OUTPUT_DIR";

/// "3", "0..2", "2,3,5" or "2..3,5". Throws std::invalid_argument.
std::vector<int> parse_int_range(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pairfuse::cli
