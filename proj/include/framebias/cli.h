// Copyright 2026 The Framebias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRAMEBIAS_CLI_H_
#define FRAMEBIAS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace framebias {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // input, validation or I/O failure
inline constexpr int kExitUsage = 2;    // bad command line

// Runs one `framebias` invocation. `args` excludes the program name.
// Diagnostics go to `err`; `inspect` writes its table to `out`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace framebias

#endif  // FRAMEBIAS_CLI_H_
