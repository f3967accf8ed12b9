/* Copyright 2026 The Shelfread Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// The shelfread command-line front end. Subcommands: ctc-loss, gradcheck,
// decode, train, segment, index, query, eval.

#ifndef SHELFREAD_CLI_H_
#define SHELFREAD_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace shelfread {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// args excludes the program name. Results go to `out`, diagnostics and
// usage text to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shelfread

#endif  // SHELFREAD_CLI_H_
