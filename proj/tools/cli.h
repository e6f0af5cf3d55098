// tools/cli.h

// Copyright 2026  The jdapot Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef JDAPOT_TOOLS_CLI_H_
#define JDAPOT_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace jdapot {
namespace cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitParse = 4,
  kExitDimension = 5,
  kExitNumeric = 6,
};

/// Runs one jdapot command.  `args` excludes the program name, e.g.
/// {"synth", "--out-dir", "data"}.  Normal output goes to `out`, diagnostics
/// to `err`; the return value is the process exit code.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Expands "--config FILE" (key=value lines, '#' comments) into
/// "--key=value" arguments placed before the remaining flags, so explicit
/// flags override the file.
std::vector<std::string> ExpandConfigFile(const std::vector<std::string> &args);

}  // namespace cli
}  // namespace jdapot

#endif  // JDAPOT_TOOLS_CLI_H_
