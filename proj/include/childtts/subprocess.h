// childtts/subprocess.h

// Copyright 2026  The childtts Authors

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


#ifndef CHILDTTS_SUBPROCESS_H_
#define CHILDTTS_SUBPROCESS_H_

#include <map>
#include <string>

namespace childtts {

struct CommandResult {
  int exit_code = -1;  // -signal when killed, -1 on timeout
  bool timed_out = false;
  std::string output;  // stdout and stderr interleaved, tail only
};

// Replaces each "{key}" in `tmpl` by the shell-quoted value.  Unknown
// placeholders are an error.
std::string ExpandCommand(const std::string &tmpl,
                          const std::map<std::string, std::string> &values);

/// Runs `command` through /bin/sh -c with the caller's environment and
/// waits at most timeout_s seconds, after which the whole process group
/// is killed.  Only the last 64 KiB of output are kept.
CommandResult RunCommand(const std::string &command, double timeout_s);

// "exit 3", "killed by signal 9", "timed out after 5 s", with the captured
// output appended.
std::string DescribeFailure(const CommandResult &r, double timeout_s);

}  // namespace childtts

#endif  // CHILDTTS_SUBPROCESS_H_
