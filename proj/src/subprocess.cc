// src/subprocess.cc

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


#include "childtts/subprocess.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "childtts/common.h"

namespace childtts {

namespace {

constexpr size_t kMaxOutput = 64 * 1024;

std::string ShellQuote(const std::string &s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

}  // namespace

std::string ExpandCommand(const std::string &tmpl,
                          const std::map<std::string, std::string> &values) {
  std::string out;
  for (size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] != '{') {
      out += tmpl[i++];
      continue;
    }
    const size_t close = tmpl.find('}', i);
    if (close == std::string::npos) Fail(ErrorKind::kValidation, "unterminated '{' in command: " + tmpl);
    const std::string key = tmpl.substr(i + 1, close - i - 1);
    auto it = values.find(key);
    if (it == values.end())
      Fail(ErrorKind::kValidation, "unknown placeholder {" + key + "} in command: " + tmpl);
    out += ShellQuote(it->second);
    i = close + 1;
  }
  return out;
}

CommandResult RunCommand(const std::string &command, double timeout_s) {
  Require(timeout_s > 0.0, "command timeout must be positive");
  int fds[2];
  if (::pipe(fds) != 0) Fail(ErrorKind::kRuntime, std::string("pipe: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    Fail(ErrorKind::kRuntime, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);

  CommandResult r;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  char buf[4096];
  bool open = true;
  while (open) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int n = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (n < 0 && errno != EINTR) break;
    if (n <= 0) continue;
    const ssize_t got = ::read(fds[0], buf, sizeof(buf));
    if (got <= 0) {
      open = false;
    } else {
      r.output.append(buf, static_cast<size_t>(got));
      if (r.output.size() > 2 * kMaxOutput) r.output.erase(0, r.output.size() - kMaxOutput);
    }
  }
  ::close(fds[0]);
  if (r.timed_out) ::kill(-pid, SIGKILL);

  int status = 0;
  while (true) {
    if (!r.timed_out) {
      // The pipe can close before the child exits; keep honouring the deadline.
      const pid_t w = ::waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (w < 0 && errno != EINTR) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        r.timed_out = true;
        ::kill(-pid, SIGKILL);
        continue;
      }
      ::usleep(2000);
    } else {
      if (::waitpid(pid, &status, 0) >= 0 || errno != EINTR) break;
    }
  }
  if (r.output.size() > kMaxOutput) r.output.erase(0, r.output.size() - kMaxOutput);
  if (!r.timed_out && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  else if (!r.timed_out && WIFSIGNALED(status)) r.exit_code = -WTERMSIG(status);
  else r.exit_code = -1;
  return r;
}

std::string DescribeFailure(const CommandResult &r, double timeout_s) {
  std::string what;
  if (r.timed_out) {
    char b[64];
    std::snprintf(b, sizeof(b), "timed out after %g s", timeout_s);
    what = b;
  } else if (r.exit_code < 0) {
    what = "killed by signal " + std::to_string(-r.exit_code);
  } else {
    what = "exit " + std::to_string(r.exit_code);
  }
  if (!r.output.empty()) what += "; output:\n" + r.output;
  return what;
}

}  // namespace childtts
