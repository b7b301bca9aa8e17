// childtts/common.h

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

#ifndef CHILDTTS_COMMON_H_
#define CHILDTTS_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace childtts {

// Row-major so that one row is one frame (or one token), matching how
// spectrograms and token representations are laid out everywhere else.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Broad failure classes; the command-line front end maps these onto exit
// codes.
enum class ErrorKind {
  kInvalidArgument,  // violated precondition or bad input value
  kValidation,       // malformed config/manifest content
  kIo,               // file system or decode failure
  kMissingArtifact,  // an upstream pipeline product does not exist
  kRuntime,          // numerical failure, adapter failure, ...
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string &what);

inline void Require(bool cond, const std::string &what) {
  if (!cond) Fail(ErrorKind::kInvalidArgument, what);
}

// Writes `data` to `path` through a temporary sibling and a rename, so
// readers never observe a half-written file.
void WriteFileAtomic(const std::filesystem::path &path, std::string_view data);
std::string ReadFileBytes(const std::filesystem::path &path);

// Lower-case hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view data);

}  // namespace childtts

#endif  // CHILDTTS_COMMON_H_
