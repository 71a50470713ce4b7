// Copyright 2026 The swingup Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace swingup {

// Every failure the library reports is a swingup::Error carrying one of these
// kinds, so callers (the CLI in particular) can map them to exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kOutOfRange,
  kShape,
  kStiffness,
  kIntegratorFailure,
  kDimension,
  kUndefinedRatio,
  kFitRange,
  kSingular,
  kCalibration,
  kConfig,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Configuration problem anchored to a line of the source text (0 when the
/// problem is not tied to a single line, e.g. a missing key).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace swingup
