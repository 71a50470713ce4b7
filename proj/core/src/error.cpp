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

#include "swingup/error.hpp"

namespace swingup {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kStiffness: return "stiffness";
    case ErrorKind::kIntegratorFailure: return "integrator-failure";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kUndefinedRatio: return "undefined-ratio";
    case ErrorKind::kFitRange: return "fit-range";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kCalibration: return "calibration";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

ConfigError::ConfigError(int line, const std::string& what)
    : Error(ErrorKind::kConfig,
            line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace swingup
