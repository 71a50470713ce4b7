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

#include "swingup/grid.hpp"

#include <cmath>

#include "swingup/error.hpp"

namespace swingup {

UniformGrid::UniformGrid(double start, double step, std::size_t size)
    : start_(start), step_(step), size_(size) {
  require(std::isfinite(start) && std::isfinite(step), ErrorKind::kInvalidArgument,
          "grid start and step must be finite");
  require(step > 0.0, ErrorKind::kInvalidArgument, "grid spacing must be positive");
  require(size >= 1, ErrorKind::kInvalidArgument, "grid must hold at least one point");
}

UniformGrid UniformGrid::centered(double center, double step, std::size_t size) {
  return UniformGrid(center - static_cast<double>(size / 2) * step, step, size);
}

std::vector<double> UniformGrid::values() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
  return out;
}

}  // namespace swingup
