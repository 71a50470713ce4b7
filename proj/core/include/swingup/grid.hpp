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

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace swingup {

using cplx = std::complex<double>;

// Unit conventions used throughout: frequencies and detunings in GHz,
// pulse-scale times in ps, lifetimes in ns, Rabi frequencies in rad/ps.
inline constexpr double kPsPerNs = 1.0e3;

/// Angular frequency in rad/ps for a frequency given in GHz.
constexpr double ghz_to_rad_per_ps(double ghz) {
  return 2.0 * std::numbers::pi * ghz / kPsPerNs;
}

/// Uniform 1D sampling `start + i * step`, i in [0, size).
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(double start, double step, std::size_t size);

  /// Grid of `size` points with spacing `step` whose middle sample
  /// (index size/2) sits exactly on `center`.
  static UniformGrid centered(double center, double step, std::size_t size);

  double start() const { return start_; }
  double step() const { return step_; }
  std::size_t size() const { return size_; }
  double operator[](std::size_t i) const { return start_ + static_cast<double>(i) * step_; }
  double front() const { return start_; }
  double back() const { return (*this)[size_ - 1]; }
  double span() const { return back() - front(); }
  bool contains(double x) const { return x >= front() && x <= back(); }

  std::vector<double> values() const;

 private:
  double start_ = 0.0;
  double step_ = 1.0;
  std::size_t size_ = 0;
};

}  // namespace swingup
