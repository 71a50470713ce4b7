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

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace swingup::detail {
namespace {

// The FFTW planner is not reentrant; execution on a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

void transform(std::span<cplx> data, int sign) {
  const auto n = data.size();
  if (n < 2) return;
  FftwBuffer buffer(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buffer.data, buffer.data, sign, FFTW_ESTIMATE);
  }
  auto* raw = reinterpret_cast<cplx*>(buffer.data);
  std::copy(data.begin(), data.end(), raw);
  fftw_execute(plan);
  std::copy(raw, raw + n, data.begin());
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_forward(std::span<cplx> data) { transform(data, FFTW_FORWARD); }
void fft_backward(std::span<cplx> data) { transform(data, FFTW_BACKWARD); }

}  // namespace swingup::detail
