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

#include <span>

#include "swingup/grid.hpp"

namespace swingup::detail {

// In-place unnormalized DFTs: forward uses exp(-2 pi i k n / N), backward
// exp(+2 pi i k n / N). Safe to call from several threads at once.
void fft_forward(std::span<cplx> data);
void fft_backward(std::span<cplx> data);

}  // namespace swingup::detail
