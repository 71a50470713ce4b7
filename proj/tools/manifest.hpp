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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace swingup::cli {

/// Provenance record written next to every run's outputs.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string config_hash;  // FNV-1a 64 of the exact config bytes, hex
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::size_t workers = 1;
  std::string started;   // UTC, ISO 8601
  std::string finished;  // UTC, ISO 8601
  std::vector<std::string> outputs;

  std::string to_json() const;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);
std::string utc_now();

}  // namespace swingup::cli
