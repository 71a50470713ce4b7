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

// Minimal INI reader that keeps line numbers so every problem can be reported
// against the offending line.
//
//   # comment            ; comment
//   [section]
//   key = value          repeated keys are kept in order

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace swingup::config {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  mutable bool used = false;
};

class IniDocument {
 public:
  /// Throws ConfigError on malformed lines.
  static IniDocument parse(std::string_view text);
  /// Throws Error(kIo) if the file cannot be read.
  static IniDocument load(const std::string& path);

  const std::string& text() const { return text_; }
  bool has_section(const std::string& section) const;

  const Entry* find(const std::string& section, const std::string& key) const;
  std::vector<const Entry*> find_all(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// ConfigError for the first entry that no getter consumed.
  void reject_unused() const;

 private:
  std::string text_;
  std::map<std::string, std::vector<Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

double parse_double(const Entry& e);

}  // namespace swingup::config
