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

#include "swingup/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "swingup/error.hpp"

namespace swingup::config {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& section, const Entry& e) {
  return "[" + section + "] " + e.key;
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  doc.text_ = std::string(text);
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(line_no, "empty section name");
      if (doc.section_lines_.count(section)) throw ConfigError(line_no, "duplicate section [" + section + "]");
      doc.section_lines_[section] = line_no;
      doc.sections_[section];
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
      if (section.empty()) throw ConfigError(line_no, "key outside of any section");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(line_no, "missing key before '='");
      doc.sections_[section].push_back(Entry{std::string(key), std::string(value), line_no});
    }
    if (end == text.size()) break;
  }
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool IniDocument::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

const Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto all = find_all(section, key);
  if (all.size() > 1) throw ConfigError(all[1]->line, "duplicate key " + where(section, *all[1]));
  return all.empty() ? nullptr : all.front();
}

std::vector<const Entry*> IniDocument::find_all(const std::string& section,
                                                const std::string& key) const {
  std::vector<const Entry*> out;
  const auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  for (const auto& e : it->second) {
    if (e.key == key) {
      e.used = true;
      out.push_back(&e);
    }
  }
  return out;
}

double parse_double(const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

double IniDocument::get_double(const std::string& section, const std::string& key,
                               double fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_double(*e) : fallback;
}

long long IniDocument::get_int(const std::string& section, const std::string& key,
                               long long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  long long v = 0;
  const char* first = e->value.data();
  const char* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
  return v;
}

bool IniDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  throw ConfigError(e->line, "'" + key + "' expects true or false, got '" + e->value + "'");
}

std::string IniDocument::get_string(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

std::vector<double> IniDocument::get_doubles(const std::string& section, const std::string& key,
                                             const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::string_view rest = e->value;
  while (true) {
    const auto comma = rest.find(',');
    Entry item{e->key, std::string(trim(rest.substr(0, comma))), e->line};
    out.push_back(parse_double(item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void IniDocument::reject_unused() const {
  const Entry* first = nullptr;
  std::string first_section;
  for (const auto& [name, entries] : sections_) {
    for (const auto& e : entries) {
      if (!e.used && (!first || e.line < first->line)) {
        first = &e;
        first_section = name;
      }
    }
  }
  if (first) throw ConfigError(first->line, "unknown key " + where(first_section, *first));
}

}  // namespace swingup::config
