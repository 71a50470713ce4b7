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


#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "swingup/config.hpp"
#include "swingup/error.hpp"
#include "swingup/protocols.hpp"

using namespace swingup;
using config::IniDocument;
using protocols::ExperimentConfig;

namespace {

int error_line(const std::string& text) {
  try {
    ExperimentConfig::from_ini(IniDocument::parse(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("INI basics") {
  const auto doc = IniDocument::parse(
      "# leading comment\n"
      "[a]\n"
      "x = 1.5   ; trailing comment\n"
      "name = two words\n"
      "flag = true\n"
      "list = 1, 2.5 ,3\n"
      "\n"
      "[b]\n"
      "n = 42\n");
  CHECK(doc.has_section("a"));
  CHECK_FALSE(doc.has_section("c"));
  CHECK(doc.get_double("a", "x", 0.0) == 1.5);
  CHECK(doc.get_string("a", "name", "") == "two words");
  CHECK(doc.get_bool("a", "flag", false));
  CHECK(doc.get_doubles("a", "list", {}) == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(doc.get_int("b", "n", 0) == 42);
  CHECK(doc.get_double("b", "missing", 7.0) == 7.0);
  CHECK(doc.find("a", "x")->line == 3);
  CHECK_NOTHROW(doc.reject_unused());
}

TEST_CASE("INI errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      const auto doc = IniDocument::parse(text);
      doc.get_double("a", "x", 0.0);
      doc.get_int("a", "n", 0);
      doc.get_bool("a", "b", false);
      doc.reject_unused();
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("[a]\nx 1\n") == 2);
  CHECK(line_of("x = 1\n") == 1);
  CHECK(line_of("[a\n") == 1);
  CHECK(line_of("[a]\n[a]\n") == 2);
  CHECK(line_of("[a]\nx = 1\nx = 2\n") == 3);
  CHECK(line_of("[a]\nx = fast\n") == 2);
  CHECK(line_of("[a]\n\nn = 1.5\n") == 3);
  CHECK(line_of("[a]\nb = maybe\n") == 2);
  CHECK(line_of("[a]\nx = 1\ntypo = 3\n") == 3);
  CHECK(line_of("[a]\nx = 1\n") == -1);
}

TEST_CASE("INI file loading") {
  const std::string path = "swingup_test_config.ini";
  {
    std::ofstream f(path, std::ios::binary);
    f << "[run]\nseed = 5\n";
  }
  const auto doc = IniDocument::load(path);
  CHECK(doc.text() == "[run]\nseed = 5\n");
  std::remove(path.c_str());
  try {
    IniDocument::load("does/not/exist.ini");
    FAIL("missing file accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("experiment config from INI") {
  const std::string text =
      "[emitter]\nmodel = four_level\nt1 = 10\nt2star = 12\n"
      "[pulse]\nshape = mask\namplitude = 0.3\n"
      "[mask]\nslit = -116.6, 40\nslit = -308, 40, 0.5, 0.1, gauss\n"
      "[super]\ndetuning_min = 200\ndetuning_max = 300\ndetuning_step = 50\namplitudes = 0, 0.5, 0.7\n"
      "[run]\nseed = 9\nworkers = 4\n";
  const auto c = ExperimentConfig::from_ini(IniDocument::parse(text));
  CHECK(c.emitter.model == "four_level");
  CHECK(c.emitter.t1 == 10.0);
  CHECK(c.pulse.shape == protocols::PulseShape::kMask);
  REQUIRE(c.pulse.slits.size() == 2);
  CHECK(c.pulse.slits[1].transmission == 0.5);
  CHECK(c.pulse.slits[1].profile == pulse::SlitProfile::kGaussian);
  CHECK(c.super.detunings == std::vector<double>{200.0, 250.0, 300.0});
  CHECK(c.super.amplitudes.size() == 3);
  CHECK(c.run.seed.value() == 9);
  CHECK(c.run.workers == 4);
  CHECK(c.source_text == text);
}

TEST_CASE("experiment config rejections") {
  CHECK(error_line("[emitter]\nmodel = three_level\n") == 2);
  CHECK(error_line("[pulse]\nshape = triangle\n") == 2);
  CHECK(error_line("[pulse]\nshape = mask\n") == 2);
  CHECK(error_line("[mask]\nslit = 1\n") == 2);
  CHECK(error_line("[super]\n\ndetunings = \n") == 3);
  CHECK(error_line("[super]\namplitude_max = 0\n") == 2);
  CHECK(error_line("[run]\nseed = -1\n") == 2);
  CHECK(error_line("[run]\nworkers = 0\n") == 2);
  CHECK(error_line("[lifetime]\nbogus = 1\n") == 2);
  // Whole-config validation has no single line.
  CHECK(error_line("[super]\ndetunings = 300, 200\n") == 0);
  CHECK(error_line("[emitter]\nt1 = 5\nt2star = 11\n") == 0);
  CHECK(error_line("[emitter]\nt1 = 16.2\n") == -1);
}

TEST_CASE("seed policy") {
  const auto c = ExperimentConfig::from_ini(IniDocument::parse("[emitter]\nt1 = 16.2\n"));
  CHECK_FALSE(c.run.seed.has_value());
  CHECK_THROWS_AS(c.require_seed(), ConfigError);
  CHECK(ExperimentConfig::defaults().require_seed() == 1);
}

TEST_CASE("default axes") {
  const auto d = protocols::default_detuning_axis();
  CHECK(d.front() == 150.0);
  CHECK(d.back() == 400.0);
  CHECK(d.size() == 51);
  const auto a = protocols::default_amplitude_axis(0.7);
  CHECK(a.size() == 21);
  CHECK(a.front() == 0.0);
  CHECK(a[1] == doctest::Approx(0.035));
  CHECK(a.back() == doctest::Approx(0.7));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
}
