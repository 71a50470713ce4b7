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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "swingup/error.hpp"
#include "swingup/serialize.hpp"

using namespace swingup;
using namespace swingup::io;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

protocols::ScanGrid small_grid() {
  protocols::ScanGrid g;
  g.detuning = {250, 300, 350};
  g.amplitude = {0.0, 0.5};
  g.inversion = {0.0, 0.01, 0.02, 0.3, 0.6, kNaN};
  g.reference_population = 0.997;
  g.fixed_detuning = -240;
  g.fixed_amplitude = 0.7;
  g.fixed_width = 60;
  g.scan_width = 60;
  g.failures.push_back({1, 2, "step size underflow"});
  return g;
}

fit::FitResult small_fit() {
  fit::FitResult f;
  f.names = {"t1", "background"};
  f.units = {"ns", "counts"};
  f.values = Eigen::Vector2d(16.2, 3.0);
  f.covariance = Eigen::Matrix2d::Zero();
  f.covariance(0, 0) = 0.04;
  f.fixed = {false, true};
  f.chi2 = 101.5;
  f.reduced_chi2 = 1.015;
  f.dof = 100;
  f.converged = true;
  f.range_lower = 0.5;
  f.range_upper = 80.0;
  f.points = 102;
  f.warnings = {"tail trimmed"};
  return f;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("swingup_serialize_" + name)).string();
}

}  // namespace

TEST_CASE("numbers use twelve significant digits") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(kNaN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("csv parser reads headers, comments and numbers") {
  const auto t = parse_csv("# {\"kind\":\"x\"}\n\na, b\n1,2.5\n\n# mid\n-3 ,4e2\n");
  REQUIRE(t.names == std::vector<std::string>{"a", "b"});
  CHECK(t.rows() == 2);
  CHECK(t.column("a") == std::vector<double>{1, -3});
  CHECK(t.column("b") == std::vector<double>{2.5, 400});
  CHECK(t.has("b"));
  CHECK_FALSE(t.has("c"));
}

TEST_CASE("csv parser rejects malformed tables") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_csv(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  CHECK(kind_of("a,b\n1,2,3\n") == ErrorKind::kShape);
  CHECK(kind_of("a,b\n1,x\n") == ErrorKind::kShape);
  CHECK(kind_of("a,b\n1,\n") == ErrorKind::kShape);
  CHECK(kind_of("# only comments\n") == ErrorKind::kShape);
  CHECK_THROWS_AS(parse_csv("a\n1\n").column("z"), Error);
  try {
    parse_csv("a,b\n1,2\n1,2,3\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("csv writers emit a json header and round trip") {
  pulse::AutocorrelationTrace a{UniformGrid(-1.0, 0.5, 5), {0.2, 0.6, 1.0, 0.6, 0.2}};
  const auto text = autocorrelation_csv(a);
  const auto header = nlohmann::json::parse(first_line(text).substr(2));
  CHECK(header["kind"] == "autocorrelation");
  CHECK(header["units"]["delay"] == "ps");
  const auto t = parse_csv(text);
  CHECK(t.names == std::vector<std::string>{"delay", "value"});
  CHECK(t.column("delay") == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(t.column("value") == a.value);
}

TEST_CASE("spectrum csv carries power and energy") {
  std::vector<cplx> amp{{0.0, 0.0}, {1.0, 1.0}, {0.5, 0.0}};
  const pulse::SpectralEnvelope s(UniformGrid(-1.0, 1.0, 3), amp);
  const auto text = spectrum_csv(s);
  const auto header = nlohmann::json::parse(first_line(text).substr(2));
  CHECK(header["energy_pj"].get<double>() == doctest::Approx(s.energy()).epsilon(1e-11));
  const auto t = parse_csv(text);
  CHECK(t.column("power") == std::vector<double>{0.0, 2.0, 0.25});
  CHECK(t.column("im") == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("histogram csv rows pair edges with counts") {
  photonstats::DecayHistogram h;
  h.bin_edges = {0.0, 1.0, 2.0};
  h.counts = {7, 3};
  h.irf_sigma = 0.05;
  h.total_events = 10;
  const auto t = parse_csv(decay_histogram_csv(h));
  CHECK(t.column("bin_start") == std::vector<double>{0.0, 1.0});
  CHECK(t.column("bin_end") == std::vector<double>{1.0, 2.0});
  CHECK(t.column("counts") == std::vector<double>{7, 3});

  photonstats::CoincidenceHistogram c;
  c.delay_edges = {-1.0, 0.0, 1.0};
  c.counts = {0.25, 0.75};
  c.repetition_period = 2.0;
  const auto text = coincidence_histogram_csv(c);
  CHECK(nlohmann::json::parse(first_line(text).substr(2))["repetition_period"] == 2.0);
  CHECK(parse_csv(text).column("counts") == c.counts);
}

TEST_CASE("scan grid csv is long format in row-major order") {
  const auto g = small_grid();
  const auto text = scan_grid_csv(g);
  const auto header = nlohmann::json::parse(first_line(text).substr(2));
  CHECK(header["rows"] == 2);
  CHECK(header["cols"] == 3);
  const auto t = parse_csv(text);
  REQUIRE(t.rows() == 6);
  CHECK(t.column("amplitude") == std::vector<double>{0, 0, 0, 0.5, 0.5, 0.5});
  CHECK(t.column("detuning") == std::vector<double>{250, 300, 350, 250, 300, 350});
  CHECK(t.column("inversion")[4] == 0.6);
  CHECK(std::isnan(t.column("inversion")[5]));
}

TEST_CASE("scan grid json reports the top row and failures") {
  const auto j = nlohmann::json::parse(scan_grid_json(small_grid()));
  CHECK(j["kind"] == "scan_grid");
  CHECK(j["fixed_pulse"]["detuning_ghz"] == -240.0);
  CHECK(j["normalization_population"] == 0.997);
  CHECK(j["detuning_ghz"].size() == 3);
  CHECK(j["max_inversion"] == 0.6);
  CHECK(j["top_row"]["amplitude"] == 0.5);
  CHECK(j["top_row"]["argmax_detuning"] == 300.0);
  CHECK(j["top_row"]["inversion"] == 0.6);
  REQUIRE(j["failures"].size() == 1);
  CHECK(j["failures"][0]["detuning"] == 350.0);
  CHECK(j["failures"][0]["error"] == "step size underflow");
}

TEST_CASE("fit json lists parameters, covariance and warnings") {
  const auto j = nlohmann::json::parse(fit_result_json(small_fit()));
  REQUIRE(j["parameters"].size() == 2);
  CHECK(j["parameters"][0]["name"] == "t1");
  CHECK(j["parameters"][0]["value"] == 16.2);
  CHECK(j["parameters"][0]["error"].get<double>() == doctest::Approx(0.2));
  CHECK(j["parameters"][1]["fixed"] == true);
  CHECK(j["covariance"][0][0] == 0.04);
  CHECK(j["dof"] == 100);
  CHECK(j["fit_range"][1] == 80.0);
  CHECK(j["warnings"][0] == "tail trimmed");
}

TEST_CASE("fit report is a fixed-width table") {
  const auto text = fit_report(small_fit());
  std::istringstream in(text);
  std::string header, t1, bg;
  std::getline(in, header);
  std::getline(in, t1);
  std::getline(in, bg);
  CHECK(header.find("parameter") == 0);
  CHECK(t1.find("t1") == 0);
  CHECK(t1.find("16.2") != std::string::npos);
  CHECK(bg.find("(fixed)") != std::string::npos);
  CHECK(text.find("warning: tail trimmed") != std::string::npos);
}

TEST_CASE("g2 json maps non-finite values to null") {
  photonstats::G2Result r;
  r.g2_zero = 0.002;
  r.g2_signal = kNaN;
  r.side_areas = {1.0, 1.0};
  r.histogram.repetition_period = 200.0;
  const auto j = nlohmann::json::parse(g2_report_json(r));
  CHECK(j["g2_zero"] == 0.002);
  CHECK(j["g2_signal"].is_null());
  CHECK(j["side_areas"].size() == 2);
  CHECK(j["repetition_period_ns"] == 200.0);
}

TEST_CASE("colormap spans the viridis endpoints") {
  // The polynomial fit is good to a few 8-bit levels.
  const auto lo = colormap(0.0), hi = colormap(1.0);
  CHECK(std::abs(lo[0] - 68) <= 5);
  CHECK(std::abs(lo[1] - 1) <= 5);
  CHECK(std::abs(lo[2] - 84) <= 5);
  CHECK(std::abs(hi[0] - 253) <= 5);
  CHECK(std::abs(hi[1] - 231) <= 5);
  CHECK(std::abs(hi[2] - 37) <= 5);
  CHECK(colormap(2.0) == hi);
  CHECK(colormap(kNaN) == lo);
  // Green rises monotonically along the scale.
  for (int k = 1; k <= 255; ++k) CHECK(colormap(k / 255.0)[1] >= colormap((k - 1) / 255.0)[1]);
}

TEST_CASE("heatmap svg has one cell per grid point") {
  const auto svg = heatmap_svg(small_grid());
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("width=\"800\" height=\"470\"") != std::string::npos);
  CHECK(svg.find("#ff00ff") != std::string::npos);
  CHECK(svg.rfind("</svg>") != std::string::npos);
  std::size_t cells = 0;
  for (auto pos = svg.find("<rect x="); pos != std::string::npos; pos = svg.find("<rect x=", pos + 1)) ++cells;
  CHECK(cells >= 6);
}

TEST_CASE("write_file replaces content and leaves no temporary") {
  const auto path = temp_path("out.txt");
  write_file(path, "first\n");
  write_file(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
  try {
    write_file("/nonexistent-dir/x/out.txt", "x");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}
