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

#include "swingup/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swingup/error.hpp"

namespace swingup::io {
namespace {

using nlohmann::ordered_json;

// JSON has no NaN or infinity; those become null.
ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

class CsvWriter {
 public:
  CsvWriter(const ordered_json& header, const std::vector<std::string>& names) {
    out_ << "# " << header.dump() << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
    out_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

ordered_json fit_json(const fit::FitResult& f) {
  ordered_json params = ordered_json::array();
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    params.push_back({{"name", f.names[i]},
                      {"unit", f.units[i]},
                      {"value", number(f.values(static_cast<Eigen::Index>(i)))},
                      {"error", number(f.error(f.names[i]))},
                      {"fixed", static_cast<bool>(f.fixed[i])}});
  }
  ordered_json cov = ordered_json::array();
  for (Eigen::Index i = 0; i < f.covariance.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < f.covariance.cols(); ++j) row.push_back(number(f.covariance(i, j)));
    cov.push_back(row);
  }
  return {{"parameters", params},
          {"covariance", cov},
          {"chi2", number(f.chi2)},
          {"reduced_chi2", number(f.reduced_chi2)},
          {"dof", f.dof},
          {"converged", f.converged},
          {"iterations", f.iterations},
          {"fit_range", {number(f.range_lower), number(f.range_upper)}},
          {"points", f.points},
          {"warnings", f.warnings}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  fail(ErrorKind::kShape, "missing column '" + name + "'");
}

bool Table::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

Table parse_csv(std::string_view text) {
  Table t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t\r"), e = item.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (t.names.empty()) {
      t.names = cells;
      t.columns.assign(cells.size(), {});
      continue;
    }
    if (cells.size() != t.names.size())
      fail(ErrorKind::kShape, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.names.size()) + " columns, got " +
                                  std::to_string(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[i].size() || cells[i].empty())
        fail(ErrorKind::kShape, "line " + std::to_string(line_no) + ": '" + cells[i] + "' is not a number");
      t.columns[i].push_back(v);
    }
  }
  if (t.names.empty()) fail(ErrorKind::kShape, "CSV has no header row");
  return t;
}

std::string spectrum_csv(const pulse::SpectralEnvelope& s) {
  CsvWriter w({{"kind", "spectrum"}, {"units", {{"detuning", "GHz"}, {"amplitude", "sqrt(pJ/GHz)"}}},
               {"energy_pj", number(s.energy())}},
              {"detuning", "re", "im", "power"});
  const auto amp = s.amplitude();
  for (std::size_t i = 0; i < amp.size(); ++i)
    w.row({s.detuning()[i], amp[i].real(), amp[i].imag(), std::norm(amp[i])});
  return w.str();
}

std::string temporal_csv(const pulse::TemporalEnvelope& p) {
  CsvWriter w({{"kind", "temporal_envelope"}, {"units", {{"time", "ps"}, {"rabi", "rad/ps"}}},
               {"coupling", number(p.coupling())}},
              {"time", "re", "im", "abs"});
  const auto r = p.rabi();
  for (std::size_t i = 0; i < r.size(); ++i) w.row({p.time()[i], r[i].real(), r[i].imag(), std::abs(r[i])});
  return w.str();
}

std::string autocorrelation_csv(const pulse::AutocorrelationTrace& a) {
  CsvWriter w({{"kind", "autocorrelation"}, {"units", {{"delay", "ps"}}}}, {"delay", "value"});
  for (std::size_t i = 0; i < a.delay.size(); ++i) w.row({a.delay[i], a.value[i]});
  return w.str();
}

std::string trajectory_csv(const dynamics::Trajectory& traj, const dynamics::EmitterModel& model) {
  std::vector<std::string> names{"time"};
  for (const auto& l : model.levels()) names.push_back("p" + l.label);
  ordered_json header{{"kind", "trajectory"}, {"units", {{"time", "ps"}}}, {"steps", traj.size()}};
  std::ostringstream out;
  out << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.times()[k]);
    const auto& rho = traj.states()[k];
    for (Eigen::Index i = 0; i < rho.rows(); ++i) out << ',' << format_number(rho(i, i).real());
    out << '\n';
  }
  return out.str();
}

std::string rabi_sweep_csv(const protocols::RabiSweep& s) {
  const bool noisy = !s.counts.empty();
  std::vector<std::string> names{"amplitude", "pulse_area", "population"};
  if (noisy) names.emplace_back("counts");
  CsvWriter w({{"kind", "rabi_sweep"}, {"units", {{"amplitude", "sqrt(pJ)"}, {"pulse_area", "rad"}}}}, names);
  for (std::size_t i = 0; i < s.amplitude.size(); ++i) {
    if (noisy) {
      w.row({s.amplitude[i], s.pulse_area[i], s.population[i], s.counts[i]});
    } else {
      w.row({s.amplitude[i], s.pulse_area[i], s.population[i]});
    }
  }
  return w.str();
}

std::string decay_histogram_csv(const photonstats::DecayHistogram& h) {
  CsvWriter w({{"kind", "decay_histogram"},
               {"units", {{"time", "ns"}}},
               {"irf_sigma", number(h.irf_sigma)},
               {"total_events", h.total_events}},
              {"bin_start", "bin_end", "counts"});
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    w.row({h.bin_edges[i], h.bin_edges[i + 1], static_cast<double>(h.counts[i])});
  return w.str();
}

std::string coincidence_histogram_csv(const photonstats::CoincidenceHistogram& h) {
  CsvWriter w({{"kind", "coincidence_histogram"},
               {"units", {{"delay", "ns"}}},
               {"repetition_period", number(h.repetition_period)}},
              {"delay_start", "delay_end", "counts"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) w.row({h.delay_edges[i], h.delay_edges[i + 1], h.counts[i]});
  return w.str();
}

std::string scan_grid_csv(const protocols::ScanGrid& g) {
  CsvWriter w({{"kind", "scan_grid"},
               {"units", {{"detuning", "GHz"}, {"amplitude", "sqrt(pJ)"}}},
               {"rows", g.amplitude.size()},
               {"cols", g.detuning.size()}},
              {"amplitude", "detuning", "inversion"});
  for (std::size_t r = 0; r < g.amplitude.size(); ++r)
    for (std::size_t c = 0; c < g.detuning.size(); ++c) w.row({g.amplitude[r], g.detuning[c], g.at(r, c)});
  return w.str();
}

std::string scan_grid_json(const protocols::ScanGrid& g) {
  ordered_json failures = ordered_json::array();
  for (const auto& f : g.failures)
    failures.push_back({{"amplitude", number(g.amplitude[f.row])}, {"detuning", number(g.detuning[f.col])},
                        {"error", f.message}});
  std::vector<ordered_json> det, amp;
  for (double d : g.detuning) det.push_back(number(d));
  for (double a : g.amplitude) amp.push_back(number(a));
  const std::size_t top = g.amplitude.size() - 1;
  const std::size_t arg = g.argmax_in_row(top);
  ordered_json j{
      {"kind", "scan_grid"},
      {"fixed_pulse",
       {{"detuning_ghz", number(g.fixed_detuning)}, {"amplitude_sqrt_pj", number(g.fixed_amplitude)},
        {"width_ghz", number(g.fixed_width)}}},
      {"scan_width_ghz", number(g.scan_width)},
      {"normalization_population", number(g.reference_population)},
      {"detuning_ghz", det},
      {"amplitude_sqrt_pj", amp},
      {"max_inversion", number(g.max_value())},
      {"top_row", {{"amplitude", number(g.amplitude[top])}, {"argmax_detuning", number(g.detuning[arg])},
                   {"inversion", number(g.at(top, arg))}}},
      {"failures", failures}};
  return j.dump(2) + "\n";
}

std::string power_extension_csv(const protocols::PowerExtension& p) {
  CsvWriter w({{"kind", "power_extension"},
               {"monotone_to_plateau", p.monotone_to_plateau},
               {"warnings", p.warnings}},
              {"multiplier", "best_detuning", "best_inversion"});
  for (std::size_t i = 0; i < p.multipliers.size(); ++i)
    w.row({p.multipliers[i], p.best_detuning[i], p.best_inversion[i]});
  return w.str();
}

std::string fit_result_json(const fit::FitResult& f) { return fit_json(f).dump(2) + "\n"; }

std::string fit_report(const fit::FitResult& f) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %18s %14s  %s\n", "parameter", "value", "error", "unit");
  out << line;
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    std::snprintf(line, sizeof line, "%-12s %18.8g %14.4g  %s%s\n", f.names[i].c_str(),
                  f.values(static_cast<Eigen::Index>(i)), f.error(f.names[i]), f.units[i].c_str(),
                  f.fixed[i] ? " (fixed)" : "");
    out << line;
  }
  std::snprintf(line, sizeof line, "chi2 %.6g  reduced %.6g  dof %zu  converged %s  range [%g, %g]\n",
                f.chi2, f.reduced_chi2, f.dof, f.converged ? "yes" : "no", f.range_lower, f.range_upper);
  out << line;
  for (const auto& w : f.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string g2_report_json(const photonstats::G2Result& r) {
  std::vector<ordered_json> sides;
  for (double s : r.side_areas) sides.push_back(number(s));
  ordered_json j{{"g2_zero", number(r.g2_zero)},
                 {"g2_signal", number(r.g2_signal)},
                 {"center_area", number(r.center_area)},
                 {"side_areas", sides},
                 {"signal_per_pulse", number(r.signal_per_pulse)},
                 {"background_per_pulse", number(r.background_per_pulse)},
                 {"emission_probability", number(r.emission_probability)},
                 {"repetition_period_ns", number(r.histogram.repetition_period)}};
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::kIo, "cannot move output into place: " + target.string());
  }
}

}  // namespace swingup::io
