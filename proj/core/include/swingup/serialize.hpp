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

// Text artifacts: CSV tables with a one-line JSON header, JSON reports and
// SVG heatmaps. Numbers are written with 12 significant digits so identical
// results give identical bytes.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "swingup/dynamics.hpp"
#include "swingup/estimators.hpp"
#include "swingup/photonstats.hpp"
#include "swingup/protocols.hpp"
#include "swingup/pulsecraft.hpp"

namespace swingup::io {

std::string format_number(double v);

/// Numeric table parsed from CSV; '#' lines are skipped, the first other line names the columns.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Column by name; throws kShape if absent.
  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
};

Table parse_csv(std::string_view text);

std::string spectrum_csv(const pulse::SpectralEnvelope& s);
std::string temporal_csv(const pulse::TemporalEnvelope& p);
std::string autocorrelation_csv(const pulse::AutocorrelationTrace& a);
std::string trajectory_csv(const dynamics::Trajectory& traj, const dynamics::EmitterModel& model);
std::string rabi_sweep_csv(const protocols::RabiSweep& sweep);
std::string decay_histogram_csv(const photonstats::DecayHistogram& h);
std::string coincidence_histogram_csv(const photonstats::CoincidenceHistogram& h);
std::string scan_grid_csv(const protocols::ScanGrid& g);
std::string scan_grid_json(const protocols::ScanGrid& g);
std::string power_extension_csv(const protocols::PowerExtension& p);

std::string fit_result_json(const fit::FitResult& f);
/// Fixed-width parameter table for terminals.
std::string fit_report(const fit::FitResult& f);
std::string g2_report_json(const photonstats::G2Result& r);

/// Detuning x amplitude heatmap of the normalized inversion on a 0..1 scale.
std::string heatmap_svg(const protocols::ScanGrid& g);
/// 8-bit RGB of the embedded 256-step perceptual colormap at t in [0, 1].
std::array<int, 3> colormap(double t);

/// Writes through a temporary sibling file and renames, so readers never see
/// a partial file.
void write_file(const std::string& path, std::string_view content);

}  // namespace swingup::io
