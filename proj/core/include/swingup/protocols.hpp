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

// Simulated experiments: Rabi sweeps, the two-color swing-up scan and its
// controls, lifetime, quasi-CW and g2 runs, all driven by one config.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swingup/config.hpp"
#include "swingup/dynamics.hpp"
#include "swingup/estimators.hpp"
#include "swingup/photonstats.hpp"
#include "swingup/pulsecraft.hpp"

namespace swingup::protocols {

enum class PulseShape { kSource, kNarrowband, kSubpicosecond, kMask };

struct EmitterConfig {
  std::string model = "two_level";  // or four_level
  double t1 = dynamics::kPaperT1Ns;
  double t2star = dynamics::kPaperT2StarNs;
  bool dissipation = true;
  dynamics::FourLevelParams four_level{};
};

struct PulseConfig {
  PulseShape shape = PulseShape::kNarrowband;
  double center = 0.0;  // GHz
  double width = 0.0;   // GHz; 0 = default of the shape
  double edge_sigma = pulse::kDefaultEdgeSigmaGhz;
  std::vector<pulse::Slit> slits;  // PulseShape::kMask only
  pulse::DispersionSpec dispersion{};
  pulse::GridOptions grid{};
  double source_fwhm = pulse::kSourceFwhmGhz;
  double pi_amplitude = pulse::kReferencePiAmplitude;  // sqrt(pJ), defines the coupling
  double amplitude = pulse::kReferencePiAmplitude;     // sqrt(pJ), single-pulse runs
};

struct SweepConfig {
  double amplitude_max = 7.0 * pulse::kReferencePiAmplitude;  // sqrt(pJ)
  std::size_t points = 141;
  double counts_per_inversion = 0.0;  // 0 = noiseless
};

struct SuperConfig {
  double fixed_detuning = -116.6;  // GHz, signed
  double fixed_amplitude = 7.0 * pulse::kReferencePiAmplitude;
  double fixed_width = pulse::kNarrowbandFwhmGhz;
  double scan_width = pulse::kNarrowbandFwhmGhz;
  bool red_detuned = true;      // scanned color sits at -|detuning|
  std::vector<double> detunings;   // GHz magnitudes, strictly increasing
  std::vector<double> amplitudes;  // sqrt(pJ), strictly increasing
  std::vector<double> multipliers{1.0, 1.5, 2.0, 3.0};
  double extension_step = 10.0;  // GHz, coarse detuning step of the power extension
};

struct LifetimeConfig {
  double irf_sigma = 0.35;  // ns
  std::uint64_t events = 1'000'000;  // detected events at full inversion
  double bin_width = 0.05;  // ns
};

struct QuasiCwConfig {
  double rabi = 1.2566370614359172;  // rad/ns
  double duration = 25.0;            // ns
  std::size_t samples = 251;
};

struct G2Config {
  double rep_period = 200.0;  // ns
  int periods = 10;
  double detection_efficiency = 1.0;
  std::size_t decay_nodes = 1000;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string output_dir = "out";
};

struct ExperimentConfig {
  EmitterConfig emitter;
  PulseConfig pulse;
  SweepConfig sweep;
  SuperConfig super;
  photonstats::BackgroundModel background;
  LifetimeConfig lifetime;
  QuasiCwConfig quasi_cw;
  G2Config g2;
  RunConfig run;
  std::string source_text;  // exact config bytes, empty for programmatic configs

  /// Paper-scale defaults with seed 1.
  static ExperimentConfig defaults();
  static ExperimentConfig from_ini(const config::IniDocument& doc);
  static ExperimentConfig load(const std::string& path);
  /// ConfigError unless the axes are strictly monotone and values are in range.
  void validate() const;
  std::uint64_t require_seed() const;
};

/// Default SUPER axes: detuning 150..400 GHz in 5 GHz steps; a zero row plus
/// 20 log-spaced amplitudes from 5% of `max_amplitude` up to it.
std::vector<double> default_detuning_axis();
std::vector<double> default_amplitude_axis(double max_amplitude);

dynamics::EmitterModel build_model(const EmitterConfig& cfg);
pulse::Calibration calibration(const PulseConfig& cfg);
/// Carved spectrum scaled to field amplitude (sqrt of pulse energy).
pulse::SpectralEnvelope carve(const PulseConfig& cfg, double amplitude);
pulse::TemporalEnvelope design_pulse(const PulseConfig& cfg, double amplitude);

/// Populates `fn(i)` for i in [0, n) across `workers` threads. Results must be
/// written by index; completion order does not matter.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct RabiSweep {
  std::vector<double> amplitude;   // sqrt(pJ)
  std::vector<double> pulse_area;  // rad
  std::vector<double> population;  // excited population after the pulse
  std::vector<double> counts;      // empty when noiseless
};

RabiSweep run_rabi_sweep(const ExperimentConfig& cfg);

/// First maximum of curve(a) on a uniform grid of `points` over (0, a_max],
/// refined by iterated parabolic interpolation.
double calibrate_pi(const std::function<double(double)>& curve, double a_max, std::size_t points);
/// a_pi of the configured pulse shape.
double calibrate_pi(const ExperimentConfig& cfg);

/// Excited population after the narrowband resonant pi pulse, the scan normalization.
double reference_population(const ExperimentConfig& cfg);

struct PointFailure {
  std::size_t row = 0;
  std::size_t col = 0;
  std::string message;
};

struct ScanGrid {
  std::vector<double> detuning;   // GHz magnitudes (columns)
  std::vector<double> amplitude;  // sqrt(pJ) of the scanned color (rows)
  std::vector<double> inversion;  // row-major, population / reference; NaN on failure
  double reference_population = 1.0;
  double fixed_detuning = 0.0;
  double fixed_amplitude = 0.0;
  double fixed_width = 0.0;
  double scan_width = 0.0;
  std::vector<PointFailure> failures;

  double at(std::size_t row, std::size_t col) const { return inversion[row * detuning.size() + col]; }
  /// Column of the largest value in a row.
  std::size_t argmax_in_row(std::size_t row) const;
  double max_value() const;
};

ScanGrid run_super_scan(const ExperimentConfig& cfg);

enum class SuperColor { kFixed, kScanned };

/// Largest normalized inversion over the scan grid with only one color.
double run_single_pulse_control(const ExperimentConfig& cfg, SuperColor enabled);

struct PowerExtension {
  std::vector<double> multipliers;
  std::vector<double> best_inversion;
  std::vector<double> best_detuning;  // GHz magnitude
  bool monotone_to_plateau = true;
  std::vector<std::string> warnings;
};

/// Both colors scaled by each multiplier; the scanned detuning is re-optimized
/// on a coarse grid then refined around its best point.
PowerExtension run_super_power_extension(const ExperimentConfig& cfg,
                                         const std::vector<double>& multipliers);

struct LifetimeExperiment {
  double excited_population = 0.0;
  photonstats::DecayHistogram histogram;
  std::optional<fit::FitResult> fit;
  bool flagged = false;  // too few events to fit
  std::string note;
};

LifetimeExperiment run_lifetime_experiment(const ExperimentConfig& cfg);

struct QuasiCwExperiment {
  std::vector<double> times;       // ns
  std::vector<double> population;  // excited population
  fit::FitResult fit;
};

QuasiCwExperiment run_quasi_cw_experiment(const ExperimentConfig& cfg);

photonstats::G2Result run_g2_experiment(const ExperimentConfig& cfg);

}  // namespace swingup::protocols
