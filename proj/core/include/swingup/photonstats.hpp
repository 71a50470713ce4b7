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

// Detector-level observables: fluorescence decay histograms, pulsed
// second-order correlation by quantum regression, and background mixing.

#include <cstdint>
#include <random>
#include <vector>

#include "swingup/dynamics.hpp"
#include "swingup/pulsecraft.hpp"

namespace swingup::photonstats {

struct DecayHistogram {
  std::vector<double> bin_edges;       // ns, uniform
  std::vector<std::uint64_t> counts;   // one per bin
  double irf_sigma = 0.0;              // ns
  std::uint64_t total_events = 0;

  double bin_width() const { return bin_edges[1] - bin_edges[0]; }
  std::vector<double> bin_centers() const;
  /// Mean arrival time from bin centers.
  double mean_arrival() const;
};

struct CoincidenceHistogram {
  std::vector<double> delay_edges;  // ns, symmetric about zero
  std::vector<double> counts;
  double repetition_period = 0.0;  // ns

  std::size_t bins_per_period() const;
  /// Summed counts in the +-period/2 window around delay k * period.
  double peak_area(int k) const;
};

/// Background counts per pulse: coefficient * energy + offset.
struct BackgroundModel {
  double coefficient = 0.0;  // counts per pulse per pJ
  double offset = 0.0;       // counts per pulse

  double counts_per_pulse(double energy_pj) const;
};

struct EmissionCurve {
  std::vector<double> times;      // ps
  std::vector<double> intensity;  // photons per ns
};

/// Photon emission rate sum_k gamma_k rho_uu along a trajectory.
EmissionCurve emission_curve(const dynamics::Trajectory& traj, const dynamics::EmitterModel& model);

/// Per-stream generator: independent and reproducible for each (seed, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

/// Arrival times drawn from Exp(t1) convolved with a Gaussian IRF, binned from
/// just below zero out to 20 t1. All times in ns.
DecayHistogram synthesize_decay_histogram(double t1, double irf_sigma, std::uint64_t n_events,
                                          double bin_width, std::uint64_t seed,
                                          std::uint64_t stream = 0);

struct G2Options {
  double detection_efficiency = 1.0;
  std::size_t bins_per_period = 16;
  double pulse_node_spacing = 0.1;  // ps
  std::size_t decay_nodes = 1000;
  dynamics::IntegratorOptions integrator{};
};

struct G2Result {
  double g2_zero = 0.0;      // with background
  double g2_signal = 0.0;    // emitter alone
  double center_area = 0.0;  // raw areas, background included
  std::vector<double> side_areas;  // k = 1..n_periods
  double signal_per_pulse = 0.0;
  double background_per_pulse = 0.0;
  double emission_probability = 0.0;  // photons emitted per pulse
  CoincidenceHistogram histogram;
};

/// Pulsed g2 of an emitter driven by `pulse` every rep_period ns, from the
/// periodic steady state via the quantum-regression procedure.
G2Result g2_pulsed(const dynamics::EmitterModel& model, const pulse::TemporalEnvelope& pulse,
                   double rep_period, int n_periods, const BackgroundModel& background,
                   const G2Options& options = {});

/// Measured g2(0) when Poissonian background with `background_counts` mixes
/// into `signal_counts` of light with g2 = g2_signal.
double mix_background(double g2_signal, double signal_counts, double background_counts);

/// Poisson-sampled coincidence record with `total_pairs` expected pairs.
CoincidenceHistogram sample_coincidences(const CoincidenceHistogram& expected, double total_pairs,
                                         std::uint64_t seed);

}  // namespace swingup::photonstats
