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

// Fit models for Rabi sweeps, lifetime histograms and quasi-CW Rabi traces.

#include <span>
#include <vector>

#include "swingup/nlls.hpp"
#include "swingup/photonstats.hpp"

namespace swingup::estimators {

using fit::FitResult;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Damped Rabi curve with a background linear in pulse energy a^2:
///   I(a) = A exp(-gamma a) sin^2(kappa a / 2) + c a^2 + b.
/// Parameter order: amplitude, kappa, gamma, background, offset.
double damped_rabi_model(double a, std::span<const double> params);

struct RabiFitOptions {
  /// Per-point sigma; empty selects Poisson weights sqrt(max(counts, 1)).
  std::vector<double> sigma;
  bool trim = true;
  /// Drop high-amplitude points while reduced chi-square improves by more than this fraction.
  double trim_improvement = 0.05;
  std::size_t min_points = 10;
  fit::FitOptions solver{};
};

/// Fit over a sweep of field amplitudes (sqrt(pJ)). The damping amplitude
/// a_d = 1/gamma is infinite for an undamped fit.
FitResult fit_damped_rabi(std::span<const double> amplitude, std::span<const double> counts,
                          const RabiFitOptions& options = {});

/// Contrast envelope at the pi amplitude: F = exp(-pi gamma / kappa).
Estimate estimate_inversion_fidelity(const FitResult& rabi_fit);

struct LifetimeFitOptions {
  double t1_guess = 0.0;  // ns; 0 = histogram mean
  fit::FitOptions solver{};
};

/// Binned Poisson-likelihood fit of an exponential decay convolved with the
/// Gaussian IRF of the histogram. Parameters: amplitude, t1, t0, background.
FitResult fit_lifetime(const photonstats::DecayHistogram& hist,
                       const LifetimeFitOptions& options = {});

/// Expected fraction of events in [a, b) for an exponential decay (tau) that
/// starts at t0 and is blurred by a Gaussian of width sigma.
double emg_interval_probability(double a, double b, double tau, double t0, double sigma);

struct QuasiCwFitOptions {
  /// Per-point sigma; empty means unit weights with the covariance scaled by
  /// the reduced chi-square.
  std::vector<double> sigma;
  /// Data are photon counts: fit a scale and an offset on top of P_e.
  bool counts = false;
  bool fix_t1 = true;
  double t1 = 16.2;  // ns
  fit::FitOptions solver{};
};

/// Excited population of a resonantly driven two-level emitter from the
/// Bloch equations; rabi in rad/ns, times in ns.
std::vector<double> bloch_excited_population(std::span<const double> times, double rabi,
                                             double t1, double t2star);

/// Fit of a trace (times in ns) to the Bloch-equation solution.
/// Parameters: rabi (rad/ns), t1, t2star, scale, offset.
FitResult fit_quasi_cw(std::span<const double> times, std::span<const double> values,
                       const QuasiCwFitOptions& options = {});

/// I(pi) / I(2 pi).
double visibility(double i_pi, double i_2pi);

}  // namespace swingup::estimators
