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


#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "swingup/error.hpp"
#include "swingup/protocols.hpp"

using namespace swingup;
using namespace swingup::protocols;
using swingup::testing::kPi;

namespace {

ExperimentConfig noiseless() {
  auto c = ExperimentConfig::defaults();
  c.emitter.dissipation = false;
  return c;
}

// Local extrema of a sampled curve; the last sample counts when it lands on a
// full or empty rotation.
int count_extrema(const std::vector<double>& y) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if ((y[i] > y[i - 1] && y[i] >= y[i + 1]) || (y[i] < y[i - 1] && y[i] <= y[i + 1])) ++n;
  if (y.size() >= 2 && std::abs(y.back() - std::round(y.back())) < 0.01) ++n;
  return n;
}

ExperimentConfig small_scan() {
  auto c = ExperimentConfig::defaults();
  c.super.detunings = {250.0, 300.0, 345.0, 380.0};
  c.super.amplitudes = {0.0, 0.35, 0.7};
  return c;
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (std::size_t workers : {1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) {}));
}

TEST_CASE("noiseless narrowband sweep follows the Rabi law") {
  const auto sweep = run_rabi_sweep(noiseless());
  REQUIRE(sweep.amplitude.size() == 141);
  CHECK(sweep.counts.empty());
  for (std::size_t i = 0; i < sweep.amplitude.size(); ++i)
    CHECK(std::abs(sweep.population[i] - swingup::testing::rabi_population(sweep.pulse_area[i])) < 1e-6);
  CHECK(sweep.pulse_area.back() == doctest::Approx(7.0 * kPi).epsilon(1e-6));
  CHECK(count_extrema(sweep.population) == 7);
}

TEST_CASE("subpicosecond sweep reaches 6 pi at a larger energy") {
  auto c = noiseless();
  c.pulse.shape = PulseShape::kSubpicosecond;
  const double a_pi_sub = calibrate_pi(c);
  const double a_pi_nb = calibrate_pi(noiseless());
  c.sweep.amplitude_max = 6.0 * a_pi_sub;
  c.sweep.points = 61;
  const auto sweep = run_rabi_sweep(c);
  CHECK(count_extrema(sweep.population) == 6);
  const double energy_ratio = (a_pi_sub * a_pi_sub) / (a_pi_nb * a_pi_nb);
  CHECK(energy_ratio > 20.0);
  CHECK(energy_ratio < 60.0);
}

TEST_CASE("noisy sweeps are seeded") {
  auto c = ExperimentConfig::defaults();
  c.sweep.counts_per_inversion = 1000.0;
  c.sweep.points = 31;
  const auto a = run_rabi_sweep(c);
  const auto b = run_rabi_sweep(c);
  REQUIRE(a.counts.size() == 31);
  CHECK(a.counts == b.counts);
  c.run.seed = 2;
  CHECK(run_rabi_sweep(c).counts != a.counts);
  c.run.seed.reset();
  CHECK_THROWS_AS(run_rabi_sweep(c), ConfigError);
}

TEST_CASE("pi calibration on analytic curves") {
  for (double kappa : {15.0, 30.0}) {
    const auto curve = [kappa](double a) { return std::pow(std::sin(0.5 * kappa * a), 2); };
    CHECK(calibrate_pi(curve, 0.5, 21) == doctest::Approx(kPi / kappa).epsilon(1e-6));
  }
  CHECK(calibrate_pi([](double a) { return std::pow(std::sin(15.0 * a), 2); }, 1.0, 41) * 2.0 ==
        doctest::Approx(calibrate_pi([](double a) { return std::pow(std::sin(7.5 * a), 2); }, 1.0, 41)).epsilon(1e-6));
  try {
    calibrate_pi([](double a) { return a; }, 1.0, 21);
    FAIL("monotone curve calibrated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCalibration);
  }
}

TEST_CASE("configured pi amplitude matches the calibration") {
  CHECK(calibrate_pi(noiseless()) == doctest::Approx(pulse::kReferencePiAmplitude).epsilon(1e-6));
  CHECK(reference_population(noiseless()) == doctest::Approx(1.0).epsilon(1e-6));
  const double ref = reference_population(ExperimentConfig::defaults());
  CHECK(ref > 0.99);
  CHECK(ref < 1.0);
}

TEST_CASE("two-color scan on a small grid") {
  const auto g = run_super_scan(small_scan());
  REQUIRE(g.inversion.size() == 12);
  CHECK(g.failures.empty());
  for (std::size_t c = 0; c < 4; ++c) CHECK(g.at(0, c) < 0.01);
  for (double v : g.inversion) {
    CHECK(v >= -1e-6);
    CHECK(v <= 1.0 + 1e-6);
  }
  const std::size_t best = g.argmax_in_row(2);
  CHECK(g.detuning[best] >= 250.0);
  CHECK(g.detuning[best] <= 350.0);
  CHECK(g.at(2, best) == doctest::Approx(0.54).epsilon(0.2));
  CHECK(g.max_value() == g.at(2, best));
}

TEST_CASE("scan results do not depend on worker count") {
  auto c = small_scan();
  const auto a = run_super_scan(c);
  c.run.workers = 4;
  const auto b = run_super_scan(c);
  REQUIRE(a.inversion.size() == b.inversion.size());
  for (std::size_t i = 0; i < a.inversion.size(); ++i) CHECK(a.inversion[i] == b.inversion[i]);
}

TEST_CASE("single colors barely excite") {
  const auto c = small_scan();
  const double fixed = run_single_pulse_control(c, SuperColor::kFixed);
  const double scanned = run_single_pulse_control(c, SuperColor::kScanned);
  CHECK(fixed < 0.05);
  CHECK(scanned < 0.05);
  // Sanity bound: a detuned drive cannot exceed Omega^2 / (Omega^2 + Delta^2).
  const auto field = design_pulse(c.pulse, 1.0);
  (void)field;
  const double super_best = run_super_scan(c).max_value();
  CHECK(super_best >= 10.0 * std::max(fixed, scanned));
  auto zero = c;
  zero.super.fixed_amplitude = 0.0;
  CHECK(run_single_pulse_control(zero, SuperColor::kFixed) == 0.0);
}

TEST_CASE("fixed color obeys the detuned Rabi bound") {
  const auto c = ExperimentConfig::defaults();
  auto single = c;
  single.pulse.shape = PulseShape::kMask;
  single.pulse.slits = {pulse::Slit{c.super.fixed_detuning, c.super.fixed_width, 1.0, 0.0, pulse::SlitProfile::kGaussian, 0.0}};
  const auto p = design_pulse(single.pulse, c.super.fixed_amplitude);
  const double bound = swingup::testing::detuned_rabi_bound(p.peak(), ghz_to_rad_per_ps(c.super.fixed_detuning));
  CHECK(run_single_pulse_control(c, SuperColor::kFixed) * reference_population(c) <= bound);
}

TEST_CASE("power extension at multiplier 1 matches the scan") {
  auto c = ExperimentConfig::defaults();
  c.super.amplitudes = {0.0, 0.7};
  c.super.detunings = default_detuning_axis();
  const auto ext = run_super_power_extension(c, {1.0});
  auto row = c;
  row.super.amplitudes = {0.7};
  const auto g = run_super_scan(row);
  CHECK(ext.best_inversion[0] >= g.max_value() - 1e-9);
  CHECK(ext.best_inversion[0] == doctest::Approx(g.max_value()).epsilon(0.01));
  CHECK(ext.best_detuning[0] == doctest::Approx(g.detuning[g.argmax_in_row(0)]).epsilon(0.03));
  CHECK_THROWS_AS(run_super_power_extension(c, {0.5}), Error);
  CHECK_THROWS_AS(run_super_power_extension(c, {}), Error);
}

TEST_CASE("lifetime experiment") {
  const auto c = ExperimentConfig::defaults();
  const auto a = run_lifetime_experiment(c);
  REQUIRE(a.fit.has_value());
  CHECK_FALSE(a.flagged);
  CHECK(a.fit->value("t1") == doctest::Approx(16.2).epsilon(0.02));
  const auto b = run_lifetime_experiment(c);
  CHECK(a.histogram.counts == b.histogram.counts);
  CHECK(a.fit->values == b.fit->values);

  auto two_pi = c;
  two_pi.pulse.amplitude = 2.0 * pulse::kReferencePiAmplitude;
  const auto e = run_lifetime_experiment(two_pi);
  CHECK(e.flagged);
  CHECK_FALSE(e.fit.has_value());
  CHECK_FALSE(e.note.empty());
}

TEST_CASE("quasi-CW experiment recovers the configured dephasing") {
  const auto q = run_quasi_cw_experiment(ExperimentConfig::defaults());
  CHECK(q.times.size() == 251);
  CHECK(q.fit.value("t2star") == doctest::Approx(10.9).epsilon(0.05));
}

TEST_CASE("model construction") {
  EmitterConfig e;
  CHECK(build_model(e).dimension() == 2);
  e.model = "four_level";
  CHECK(build_model(e).dimension() == 4);
  e.dissipation = false;
  CHECK(std::isinf(build_model(e).t1()));
}
