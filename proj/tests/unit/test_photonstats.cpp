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


#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "swingup/dynamics.hpp"
#include "swingup/error.hpp"
#include "swingup/photonstats.hpp"
#include "swingup/pulsecraft.hpp"

using namespace swingup;
using namespace swingup::photonstats;

namespace {

pulse::TemporalEnvelope narrowband_pulse(double amplitude) {
  const auto s = pulse::apply_mask(pulse::gaussian_source(pulse::kSourceFwhmGhz, 0.0, 1.0), pulse::narrowband_mask());
  return pulse::to_time(s.with_energy(amplitude * amplitude));
}

EmissionCurve driven_emission(double amplitude) {
  const auto m = dynamics::EmitterModel::two_level(16.2, 10.9);
  const auto p = narrowband_pulse(amplitude);
  const auto traj = dynamics::evolve_drive(
      m, dynamics::ground_state(m), [&](double t) { return p.rabi_at(t); }, -60.0, 2000.0);
  return emission_curve(traj, m);
}

}  // namespace

TEST_CASE("free decay emission is exponential") {
  const auto m = dynamics::EmitterModel::two_level(16.2);
  const auto traj = dynamics::free_decay(m, dynamics::pure_state(m, 1), 40.0);
  const auto c = emission_curve(traj, m);
  REQUIRE(c.times.size() == traj.size());
  for (std::size_t i = 0; i < c.times.size(); ++i)
    CHECK(c.intensity[i] == doctest::Approx(std::exp(-c.times[i] / 1e3 / 16.2) / 16.2).epsilon(1e-8));
}

TEST_CASE("pi pulse emission peaks at the end of the pulse") {
  const auto c = driven_emission(pulse::kReferencePiAmplitude);
  const auto it = std::max_element(c.intensity.begin(), c.intensity.end());
  const double t_peak = c.times[static_cast<std::size_t>(it - c.intensity.begin())];
  CHECK(t_peak > 0.0);
  CHECK(t_peak < 30.0);
  CHECK(*it == doctest::Approx(1.0 / 16.2).epsilon(0.01));
}

TEST_CASE("2 pi pulse leaves almost no emission") {
  const auto c = driven_emission(2.0 * pulse::kReferencePiAmplitude);
  double late = 0.0;
  for (std::size_t i = 0; i < c.times.size(); ++i)
    if (c.times[i] > 40.0) late = std::max(late, c.intensity[i]);
  CHECK(late < 0.01 / 16.2);
}

TEST_CASE("decay histogram statistics") {
  const auto h = synthesize_decay_histogram(16.2, 0.0, 1'000'000, 0.05, 3);
  CHECK(h.bin_edges.front() == 0.0);
  CHECK(h.counts.size() + 1 == h.bin_edges.size());
  CHECK(h.bin_width() == doctest::Approx(0.05));
  CHECK(h.total_events <= 1'000'000);
  CHECK(h.total_events > 999'990);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) == h.total_events);
  // Bin-center mean of an exponential: T1 up to the binning correction and sampling noise.
  CHECK(std::abs(h.mean_arrival() - 16.2) < 4.0 * 16.2 / 1000.0);
  const auto with_irf = synthesize_decay_histogram(16.2, 0.35, 100'000, 0.05, 3);
  CHECK(with_irf.bin_edges.front() < -6.0 * 0.35 + 1e-12);
  CHECK(with_irf.irf_sigma == 0.35);
}

TEST_CASE("decay histograms are reproducible per seed and stream") {
  const auto a = synthesize_decay_histogram(16.2, 0.35, 50'000, 0.05, 9);
  const auto b = synthesize_decay_histogram(16.2, 0.35, 50'000, 0.05, 9);
  const auto c = synthesize_decay_histogram(16.2, 0.35, 50'000, 0.05, 9, 1);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  CHECK_THROWS_AS(synthesize_decay_histogram(0.0, 0.35, 10, 0.05, 1), Error);
  CHECK_THROWS_AS(synthesize_decay_histogram(16.2, -1.0, 10, 0.05, 1), Error);
  CHECK_THROWS_AS(synthesize_decay_histogram(16.2, 0.35, 10, 0.0, 1), Error);
}

TEST_CASE("background mixing closed forms") {
  CHECK(mix_background(0.02, 5.0, 0.0) == doctest::Approx(0.02));
  CHECK(mix_background(0.0, 0.0, 3.0) == doctest::Approx(1.0));
  CHECK(mix_background(0.0, 1.0, 1.0) == doctest::Approx(0.75));
  // Signal fraction rho with an ideal source gives 1 - rho^2.
  for (double rho : {0.949, 0.632}) CHECK(mix_background(0.0, rho, 1.0 - rho) == doctest::Approx(1.0 - rho * rho));
  CHECK(mix_background(0.0, 0.949, 0.051) == doctest::Approx(0.10).epsilon(0.02));
  CHECK(mix_background(0.0, 0.632, 0.368) == doctest::Approx(0.60).epsilon(0.02));
  CHECK_THROWS_AS(mix_background(0.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(mix_background(0.0, -1.0, 1.0), Error);
}

TEST_CASE("background model") {
  const BackgroundModel b{2.0, 0.5};
  CHECK(b.counts_per_pulse(0.25) == doctest::Approx(1.0));
}

TEST_CASE("pulsed g2 of an ideal emitter and with background") {
  const auto m = dynamics::EmitterModel::two_level(16.2, 10.9);
  const auto p = narrowband_pulse(pulse::kReferencePiAmplitude);
  const auto ideal = g2_pulsed(m, p, 200.0, 4, {});
  CHECK(ideal.g2_zero < 0.01);
  CHECK(ideal.g2_zero == ideal.g2_signal);
  CHECK(ideal.emission_probability == doctest::Approx(0.997).epsilon(0.01));
  REQUIRE(ideal.side_areas.size() == 4);
  // Decay tails leak across the +-T/2 windows: the first side peak hands
  // about exp(-T/2T1)/2 of its pairs to the center peak, the others balance.
  for (std::size_t k = 2; k < 4; ++k) CHECK(ideal.side_areas[k] == doctest::Approx(ideal.side_areas[1]).epsilon(1e-6));
  const double leak = 0.5 * std::exp(-100.0 / 16.2) * ideal.side_areas[1];
  CHECK(ideal.side_areas[1] - ideal.side_areas[0] == doctest::Approx(leak).epsilon(0.02));
  CHECK(ideal.histogram.bins_per_period() == 16);
  CHECK(ideal.histogram.peak_area(0) == doctest::Approx(ideal.center_area));

  const double s = ideal.signal_per_pulse;
  const double rho = 0.949;
  const auto mixed = g2_pulsed(m, p, 200.0, 4, BackgroundModel{0.0, s * (1.0 - rho) / rho});
  CHECK(mixed.g2_signal == doctest::Approx(ideal.g2_signal).epsilon(1e-9));
  CHECK(mixed.g2_zero == doctest::Approx(mix_background(ideal.g2_signal, s, mixed.background_per_pulse)).epsilon(0.02));
  CHECK(mixed.g2_zero == doctest::Approx(0.10).epsilon(0.05));

  CHECK_THROWS_AS(g2_pulsed(m, p, 200.0, 0, {}), Error);
  CHECK_THROWS_AS(g2_pulsed(m, p, 200.0, 4, BackgroundModel{-1.0, 0.0}), Error);
}

TEST_CASE("sampled coincidences") {
  CoincidenceHistogram e;
  e.repetition_period = 10.0;
  for (int i = 0; i <= 48; ++i) e.delay_edges.push_back(-15.0 + 30.0 * i / 48.0);
  e.counts.assign(48, 1.0);
  CHECK(e.bins_per_period() == 16);
  CHECK(e.peak_area(-1) == doctest::Approx(16.0));
  const auto a = sample_coincidences(e, 48'000.0, 5);
  const auto b = sample_coincidences(e, 48'000.0, 5);
  CHECK(a.counts == b.counts);
  const double total = std::accumulate(a.counts.begin(), a.counts.end(), 0.0);
  CHECK(std::abs(total - 48'000.0) < 5.0 * std::sqrt(48'000.0));
  CHECK_THROWS_AS(sample_coincidences(e, 0.0, 5), Error);
}

TEST_CASE("stream generators are independent") {
  auto a = make_rng(1, 0);
  auto b = make_rng(1, 1);
  auto c = make_rng(1, 0);
  const auto x = a();
  CHECK(x != b());
  CHECK(x == c());
}
