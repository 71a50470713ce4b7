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
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "swingup/dynamics.hpp"
#include "swingup/estimators.hpp"
#include "swingup/photonstats.hpp"
#include "swingup/protocols.hpp"
#include "swingup/pulsecraft.hpp"

using namespace swingup;

namespace {

pulse::SpectralEnvelope narrowband(double amplitude) {
  return pulse::apply_mask(pulse::gaussian_source(pulse::kSourceFwhmGhz, 0.0, 1.0), pulse::narrowband_mask())
      .with_energy(amplitude * amplitude);
}

void BM_ToTime(benchmark::State& state) {
  pulse::GridOptions grid;
  grid.points = static_cast<std::size_t>(state.range(0));
  const auto s = pulse::gaussian_source(pulse::kSourceFwhmGhz, 0.0, 1.0, grid);
  for (auto _ : state) benchmark::DoNotOptimize(pulse::to_time(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ToTime)->RangeMultiplier(2)->Range(1 << 12, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_EvolvePiPulse(benchmark::State& state) {
  const auto model = state.range(0) == 2 ? dynamics::EmitterModel::two_level()
                                          : dynamics::EmitterModel::four_level({});
  const auto pulse = pulse::to_time(narrowband(pulse::kReferencePiAmplitude));
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::evolve(model, dynamics::ground_state(model), pulse));
}
BENCHMARK(BM_EvolvePiPulse)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SuperScanPoint(benchmark::State& state) {
  auto cfg = protocols::ExperimentConfig::defaults();
  cfg.super.detunings = {300.0};
  cfg.super.amplitudes = {0.7};
  for (auto _ : state) benchmark::DoNotOptimize(protocols::run_super_scan(cfg));
}
BENCHMARK(BM_SuperScanPoint)->Unit(benchmark::kMillisecond);

void BM_PulsedG2(benchmark::State& state) {
  const auto model = dynamics::EmitterModel::two_level();
  const auto pulse = pulse::to_time(narrowband(pulse::kReferencePiAmplitude));
  photonstats::G2Options options;
  options.decay_nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(photonstats::g2_pulsed(model, pulse, 200.0, 4, {}, options));
}
BENCHMARK(BM_PulsedG2)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitDampedRabi(benchmark::State& state) {
  const double kappa = M_PI / 0.2;
  const std::vector<double> truth{10000.0, kappa, 0.1, 500.0, 20.0};
  std::mt19937_64 rng(5);
  std::vector<double> a, counts;
  for (int i = 0; i <= 140; ++i) {
    a.push_back(1.4 * i / 140.0);
    counts.push_back(static_cast<double>(
        std::poisson_distribution<long long>(estimators::damped_rabi_model(a.back(), truth))(rng)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimators::fit_damped_rabi(a, counts));
}
BENCHMARK(BM_FitDampedRabi)->Unit(benchmark::kMicrosecond);

void BM_FitLifetime(benchmark::State& state) {
  const auto h = photonstats::synthesize_decay_histogram(16.2, 0.35, 1'000'000, 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(estimators::fit_lifetime(h));
}
BENCHMARK(BM_FitLifetime)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
