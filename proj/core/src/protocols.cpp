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

#include "swingup/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "swingup/error.hpp"

namespace swingup::protocols {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double excited_population(const dynamics::EmitterModel& model, const pulse::TemporalEnvelope& p) {
  if (p.peak() == 0.0) return 0.0;
  const auto traj = dynamics::evolve(model, dynamics::ground_state(model), p);
  const auto i = static_cast<Eigen::Index>(model.radiative_index());
  return traj.final_state()(i, i).real();
}

pulse::SpectralEnvelope unit_source(const PulseConfig& cfg) {
  return pulse::gaussian_source(cfg.source_fwhm, 0.0, 1.0, cfg.grid);
}

// Unit-energy envelope of one Gaussian color.
pulse::TemporalEnvelope unit_color(const PulseConfig& cfg, const pulse::Calibration& cal,
                                   double center, double width) {
  const auto carved = pulse::apply_mask(unit_source(cfg), pulse::narrowband_mask(center, width));
  return pulse::to_time(carved.with_energy(1.0), cal);
}

struct SuperField {
  pulse::TemporalEnvelope fixed;
  std::vector<pulse::TemporalEnvelope> scanned;  // one per detuning
};

double signed_detuning(const SuperConfig& s, double magnitude) {
  return s.red_detuned ? -magnitude : magnitude;
}

SuperField super_field(const ExperimentConfig& cfg, const std::vector<double>& detunings) {
  const auto cal = calibration(cfg.pulse);
  SuperField f{unit_color(cfg.pulse, cal, cfg.super.fixed_detuning, cfg.super.fixed_width), {}};
  f.scanned.reserve(detunings.size());
  for (double d : detunings)
    f.scanned.push_back(unit_color(cfg.pulse, cal, signed_detuning(cfg.super, d), cfg.super.scan_width));
  return f;
}

pulse::TemporalEnvelope combine(const pulse::TemporalEnvelope& fixed, double a_fixed,
                                const pulse::TemporalEnvelope& scanned, double a_scanned) {
  return fixed.scaled(a_fixed) + scanned.scaled(a_scanned);
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e))
    return std::string(to_string(err->kind())) + ": " + err->what();
  return e.what();
}

// Golden-section maximization on [lo, hi].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

std::vector<double> default_detuning_axis() {
  std::vector<double> axis;
  for (int k = 0; k <= 50; ++k) axis.push_back(150.0 + 5.0 * k);
  return axis;
}

std::vector<double> default_amplitude_axis(double max_amplitude) {
  require(max_amplitude > 0.0, ErrorKind::kInvalidArgument, "maximum amplitude must be positive");
  std::vector<double> axis{0.0};
  constexpr int kPoints = 20;
  const double lo = 0.05 * max_amplitude;
  for (int k = 0; k < kPoints; ++k)
    axis.push_back(lo * std::pow(max_amplitude / lo, k / static_cast<double>(kPoints - 1)));
  axis.back() = max_amplitude;
  return axis;
}

dynamics::EmitterModel build_model(const EmitterConfig& cfg) {
  dynamics::EmitterModel model = [&] {
    if (cfg.model == "two_level") return dynamics::EmitterModel::two_level(cfg.t1, cfg.t2star);
    if (cfg.model == "four_level") {
      auto p = cfg.four_level;
      p.t1_ns = cfg.t1;
      p.t2star_ns = cfg.t2star;
      return dynamics::EmitterModel::four_level(p);
    }
    throw ConfigError(0, "unknown emitter model '" + cfg.model + "' (two_level, four_level)");
  }();
  return cfg.dissipation ? model : model.without_dissipation();
}

pulse::Calibration calibration(const PulseConfig& cfg) {
  if (cfg.source_fwhm == pulse::kSourceFwhmGhz && cfg.pi_amplitude == pulse::kReferencePiAmplitude &&
      cfg.grid.points == pulse::GridOptions{}.points && cfg.grid.span_factor == pulse::GridOptions{}.span_factor)
    return pulse::Calibration::reference();
  const auto shape = pulse::apply_mask(unit_source(cfg), pulse::narrowband_mask());
  return pulse::Calibration::from_pi_amplitude(shape, cfg.pi_amplitude);
}

pulse::SpectralEnvelope carve(const PulseConfig& cfg, double amplitude) {
  require(amplitude >= 0.0, ErrorKind::kInvalidArgument, "amplitude must be non-negative");
  const auto src = unit_source(cfg);
  pulse::SpectralEnvelope carved = [&] {
    switch (cfg.shape) {
      case PulseShape::kSource:
        return src;
      case PulseShape::kNarrowband:
        return pulse::apply_mask(
            src, pulse::narrowband_mask(cfg.center, cfg.width > 0.0 ? cfg.width : pulse::kNarrowbandFwhmGhz));
      case PulseShape::kSubpicosecond:
        return pulse::apply_mask(
            src, pulse::subpicosecond_mask(
                     cfg.center, cfg.width > 0.0 ? cfg.width : pulse::kSubpicosecondWidthGhz, cfg.edge_sigma));
      case PulseShape::kMask:
        return pulse::apply_mask(src, pulse::SlitMask(cfg.slits));
    }
    fail(ErrorKind::kInvalidArgument, "unknown pulse shape");
  }();
  if (cfg.dispersion.gdd != 0.0 || cfg.dispersion.tod != 0.0)
    carved = pulse::apply_dispersion(carved, cfg.dispersion);
  require(carved.energy() > 0.0, ErrorKind::kInvalidArgument, "mask blocks the whole spectrum");
  return carved.with_energy(amplitude * amplitude);
}

pulse::TemporalEnvelope design_pulse(const PulseConfig& cfg, double amplitude) {
  return pulse::to_time(carve(cfg, amplitude), calibration(cfg));
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

RabiSweep run_rabi_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto model = build_model(cfg.emitter);
  const auto unit = design_pulse(cfg.pulse, 1.0);
  const std::size_t n = cfg.sweep.points;
  RabiSweep out;
  out.amplitude.resize(n);
  out.pulse_area.resize(n);
  out.population.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.amplitude[i] = cfg.sweep.amplitude_max * static_cast<double>(i) / static_cast<double>(n - 1);
  parallel_for(n, cfg.run.workers, [&](std::size_t i) {
    const auto p = unit.scaled(out.amplitude[i]);
    out.pulse_area[i] = pulse::pulse_area(p);
    try {
      out.population[i] = excited_population(model, p);
    } catch (const Error& e) {
      throw Error(e.kind(), "sweep point " + std::to_string(i) + " (amplitude " +
                                std::to_string(out.amplitude[i]) + "): " + e.what());
    }
  });
  if (cfg.sweep.counts_per_inversion > 0.0) {
    const std::uint64_t seed = cfg.require_seed();
    out.counts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = photonstats::make_rng(seed, i);
      const double a = out.amplitude[i];
      const double mean = cfg.sweep.counts_per_inversion * std::max(out.population[i], 0.0) +
                          cfg.background.counts_per_pulse(a * a);
      out.counts[i] = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng)) : 0.0;
    }
  }
  return out;
}

double calibrate_pi(const std::function<double(double)>& curve, double a_max, std::size_t points) {
  require(a_max > 0.0 && points >= 3, ErrorKind::kInvalidArgument, "calibration grid is empty");
  const double h = a_max / static_cast<double>(points - 1);
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) v[i] = curve(h * static_cast<double>(i));
  std::size_t peak = 0;
  for (std::size_t i = 1; i + 1 < points; ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
      peak = i;
      break;
    }
  }
  require(peak > 0, ErrorKind::kCalibration, "no Rabi maximum inside the calibration range");

  // Parabola through three points, re-centered and shrunk until converged.
  double x = h * static_cast<double>(peak);
  double step = h;
  double fl = v[peak - 1], fc = v[peak], fr = v[peak + 1];
  for (int it = 0; it < 60 && step > 1e-8 * x; ++it) {
    const double denom = fl - 2.0 * fc + fr;
    double shift = denom < 0.0 ? 0.5 * step * (fl - fr) / denom : 0.0;
    shift = std::clamp(shift, -step, step);
    x += shift;
    step = std::max(std::abs(shift), 0.25 * step);
    step = std::min(step, 0.5 * h);
    fl = curve(x - step);
    fc = curve(x);
    fr = curve(x + step);
    if (std::abs(shift) < 1e-10 * x) break;
  }
  return x;
}

double calibrate_pi(const ExperimentConfig& cfg) {
  const auto model = build_model(cfg.emitter);
  const auto unit = design_pulse(cfg.pulse, 1.0);
  // A resonant rotation follows the signed area |integral of Omega dt|; the
  // magnitude area over-counts envelopes with sign-changing lobes.
  cplx signed_area{};
  for (const auto& z : unit.rabi()) signed_area += z;
  const double area = std::abs(signed_area) * unit.time().step();
  const double nominal = kPi / (area > 1e-3 * pulse::pulse_area(unit) ? area : pulse::pulse_area(unit));
  const auto curve = [&](double a) { return excited_population(model, unit.scaled(a)); };
  for (double range = 2.0;; range *= 2.0) {
    try {
      return calibrate_pi(curve, range * nominal, 21);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kCalibration || range >= 8.0) throw;
    }
  }
}

double reference_population(const ExperimentConfig& cfg) {
  ExperimentConfig ref = cfg;
  ref.pulse.shape = PulseShape::kNarrowband;
  ref.pulse.center = 0.0;
  ref.pulse.width = 0.0;
  ref.pulse.dispersion = {};
  const double a_pi = calibrate_pi(ref);
  return excited_population(build_model(ref.emitter), design_pulse(ref.pulse, a_pi));
}

std::size_t ScanGrid::argmax_in_row(std::size_t row) const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < detuning.size(); ++c)
    if (at(row, c) > at(row, best) || std::isnan(at(row, best))) best = c;
  return best;
}

double ScanGrid::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : inversion)
    if (!std::isnan(v)) m = std::max(m, v);
  return m;
}

ScanGrid run_super_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  ScanGrid g;
  g.detuning = cfg.super.detunings.empty() ? default_detuning_axis() : cfg.super.detunings;
  g.amplitude = cfg.super.amplitudes.empty() ? default_amplitude_axis(0.5 * cfg.super.fixed_amplitude)
                                             : cfg.super.amplitudes;
  g.fixed_detuning = cfg.super.fixed_detuning;
  g.fixed_amplitude = cfg.super.fixed_amplitude;
  g.fixed_width = cfg.super.fixed_width;
  g.scan_width = cfg.super.scan_width;
  g.reference_population = reference_population(cfg);

  const auto model = build_model(cfg.emitter);
  const auto field = super_field(cfg, g.detuning);
  const std::size_t cols = g.detuning.size();
  const std::size_t n = g.amplitude.size() * cols;
  g.inversion.assign(n, kNaN);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.run.workers, [&](std::size_t i) {
    const std::size_t r = i / cols, c = i % cols;
    try {
      const auto p = combine(field.fixed, cfg.super.fixed_amplitude, field.scanned[c], g.amplitude[r]);
      g.inversion[i] = excited_population(model, p) / g.reference_population;
    } catch (const std::exception& e) {
      errors[i] = describe(e);
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) g.failures.push_back({i / cols, i % cols, errors[i]});
  return g;
}

double run_single_pulse_control(const ExperimentConfig& cfg, SuperColor enabled) {
  cfg.validate();
  const auto model = build_model(cfg.emitter);
  const double ref = reference_population(cfg);
  const auto detunings = cfg.super.detunings.empty() ? default_detuning_axis() : cfg.super.detunings;
  const auto amplitudes = cfg.super.amplitudes.empty()
                              ? default_amplitude_axis(0.5 * cfg.super.fixed_amplitude)
                              : cfg.super.amplitudes;
  const auto field = super_field(cfg, detunings);
  if (enabled == SuperColor::kFixed)
    return excited_population(model, field.fixed.scaled(cfg.super.fixed_amplitude)) / ref;

  const std::size_t cols = detunings.size();
  std::vector<double> v(amplitudes.size() * cols, 0.0);
  parallel_for(v.size(), cfg.run.workers, [&](std::size_t i) {
    v[i] = excited_population(model, field.scanned[i % cols].scaled(amplitudes[i / cols])) / ref;
  });
  return *std::max_element(v.begin(), v.end());
}

PowerExtension run_super_power_extension(const ExperimentConfig& cfg,
                                         const std::vector<double>& multipliers) {
  cfg.validate();
  require(!multipliers.empty(), ErrorKind::kInvalidArgument, "no amplitude multipliers");
  for (double m : multipliers)
    require(m >= 1.0, ErrorKind::kInvalidArgument, "amplitude multipliers must be >= 1");
  const auto model = build_model(cfg.emitter);
  const auto cal = calibration(cfg.pulse);
  const double ref = reference_population(cfg);
  const auto base_detunings = cfg.super.detunings.empty() ? default_detuning_axis() : cfg.super.detunings;
  const double scanned_max = cfg.super.amplitudes.empty() ? 0.5 * cfg.super.fixed_amplitude
                                                          : cfg.super.amplitudes.back();
  const auto fixed = unit_color(cfg.pulse, cal, cfg.super.fixed_detuning, cfg.super.fixed_width);

  PowerExtension out;
  out.multipliers = multipliers;
  for (double m : multipliers) {
    auto inversion_at = [&](double d) {
      const auto scanned = unit_color(cfg.pulse, cal, signed_detuning(cfg.super, d), cfg.super.scan_width);
      return excited_population(model, combine(fixed, m * cfg.super.fixed_amplitude, scanned, m * scanned_max)) / ref;
    };
    // The resonance moves outward with power, so the search range grows with m.
    const double lo = base_detunings.front();
    const double hi = base_detunings.back() * m;
    const double step = cfg.super.extension_step;
    std::vector<double> grid;
    for (double d = lo; d <= hi + 1e-9; d += step) grid.push_back(d);
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), cfg.run.workers, [&](std::size_t i) { values[i] = inversion_at(grid[i]); });
    const auto k = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    const double a = std::max(lo, grid[k] - step), b = std::min(hi, grid[k] + step);
    auto [d_best, v_best] = golden_max(inversion_at, a, b, 0.05);
    if (values[k] > v_best) {
      d_best = grid[k];
      v_best = values[k];
    }
    out.best_inversion.push_back(v_best);
    out.best_detuning.push_back(d_best);
  }

  // Non-decreasing until the curve first reaches (within 1%) its maximum.
  const double top = *std::max_element(out.best_inversion.begin(), out.best_inversion.end());
  for (std::size_t i = 1; i < out.best_inversion.size(); ++i) {
    if (out.best_inversion[i - 1] >= 0.99 * top) break;
    if (out.best_inversion[i] < out.best_inversion[i - 1] - 1e-9) {
      out.monotone_to_plateau = false;
      out.warnings.push_back("best inversion drops before its first plateau at multiplier " +
                             std::to_string(out.multipliers[i]));
    }
  }
  return out;
}

LifetimeExperiment run_lifetime_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint64_t seed = cfg.require_seed();
  const auto model = build_model(cfg.emitter);
  require(std::isfinite(model.t1()), ErrorKind::kInvalidArgument,
          "lifetime experiment needs a decaying emitter");
  LifetimeExperiment out;
  out.excited_population = excited_population(model, design_pulse(cfg.pulse, cfg.pulse.amplitude));
  const auto events = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(cfg.lifetime.events) * std::max(out.excited_population, 0.0)));
  if (events < 10'000) {
    out.flagged = true;
    out.note = "only " + std::to_string(events) + " events detected; histogram too sparse to fit";
    if (events == 0) return out;
  }
  out.histogram = photonstats::synthesize_decay_histogram(model.t1(), cfg.lifetime.irf_sigma, events,
                                                          cfg.lifetime.bin_width, seed);
  if (!out.flagged) out.fit = estimators::fit_lifetime(out.histogram);
  return out;
}

QuasiCwExperiment run_quasi_cw_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto em = cfg.emitter;
  em.model = "two_level";
  const auto model = build_model(em);
  const auto& q = cfg.quasi_cw;
  const auto traj = dynamics::evolve_quasi_cw(model, q.rabi, q.duration);
  QuasiCwExperiment out;
  std::vector<double> ps(q.samples);
  for (std::size_t i = 0; i < q.samples; ++i) {
    out.times.push_back(q.duration * static_cast<double>(i) / static_cast<double>(q.samples - 1));
    ps[i] = out.times.back() * kPsPerNs;
  }
  out.population = traj.sample_population(model.radiative_index(), ps);
  estimators::QuasiCwFitOptions opts;
  opts.t1 = std::isfinite(model.t1()) ? model.t1() : 1e9;
  out.fit = estimators::fit_quasi_cw(out.times, out.population, opts);
  return out;
}

photonstats::G2Result run_g2_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto model = build_model(cfg.emitter);
  photonstats::G2Options opts;
  opts.detection_efficiency = cfg.g2.detection_efficiency;
  opts.decay_nodes = cfg.g2.decay_nodes;
  return photonstats::g2_pulsed(model, design_pulse(cfg.pulse, cfg.pulse.amplitude), cfg.g2.rep_period,
                                cfg.g2.periods, cfg.background, opts);
}

}  // namespace swingup::protocols
