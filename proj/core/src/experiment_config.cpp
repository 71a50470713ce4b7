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

#include "swingup/error.hpp"
#include "swingup/protocols.hpp"

namespace swingup::protocols {
namespace {

PulseShape parse_shape(const config::Entry& e) {
  if (e.value == "source") return PulseShape::kSource;
  if (e.value == "narrowband") return PulseShape::kNarrowband;
  if (e.value == "subpicosecond") return PulseShape::kSubpicosecond;
  if (e.value == "mask") return PulseShape::kMask;
  throw ConfigError(e.line, "unknown pulse shape '" + e.value +
                                "' (source, narrowband, subpicosecond, mask)");
}

// slit = center, width[, transmission[, phase[, rect|gauss[, edge_sigma]]]]
pulse::Slit parse_slit(const config::Entry& e) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = e.value.find(',', start);
    std::string item = e.value.substr(start, comma - start);
    const auto b = item.find_first_not_of(" \t"), en = item.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : item.substr(b, en - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() < 2 || parts.size() > 6)
    throw ConfigError(e.line, "slit expects 'center, width[, transmission, phase, rect|gauss, edge_sigma]'");
  auto num = [&](std::size_t i) { return config::parse_double(config::Entry{e.key, parts[i], e.line}); };
  pulse::Slit s;
  s.center = num(0);
  s.width = num(1);
  if (parts.size() > 2) s.transmission = num(2);
  if (parts.size() > 3) s.phase = num(3);
  if (parts.size() > 4) {
    if (parts[4] == "rect") {
      s.profile = pulse::SlitProfile::kRectangular;
    } else if (parts[4] == "gauss") {
      s.profile = pulse::SlitProfile::kGaussian;
    } else {
      throw ConfigError(e.line, "slit profile must be 'rect' or 'gauss'");
    }
  }
  if (parts.size() > 5) s.edge_sigma = num(5);
  if (!(s.width > 0.0) || s.transmission < 0.0 || s.transmission > 1.0 || s.edge_sigma < 0.0)
    throw ConfigError(e.line, "slit needs width > 0, transmission in [0, 1] and edge_sigma >= 0");
  return s;
}

void strictly_increasing(const std::vector<double>& axis, const std::string& name) {
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1])) throw ConfigError(0, name + " axis must be strictly increasing");
}

std::size_t positive_count(long long v, const config::IniDocument& doc, const std::string& section,
                           const std::string& key) {
  if (v <= 0) throw ConfigError(doc.find(section, key)->line, "'" + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.run.seed = 1;
  return c;
}

ExperimentConfig ExperimentConfig::from_ini(const config::IniDocument& doc) {
  ExperimentConfig c;
  c.source_text = doc.text();

  auto& em = c.emitter;
  em.model = doc.get_string("emitter", "model", em.model);
  em.t1 = doc.get_double("emitter", "t1", em.t1);
  em.t2star = doc.get_double("emitter", "t2star", em.t2star);
  em.dissipation = doc.get_bool("emitter", "dissipation", em.dissipation);
  em.four_level.ground_splitting_ghz =
      doc.get_double("emitter", "ground_splitting", em.four_level.ground_splitting_ghz);
  em.four_level.excited_splitting_ghz =
      doc.get_double("emitter", "excited_splitting", em.four_level.excited_splitting_ghz);
  em.four_level.branching_c = doc.get_double("emitter", "branching_c", em.four_level.branching_c);
  em.four_level.branching_a = doc.get_double("emitter", "branching_a", em.four_level.branching_a);
  if (const auto* e = doc.find("emitter", "model"); e && em.model != "two_level" && em.model != "four_level")
    throw ConfigError(e->line, "unknown emitter model '" + em.model + "' (two_level, four_level)");

  auto& p = c.pulse;
  if (const auto* e = doc.find("pulse", "shape")) p.shape = parse_shape(*e);
  p.center = doc.get_double("pulse", "center", p.center);
  p.width = doc.get_double("pulse", "width", p.width);
  p.edge_sigma = doc.get_double("pulse", "edge_sigma", p.edge_sigma);
  p.dispersion.gdd = doc.get_double("pulse", "gdd", p.dispersion.gdd);
  p.dispersion.tod = doc.get_double("pulse", "tod", p.dispersion.tod);
  p.source_fwhm = doc.get_double("pulse", "source_fwhm", p.source_fwhm);
  p.pi_amplitude = doc.get_double("pulse", "pi_amplitude", p.pi_amplitude);
  p.amplitude = doc.get_double("pulse", "amplitude", p.amplitude);
  if (doc.find("pulse", "grid_points"))
    p.grid.points = positive_count(doc.get_int("pulse", "grid_points", 0), doc, "pulse", "grid_points");
  p.grid.span_factor = doc.get_double("pulse", "span_factor", p.grid.span_factor);
  for (const auto* e : doc.find_all("mask", "slit")) p.slits.push_back(parse_slit(*e));
  if (p.shape == PulseShape::kMask && p.slits.empty())
    throw ConfigError(doc.find("pulse", "shape")->line, "shape = mask needs [mask] slit entries");

  auto& sw = c.sweep;
  sw.amplitude_max = doc.get_double("sweep", "amplitude_max", sw.amplitude_max);
  if (doc.find("sweep", "points"))
    sw.points = positive_count(doc.get_int("sweep", "points", 0), doc, "sweep", "points");
  sw.counts_per_inversion = doc.get_double("sweep", "counts_per_inversion", sw.counts_per_inversion);

  auto& su = c.super;
  su.fixed_detuning = doc.get_double("super", "fixed_detuning", su.fixed_detuning);
  su.fixed_amplitude = doc.get_double("super", "fixed_amplitude", su.fixed_amplitude);
  su.fixed_width = doc.get_double("super", "fixed_width", su.fixed_width);
  su.scan_width = doc.get_double("super", "scan_width", su.scan_width);
  su.red_detuned = doc.get_bool("super", "red_detuned", su.red_detuned);
  su.multipliers = doc.get_doubles("super", "multipliers", su.multipliers);
  su.extension_step = doc.get_double("super", "extension_step", su.extension_step);
  if (const auto* e = doc.find("super", "detunings")) {
    su.detunings = doc.get_doubles("super", "detunings", {});
    if (su.detunings.empty()) throw ConfigError(e->line, "detuning axis is empty");
  } else if (doc.find("super", "detuning_min")) {
    const double lo = doc.get_double("super", "detuning_min", 150.0);
    const double hi = doc.get_double("super", "detuning_max", 400.0);
    const double step = doc.get_double("super", "detuning_step", 5.0);
    if (!(step > 0.0) || hi < lo) throw ConfigError(doc.find("super", "detuning_min")->line, "detuning axis is empty");
    for (double d = lo; d <= hi + 1e-9 * step; d += step) su.detunings.push_back(d);
  }
  if (const auto* e = doc.find("super", "amplitudes")) {
    su.amplitudes = doc.get_doubles("super", "amplitudes", {});
    if (su.amplitudes.empty()) throw ConfigError(e->line, "amplitude axis is empty");
  } else if (const auto* m = doc.find("super", "amplitude_max")) {
    const double amax = config::parse_double(*m);
    if (!(amax > 0.0)) throw ConfigError(m->line, "amplitude axis is empty");
    su.amplitudes = default_amplitude_axis(amax);
  }

  c.background.coefficient = doc.get_double("background", "coefficient", 0.0);
  c.background.offset = doc.get_double("background", "offset", 0.0);

  auto& lt = c.lifetime;
  lt.irf_sigma = doc.get_double("lifetime", "irf_sigma", lt.irf_sigma);
  if (doc.find("lifetime", "events"))
    lt.events = positive_count(doc.get_int("lifetime", "events", 0), doc, "lifetime", "events");
  lt.bin_width = doc.get_double("lifetime", "bin_width", lt.bin_width);

  auto& q = c.quasi_cw;
  q.rabi = doc.get_double("quasi_cw", "rabi", q.rabi);
  q.duration = doc.get_double("quasi_cw", "duration", q.duration);
  if (doc.find("quasi_cw", "samples"))
    q.samples = positive_count(doc.get_int("quasi_cw", "samples", 0), doc, "quasi_cw", "samples");

  auto& g = c.g2;
  g.rep_period = doc.get_double("g2", "rep_period", g.rep_period);
  if (doc.find("g2", "periods"))
    g.periods = static_cast<int>(positive_count(doc.get_int("g2", "periods", 0), doc, "g2", "periods"));
  g.detection_efficiency = doc.get_double("g2", "detection_efficiency", g.detection_efficiency);
  if (doc.find("g2", "decay_nodes"))
    g.decay_nodes = positive_count(doc.get_int("g2", "decay_nodes", 0), doc, "g2", "decay_nodes");

  if (const auto* e = doc.find("run", "seed")) {
    const long long s = doc.get_int("run", "seed", 0);
    if (s < 0) throw ConfigError(e->line, "seed must be non-negative");
    c.run.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.find("run", "workers"))
    c.run.workers = positive_count(doc.get_int("run", "workers", 1), doc, "run", "workers");
  c.run.output_dir = doc.get_string("run", "output_dir", c.run.output_dir);

  doc.reject_unused();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_ini(config::IniDocument::load(path));
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(0, what);
  };
  check(emitter.t1 > 0.0, "emitter t1 must be positive");
  check(emitter.t2star > 0.0 && emitter.t2star <= 2.0 * emitter.t1, "emitter t2star must lie in (0, 2 t1]");
  check(pulse.source_fwhm > 0.0 && pulse.pi_amplitude > 0.0 && pulse.amplitude >= 0.0,
        "pulse source_fwhm and pi_amplitude must be positive, amplitude non-negative");
  check(pulse.grid.points >= 16 && pulse.grid.span_factor > 0.0, "pulse grid is too small");
  check(pulse.width >= 0.0 && pulse.edge_sigma >= 0.0, "pulse width and edge_sigma must be non-negative");
  check(sweep.points >= 3 && sweep.amplitude_max > 0.0, "sweep needs >= 3 points and a positive amplitude_max");
  check(sweep.counts_per_inversion >= 0.0, "counts_per_inversion must be non-negative");
  check(super.fixed_width > 0.0 && super.scan_width > 0.0, "SUPER slit widths must be positive");
  check(super.fixed_amplitude >= 0.0, "SUPER fixed amplitude must be non-negative");
  check(super.extension_step > 0.0, "extension_step must be positive");
  strictly_increasing(super.detunings, "detuning");
  strictly_increasing(super.amplitudes, "amplitude");
  for (double d : super.detunings) check(d > 0.0, "detuning axis holds magnitudes > 0");
  for (double a : super.amplitudes) check(a >= 0.0, "amplitude axis must be non-negative");
  check(background.coefficient >= 0.0 && background.offset >= 0.0, "background must be non-negative");
  check(lifetime.irf_sigma >= 0.0 && lifetime.bin_width > 0.0, "lifetime irf_sigma/bin_width out of range");
  check(quasi_cw.duration > 0.0 && quasi_cw.samples >= 10, "quasi_cw needs a positive duration and >= 10 samples");
  check(g2.rep_period > 0.0 && g2.periods >= 1 && g2.detection_efficiency > 0.0 &&
            g2.detection_efficiency <= 1.0 && g2.decay_nodes >= 2,
        "g2 settings out of range");
  check(run.workers >= 1, "workers must be >= 1");
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!run.seed) throw ConfigError(0, "stochastic synthesis needs a seed ([run] seed or --seed)");
  return *run.seed;
}

}  // namespace swingup::protocols
