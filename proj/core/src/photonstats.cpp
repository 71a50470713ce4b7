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

#include "swingup/photonstats.hpp"

#include <algorithm>
#include <cmath>

#include "swingup/error.hpp"

namespace swingup::photonstats {
namespace {

using dynamics::EmitterModel;
using dynamics::Matrix;
using SuperOp = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, 16>;
using SuperVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, 16, 1>;

struct RadiativeJump {
  Eigen::Index lower;
  Eigen::Index upper;
  double rate;  // 1/ps
};

std::vector<RadiativeJump> radiative_jumps(const EmitterModel& model) {
  std::vector<RadiativeJump> out;
  if (!std::isfinite(model.t1())) return out;
  for (const auto& t : model.transitions()) {
    if (t.branching > 0.0) {
      out.push_back({static_cast<Eigen::Index>(t.lower), static_cast<Eigen::Index>(t.upper),
                     t.branching / model.t1() / kPsPerNs});
    }
  }
  return out;
}

SuperVec vectorize(const Matrix& m) {
  const auto d = m.rows();
  SuperVec v(d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i + j * d) = m(i, j);
  return v;
}

// Column-by-column propagator of the master equation over [ta, tb].
SuperOp propagator(const EmitterModel& model, const dynamics::DriveFunction& drive, double ta,
                   double tb, dynamics::IntegratorOptions opts) {
  const auto d = static_cast<Eigen::Index>(model.dimension());
  opts.check_invariants = false;
  SuperOp phi(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      const auto traj = dynamics::evolve_drive(model, unit, drive, ta, tb, opts);
      phi.col(i + j * d) = vectorize(traj.final_state());
    }
  }
  return phi;
}

}  // namespace

std::vector<double> DecayHistogram::bin_centers() const {
  std::vector<double> c(counts.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
  return c;
}

double DecayHistogram::mean_arrival() const {
  const auto c = bin_centers();
  double sum = 0.0, n = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    sum += c[i] * static_cast<double>(counts[i]);
    n += static_cast<double>(counts[i]);
  }
  return n > 0.0 ? sum / n : 0.0;
}

std::size_t CoincidenceHistogram::bins_per_period() const {
  const double width = delay_edges[1] - delay_edges[0];
  return static_cast<std::size_t>(std::llround(repetition_period / width));
}

double CoincidenceHistogram::peak_area(int k) const {
  const std::size_t b = bins_per_period();
  const auto peaks = static_cast<int>(counts.size() / b);
  const int index = k + peaks / 2;
  require(index >= 0 && index < peaks, ErrorKind::kOutOfRange, "peak index outside histogram");
  double sum = 0.0;
  for (std::size_t i = 0; i < b; ++i) sum += counts[static_cast<std::size_t>(index) * b + i];
  return sum;
}

double BackgroundModel::counts_per_pulse(double energy_pj) const {
  return coefficient * energy_pj + offset;
}

EmissionCurve emission_curve(const dynamics::Trajectory& traj, const EmitterModel& model) {
  const auto jumps = radiative_jumps(model);
  EmissionCurve out;
  out.times.assign(traj.times().begin(), traj.times().end());
  out.intensity.reserve(traj.size());
  for (const auto& rho : traj.states()) {
    double rate = 0.0;
    for (const auto& j : jumps) rate += j.rate * rho(j.upper, j.upper).real();
    out.intensity.push_back(rate * kPsPerNs);
  }
  return out;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

DecayHistogram synthesize_decay_histogram(double t1, double irf_sigma, std::uint64_t n_events,
                                          double bin_width, std::uint64_t seed,
                                          std::uint64_t stream) {
  require(t1 > 0.0, ErrorKind::kInvalidArgument, "lifetime must be positive");
  require(irf_sigma >= 0.0, ErrorKind::kInvalidArgument, "IRF width must be non-negative");
  require(n_events > 0, ErrorKind::kInvalidArgument, "need at least one event");
  require(bin_width > 0.0, ErrorKind::kInvalidArgument, "bin width must be positive");

  const double lo = irf_sigma > 0.0 ? -std::ceil(6.0 * irf_sigma / bin_width) * bin_width : 0.0;
  const auto bins = static_cast<std::size_t>(std::ceil((20.0 * t1 - lo) / bin_width));
  DecayHistogram h;
  h.irf_sigma = irf_sigma;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + static_cast<double>(i) * bin_width;
  h.counts.assign(bins, 0);

  auto rng = make_rng(seed, stream);
  std::exponential_distribution<double> decay(1.0 / t1);
  std::normal_distribution<double> jitter(0.0, irf_sigma > 0.0 ? irf_sigma : 1.0);
  for (std::uint64_t e = 0; e < n_events; ++e) {
    double t = decay(rng);
    if (irf_sigma > 0.0) t += jitter(rng);
    const double x = (t - lo) / bin_width;
    if (x < 0.0 || x >= static_cast<double>(bins)) continue;
    ++h.counts[static_cast<std::size_t>(x)];
    ++h.total_events;
  }
  return h;
}

double mix_background(double g2_signal, double signal_counts, double background_counts) {
  require(signal_counts >= 0.0 && background_counts >= 0.0, ErrorKind::kInvalidArgument,
          "counts must be non-negative");
  const double total = signal_counts + background_counts;
  require(total > 0.0, ErrorKind::kUndefinedRatio, "no counts to form g2 from");
  const double s = signal_counts, b = background_counts;
  return (s * s * g2_signal + 2.0 * s * b + b * b) / (total * total);
}

G2Result g2_pulsed(const EmitterModel& model, const pulse::TemporalEnvelope& pulse,
                   double rep_period, int n_periods, const BackgroundModel& background,
                   const G2Options& options) {
  require(n_periods >= 1, ErrorKind::kInvalidArgument, "need at least one side peak");
  require(options.bins_per_period >= 1 && options.decay_nodes >= 2, ErrorKind::kInvalidArgument,
          "invalid g2 resolution");
  require(background.coefficient >= 0.0 && background.offset >= 0.0,
          ErrorKind::kInvalidArgument, "background model must be non-negative");
  const auto [w0, w1] = pulse.support();
  const double width = w1 - w0;
  const double period = rep_period * kPsPerNs;
  require(period > 2.0 * width, ErrorKind::kInvalidArgument,
          "repetition period is shorter than the pulse support");

  const auto d = static_cast<Eigen::Index>(model.dimension());
  const auto dd = d * d;

  // Period nodes: a fine grid across the pulse then a uniform decay grid.
  const auto pulse_nodes = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(width / options.pulse_node_spacing)), 16, 1000);
  const std::size_t decay_nodes = options.decay_nodes;
  const std::size_t nodes = pulse_nodes + decay_nodes;
  std::vector<double> s(nodes + 1);
  for (std::size_t i = 0; i <= pulse_nodes; ++i)
    s[i] = width * static_cast<double>(i) / static_cast<double>(pulse_nodes);
  for (std::size_t j = 1; j <= decay_nodes; ++j)
    s[pulse_nodes + j] =
        width + (period - width) * static_cast<double>(j) / static_cast<double>(decay_nodes);
  std::vector<double> step(nodes), weight(nodes);
  for (std::size_t i = 0; i < nodes; ++i) step[i] = s[i + 1] - s[i];
  for (std::size_t i = 0; i < nodes; ++i) weight[i] = 0.5 * (step[(i + nodes - 1) % nodes] + step[i]);

  auto opts = options.integrator;
  opts.max_step = std::min(opts.max_step, 10.0 * pulse.time().step());
  const dynamics::DriveFunction drive = [&pulse, w0 = w0](double t) { return pulse.rabi_at(w0 + t); };
  std::vector<SuperOp> segment(pulse_nodes);
  for (std::size_t i = 0; i < pulse_nodes; ++i)
    segment[i] = propagator(model, drive, s[i], s[i + 1], opts);
  const SuperOp decay_map = propagator(
      model, [](double) { return cplx{}; }, 0.0, step[pulse_nodes], options.integrator);
  auto map_at = [&](std::size_t i) -> const SuperOp& {
    return i < pulse_nodes ? segment[i] : decay_map;
  };

  const auto jumps = radiative_jumps(model);
  SuperVec emit = SuperVec::Zero(dd);  // tr(J rho) = emit . vec(rho)
  for (const auto& j : jumps) emit(j.upper + j.upper * d) += j.rate;
  auto jump = [&](const SuperVec& v) {
    SuperVec out = SuperVec::Zero(dd);
    for (const auto& j : jumps) out(j.lower + j.lower * d) += j.rate * v(j.upper + j.upper * d);
    return out;
  };

  // Periodic steady state at the start of a period.
  SuperOp full = SuperOp::Identity(dd, dd);
  for (std::size_t i = 0; i < nodes; ++i) full = (map_at(i) * full).eval();
  SuperVec v = vectorize(dynamics::ground_state(model));
  for (int it = 0; it < 100000; ++it) {
    SuperVec next = full * v;
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change < 1e-14) break;
  }
  std::vector<SuperVec> state(nodes);
  state[0] = v;
  for (std::size_t i = 1; i < nodes; ++i) state[i] = map_at(i - 1) * state[i - 1];

  double emitted = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) emitted += weight[i] * emit.dot(state[i]).real();

  // Quantum regression: for a detection at node n, propagate J(rho_n) forward
  // and collect second detections at positive delays.
  const std::size_t b = options.bins_per_period;
  const std::size_t peaks = 2 * static_cast<std::size_t>(n_periods) + 1;
  const double sub = period / static_cast<double>(b);
  const double max_delay = (static_cast<double>(n_periods) + 0.5) * period;
  std::vector<double> signal(peaks * b, 0.0);
  const double origin = -max_delay;
  auto deposit = [&](double tau, double value) {
    const double x = (tau - origin) / sub;
    if (x < 0.0 || x >= static_cast<double>(signal.size())) return;
    signal[static_cast<std::size_t>(x)] += value;
  };
  SuperVec cond(dd), tmp(dd);
  for (std::size_t n = 0; n < nodes; ++n) {
    cond = jump(state[n]);
    if (cond.cwiseAbs().maxCoeff() == 0.0) continue;
    double tau = 0.0;
    std::size_t m = n;
    deposit(0.0, weight[n] * 0.5 * step[n] * emit.dot(cond).real());
    while (true) {
      tmp.noalias() = map_at(m) * cond;
      cond.swap(tmp);
      tau += step[m];
      m = (m + 1) % nodes;
      if (tau >= max_delay) break;
      const double value = weight[n] * weight[m] * emit.dot(cond).real();
      deposit(tau, value);
      deposit(-tau, value);
    }
  }

  const double eta = options.detection_efficiency;
  G2Result r;
  r.emission_probability = emitted;
  r.signal_per_pulse = eta * emitted;
  r.background_per_pulse = background.counts_per_pulse(pulse.energy());
  const double s_c = r.signal_per_pulse, b_c = r.background_per_pulse;
  const double floor = 2.0 * s_c * b_c + b_c * b_c;

  r.histogram.repetition_period = rep_period;
  r.histogram.delay_edges.resize(signal.size() + 1);
  for (std::size_t i = 0; i <= signal.size(); ++i)
    r.histogram.delay_edges[i] = (origin + static_cast<double>(i) * sub) / kPsPerNs;
  r.histogram.counts.resize(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i)
    r.histogram.counts[i] = eta * eta * signal[i] + floor / static_cast<double>(b);

  CoincidenceHistogram pure = r.histogram;
  for (std::size_t i = 0; i < signal.size(); ++i) pure.counts[i] = eta * eta * signal[i];
  double side_signal = 0.0, side_total = 0.0;
  for (int k = 1; k <= n_periods; ++k) {
    side_signal += pure.peak_area(k);
    side_total += r.histogram.peak_area(k);
    r.side_areas.push_back(r.histogram.peak_area(k));
  }
  side_signal /= n_periods;
  side_total /= n_periods;
  require(side_total > 0.0, ErrorKind::kUndefinedRatio, "no side-peak coincidences");
  r.center_area = r.histogram.peak_area(0);
  r.g2_zero = r.center_area / side_total;
  r.g2_signal = side_signal > 0.0 ? pure.peak_area(0) / side_signal : 1.0;
  return r;
}

CoincidenceHistogram sample_coincidences(const CoincidenceHistogram& expected, double total_pairs,
                                         std::uint64_t seed) {
  require(total_pairs > 0.0, ErrorKind::kInvalidArgument, "need a positive pair budget");
  double sum = 0.0;
  for (double c : expected.counts) sum += c;
  require(sum > 0.0, ErrorKind::kUndefinedRatio, "expected histogram is empty");
  auto rng = make_rng(seed, 0);
  CoincidenceHistogram out = expected;
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    const double mean = expected.counts[i] / sum * total_pairs;
    out.counts[i] = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng)) : 0.0;
  }
  return out;
}

}  // namespace swingup::photonstats
