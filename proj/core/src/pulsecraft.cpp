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

#include "swingup/pulsecraft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "swingup/error.hpp"

namespace swingup::pulse {
namespace {

constexpr double kPi = std::numbers::pi;
const double kLn2 = std::log(2.0);

// Full width at half maximum of a sampled non-negative profile, measured from
// the global maximum outwards with linear interpolation at the crossings.
double half_max_width(std::span<const double> y, double step, const char* what) {
  require(!y.empty(), ErrorKind::kShape, std::string(what) + ": empty profile");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const double peak = *peak_it;
  require(peak > 0.0, ErrorKind::kShape, std::string(what) + ": profile is identically zero");
  const double half = 0.5 * peak;
  const auto ipeak = static_cast<std::size_t>(peak_it - y.begin());

  std::size_t i = ipeak;
  while (i > 0 && y[i - 1] >= half) --i;
  require(i > 0, ErrorKind::kShape, std::string(what) + ": no half-maximum crossing on the left");
  const double left = (static_cast<double>(i) - (y[i] - half) / (y[i] - y[i - 1])) * step;

  std::size_t j = ipeak;
  while (j + 1 < y.size() && y[j + 1] >= half) ++j;
  require(j + 1 < y.size(), ErrorKind::kShape,
          std::string(what) + ": no half-maximum crossing on the right");
  const double right = (static_cast<double>(j) + (y[j] - half) / (y[j] - y[j + 1])) * step;
  return right - left;
}

std::vector<double> squared_magnitude(std::span<const cplx> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return std::norm(z); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------- spectra

SpectralEnvelope::SpectralEnvelope(UniformGrid detuning, std::vector<cplx> amplitude)
    : detuning_(detuning), amplitude_(std::move(amplitude)) {
  require(amplitude_.size() == detuning_.size(), ErrorKind::kInvalidArgument,
          "spectral amplitude length does not match its grid");
  require(amplitude_.size() >= 2, ErrorKind::kInvalidArgument,
          "spectral grid needs at least two points");
  for (const auto& a : amplitude_) {
    require(std::isfinite(a.real()) && std::isfinite(a.imag()), ErrorKind::kInvalidArgument,
            "spectral amplitude must be finite");
  }
}

double SpectralEnvelope::energy() const {
  double sum = 0.0;
  for (const auto& a : amplitude_) sum += std::norm(a);
  return sum * detuning_.step();
}

double SpectralEnvelope::centroid() const {
  double weight = 0.0;
  double moment = 0.0;
  for (std::size_t k = 0; k < amplitude_.size(); ++k) {
    const double p = std::norm(amplitude_[k]);
    weight += p;
    moment += p * detuning_[k];
  }
  return weight > 0.0 ? moment / weight : 0.0;
}

double SpectralEnvelope::power_fwhm() const {
  return half_max_width(squared_magnitude(amplitude_), detuning_.step(), "power_fwhm");
}

SpectralEnvelope SpectralEnvelope::scaled(double factor) const {
  auto out = amplitude_;
  for (auto& a : out) a *= factor;
  return SpectralEnvelope(detuning_, std::move(out));
}

SpectralEnvelope SpectralEnvelope::with_energy(double energy_pj) const {
  require(energy_pj >= 0.0, ErrorKind::kInvalidArgument, "energy must be non-negative");
  const double e = energy();
  if (e == 0.0) return *this;
  return scaled(std::sqrt(energy_pj / e));
}

// ---------------------------------------------------------------- calibration

Calibration Calibration::from_pi_amplitude(const SpectralEnvelope& shape, double pi_amplitude) {
  require(pi_amplitude > 0.0, ErrorKind::kInvalidArgument, "pi amplitude must be positive");
  require(shape.energy() > 0.0, ErrorKind::kInvalidArgument,
          "calibration shape carries no energy");
  const auto unit = to_time(shape.with_energy(1.0), Calibration{1.0});
  return Calibration{kPi / (pi_amplitude * pulse_area(unit))};
}

const Calibration& Calibration::reference() {
  static const Calibration cal = from_pi_amplitude(
      apply_mask(gaussian_source(kSourceFwhmGhz, 0.0, 1.0), narrowband_mask()),
      kReferencePiAmplitude);
  return cal;
}

// ---------------------------------------------------------------- time domain

TemporalEnvelope::TemporalEnvelope(UniformGrid time, std::vector<cplx> rabi, double coupling)
    : time_(time), rabi_(std::move(rabi)), coupling_(coupling) {
  require(rabi_.size() == time_.size(), ErrorKind::kInvalidArgument,
          "Rabi envelope length does not match its grid");
  require(rabi_.size() >= 2, ErrorKind::kInvalidArgument, "time grid needs at least two points");
  require(coupling_ > 0.0 && std::isfinite(coupling_), ErrorKind::kInvalidArgument,
          "coupling must be positive and finite");
}

cplx TemporalEnvelope::rabi_at(double t) const {
  const double x = (t - time_.start()) / time_.step();
  const auto n = static_cast<std::ptrdiff_t>(rabi_.size());
  if (!(x >= 0.0) || x > static_cast<double>(n - 1)) return {0.0, 0.0};
  auto i = static_cast<std::ptrdiff_t>(std::floor(x));
  if (i >= n - 1) i = n - 2;
  const double u = x - static_cast<double>(i);
  auto at = [&](std::ptrdiff_t k) -> cplx {
    return (k < 0 || k >= n) ? cplx{} : rabi_[static_cast<std::size_t>(k)];
  };
  const cplx p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  const cplx m1 = 0.5 * (p2 - p0);
  const cplx m2 = 0.5 * (p3 - p1);
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p1 + (u3 - 2 * u2 + u) * m1 + (-2 * u3 + 3 * u2) * p2 +
         (u3 - u2) * m2;
}

double TemporalEnvelope::peak() const {
  double m = 0.0;
  for (const auto& z : rabi_) m = std::max(m, std::abs(z));
  return m;
}

double TemporalEnvelope::edge_ratio() const {
  const double p = peak();
  if (p == 0.0) return 0.0;
  return std::max(std::abs(rabi_.front()), std::abs(rabi_.back())) / p;
}

double TemporalEnvelope::energy() const {
  double sum = 0.0;
  for (const auto& z : rabi_) sum += std::norm(z);
  return sum * time_.step() / kPsPerNs / (coupling_ * coupling_);
}

std::pair<double, double> TemporalEnvelope::support(double rel_threshold) const {
  const double cut = rel_threshold * peak();
  if (cut == 0.0) return {time_.front(), time_.back()};
  std::size_t lo = 0;
  while (lo < rabi_.size() && std::abs(rabi_[lo]) <= cut) ++lo;
  std::size_t hi = rabi_.size() - 1;
  while (hi > lo && std::abs(rabi_[hi]) <= cut) --hi;
  // One extra sample on each side keeps the interpolant's tails inside.
  lo = lo > 0 ? lo - 1 : 0;
  hi = std::min(hi + 1, rabi_.size() - 1);
  return {time_[lo], time_[hi]};
}

TemporalEnvelope TemporalEnvelope::scaled(double factor) const {
  auto out = rabi_;
  for (auto& z : out) z *= factor;
  return TemporalEnvelope(time_, std::move(out), coupling_);
}

TemporalEnvelope TemporalEnvelope::operator+(const TemporalEnvelope& other) const {
  require(other.time_.size() == time_.size() && other.time_.start() == time_.start() &&
              other.time_.step() == time_.step() && other.coupling_ == coupling_,
          ErrorKind::kInvalidArgument, "envelopes live on different grids");
  auto out = rabi_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.rabi_[i];
  return TemporalEnvelope(time_, std::move(out), coupling_);
}

// ---------------------------------------------------------------- masks

cplx Slit::transmission_at(double nu) const {
  double shape = 0.0;
  if (profile == SlitProfile::kGaussian) {
    const double x = (nu - center) / width;
    if (std::abs(x) > 4.0) return {0.0, 0.0};
    shape = std::exp(-2.0 * kLn2 * x * x);
  } else if (edge_sigma > 0.0) {
    const double s = std::sqrt(2.0) * edge_sigma;
    shape = 0.5 * (std::erf((nu - lower()) / s) - std::erf((nu - upper()) / s));
  } else {
    shape = (nu >= lower() && nu <= upper()) ? 1.0 : 0.0;
  }
  if (shape == 0.0) return {0.0, 0.0};
  return std::polar(transmission * shape, phase);
}

SlitMask::SlitMask(std::vector<Slit> slits) : slits_(std::move(slits)) {
  for (const auto& s : slits_) {
    require(std::isfinite(s.center) && std::isfinite(s.phase), ErrorKind::kInvalidArgument,
            "slit center and phase must be finite");
    require(s.width > 0.0, ErrorKind::kInvalidArgument, "slit width must be positive");
    require(s.transmission >= 0.0 && s.transmission <= 1.0, ErrorKind::kInvalidArgument,
            "slit transmission must lie in [0, 1]");
    require(s.edge_sigma >= 0.0, ErrorKind::kInvalidArgument, "slit edge must be non-negative");
  }
  std::sort(slits_.begin(), slits_.end(),
            [](const Slit& a, const Slit& b) { return a.center < b.center; });
  for (std::size_t i = 1; i < slits_.size(); ++i) {
    require(slits_[i - 1].upper() < slits_[i].lower(), ErrorKind::kInvalidArgument,
            "slits overlap");
  }
}

cplx SlitMask::transmission_at(double nu) const {
  cplx t{};
  for (const auto& s : slits_) t += s.transmission_at(nu);
  return t;
}

SlitMask super_mask(double det1, double det2, double width1, double width2, double t1, double t2,
                    double relative_phase) {
  require(width1 > 0.0 && width2 > 0.0, ErrorKind::kInvalidArgument,
          "SUPER slit widths must be positive");
  Slit a{det1, width1, t1, 0.0, SlitProfile::kGaussian, 0.0};
  Slit b{det2, width2, t2, relative_phase, SlitProfile::kGaussian, 0.0};
  const bool disjoint = a.upper() < b.lower() || b.upper() < a.lower();
  require(disjoint, ErrorKind::kInvalidArgument, "SUPER slits overlap");
  return SlitMask({a, b});
}

SlitMask narrowband_mask(double center, double width) {
  return SlitMask({Slit{center, width, 1.0, 0.0, SlitProfile::kGaussian, 0.0}});
}

SlitMask subpicosecond_mask(double center, double width, double edge_sigma) {
  return SlitMask({Slit{center, width, 1.0, 0.0, SlitProfile::kRectangular, edge_sigma}});
}

// ---------------------------------------------------------------- operations

SpectralEnvelope gaussian_source(double fwhm_bandwidth, double center_detuning, double energy,
                                 const GridOptions& options) {
  require(fwhm_bandwidth > 0.0 && std::isfinite(fwhm_bandwidth), ErrorKind::kInvalidArgument,
          "source bandwidth must be positive");
  require(energy >= 0.0, ErrorKind::kInvalidArgument, "source energy must be non-negative");
  require(options.points >= (std::size_t{1} << 12), ErrorKind::kInvalidArgument,
          "source grid needs at least 4096 points");
  require(options.span_factor >= 8.0, ErrorKind::kInvalidArgument,
          "source grid must span at least 8 FWHM");
  const double step = options.span_factor * fwhm_bandwidth / static_cast<double>(options.points);
  const auto grid = UniformGrid::centered(center_detuning, step, options.points);
  std::vector<cplx> amp(options.points);
  // |A|^2 is a Gaussian with intensity FWHM fwhm_bandwidth.
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double x = (grid[k] - center_detuning) / fwhm_bandwidth;
    amp[k] = std::exp(-2.0 * kLn2 * x * x);
  }
  SpectralEnvelope unit(grid, std::move(amp));
  if (energy == 0.0) return unit.scaled(0.0);
  return unit.with_energy(energy);
}

SpectralEnvelope apply_mask(const SpectralEnvelope& src, const SlitMask& mask) {
  const auto& grid = src.detuning();
  const double tol = 1e-9 * grid.span();
  for (const auto& s : mask.slits()) {
    require(s.lower() >= grid.front() - tol && s.upper() <= grid.back() + tol,
            ErrorKind::kOutOfRange, "slit extends outside the spectral grid");
  }
  std::vector<cplx> out(src.amplitude().begin(), src.amplitude().end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= mask.transmission_at(grid[k]);
  return SpectralEnvelope(grid, std::move(out));
}

SpectralEnvelope apply_dispersion(const SpectralEnvelope& src, const DispersionSpec& d) {
  require(std::isfinite(d.gdd) && std::isfinite(d.tod), ErrorKind::kInvalidArgument,
          "dispersion coefficients must be finite");
  if (d.gdd == 0.0 && d.tod == 0.0) return src;
  const auto& grid = src.detuning();
  const double center = src.centroid();
  std::vector<cplx> out(src.amplitude().begin(), src.amplitude().end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double w = ghz_to_rad_per_ps(grid[k] - center);
    const double phi = 0.5 * d.gdd * w * w + d.tod / 6.0 * w * w * w;
    out[k] *= std::polar(1.0, phi);
  }
  return SpectralEnvelope(grid, std::move(out));
}

TemporalEnvelope to_time(const SpectralEnvelope& src, const Calibration& calibration) {
  const auto& grid = src.detuning();
  const std::size_t n = grid.size();
  const std::size_t m = n / 2;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double center = grid[m];
  const double dt = kPsPerNs / (nd * grid.step());
  const auto time = UniformGrid(-md * dt, dt, n);

  // Omega(t_j) = g * sum_k A_k exp(-2 pi i nu_k t_j) dnu with nu_k = center + (k - m) dnu
  // and t_j = (j - m) dt, evaluated as one forward DFT with index twiddles.
  std::vector<cplx> buf(n);
  const auto amp = src.amplitude();
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    buf[k] = amp[k] * std::polar(1.0, 2.0 * kPi * std::fmod(kd * md, nd) / nd);
  }
  detail::fft_forward(buf);
  const double global = -2.0 * kPi * std::fmod(md * md, nd) / nd;
  const double scale = calibration.coupling * grid.step();
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    const double twiddle = 2.0 * kPi * std::fmod(jd * md, nd) / nd + global -
                           ghz_to_rad_per_ps(center) * time[j];
    buf[j] *= scale * std::polar(1.0, twiddle);
  }
  return TemporalEnvelope(time, std::move(buf), calibration.coupling);
}

double intensity_fwhm(const TemporalEnvelope& p) {
  return half_max_width(squared_magnitude(p.rabi()), p.time().step(), "intensity_fwhm");
}

AutocorrelationTrace autocorrelation(const TemporalEnvelope& p) {
  const auto intensity = squared_magnitude(p.rabi());
  const std::size_t n = intensity.size();
  std::vector<cplx> buf(2 * n);
  std::copy(intensity.begin(), intensity.end(), buf.begin());
  detail::fft_forward(buf);
  for (auto& z : buf) z = std::norm(z);
  detail::fft_backward(buf);
  // buf[k] holds the circular correlation at lag k (k < n) and lag k - 2n.
  std::vector<double> value(2 * n - 1);
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n - 1);
    const std::size_t k = lag >= 0 ? static_cast<std::size_t>(lag)
                                   : static_cast<std::size_t>(lag + static_cast<std::ptrdiff_t>(2 * n));
    value[i] = buf[k].real();
  }
  const double zero = value[n - 1];
  if (zero > 0.0) {
    for (auto& v : value) v /= zero;
  }
  const double dt = p.time().step();
  return {UniformGrid(-static_cast<double>(n - 1) * dt, dt, 2 * n - 1), std::move(value)};
}

double AutocorrelationTrace::fwhm() const {
  return half_max_width(value, delay.step(), "autocorrelation fwhm");
}

double pulse_area(const TemporalEnvelope& p) {
  double sum = 0.0;
  for (const auto& z : p.rabi()) sum += std::abs(z);
  return sum * p.time().step();
}

double chirped_gaussian_fwhm(double tau0, double gdd) {
  require(tau0 > 0.0, ErrorKind::kInvalidArgument, "tau0 must be positive");
  const double r = 4.0 * kLn2 * gdd / (tau0 * tau0);
  return tau0 * std::sqrt(1.0 + r * r);
}

double gdd_for_stretch(double tau0, double tau) {
  require(tau0 > 0.0 && tau >= tau0, ErrorKind::kInvalidArgument,
          "stretched duration must be at least the transform limit");
  const double ratio = tau / tau0;
  return std::sqrt(ratio * ratio - 1.0) * tau0 * tau0 / (4.0 * kLn2);
}

}  // namespace swingup::pulse
