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

#include "swingup/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "swingup/error.hpp"

namespace swingup::estimators {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(z^2) erfc(z) for z >= 0.
double erfcx(double z) {
  if (z < 26.0) return std::exp(z * z) * std::erfc(z);
  const double iz2 = 1.0 / (z * z);
  return (1.0 - 0.5 * iz2 * (1.0 - 1.5 * iz2)) / (z * std::sqrt(kPi));
}

// Survival function of the exponentially modified Gaussian.
double emg_survival(double t, double tau, double t0, double sigma) {
  if (sigma <= 0.0) return t <= t0 ? 1.0 : std::exp(-(t - t0) / tau);
  const double x = (t - t0) / sigma;
  const double s = sigma / tau;
  const double z = (s - x) / std::sqrt(2.0);
  const double tail = z >= 0.0 ? 0.5 * std::exp(-0.5 * x * x) * erfcx(z)
                               : 0.5 * std::exp(-(t - t0) / tau + 0.5 * s * s) * std::erfc(z);
  return 0.5 * std::erfc(x / std::sqrt(2.0)) + tail;
}

double emg_cdf(double t, double tau, double t0, double sigma) {
  if (sigma <= 0.0) return t <= t0 ? 0.0 : -std::expm1(-(t - t0) / tau);
  const double x = (t - t0) / sigma;
  const double s = sigma / tau;
  const double z = (s - x) / std::sqrt(2.0);
  const double tail = z >= 0.0 ? 0.5 * std::exp(-0.5 * x * x) * erfcx(z)
                               : 0.5 * std::exp(-(t - t0) / tau + 0.5 * s * s) * std::erfc(z);
  return 0.5 * std::erfc(-x / std::sqrt(2.0)) - tail;
}

// Local extrema of a 3-point running mean.
std::size_t count_extrema(std::span<const double> y) {
  if (y.size() < 5) return 0;
  std::vector<double> s(y.size() - 2);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (y[i] + y[i + 1] + y[i + 2]) / 3.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if ((s[i] > s[i - 1] && s[i] >= s[i + 1]) || (s[i] < s[i - 1] && s[i] <= s[i + 1])) ++n;
  }
  return n;
}

// Turning points whose swing exceeds `threshold`; returns indices of maxima.
std::vector<std::size_t> swing_maxima(std::span<const double> y, double threshold) {
  std::vector<std::size_t> maxima;
  std::size_t hi = 0, lo = 0;
  int dir = 0;  // +1 rising, -1 falling
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (dir >= 0 && y[i] > y[hi]) hi = i;
    if (dir <= 0 && y[i] < y[lo]) lo = i;
    if (dir >= 0 && y[hi] - y[i] > threshold) {
      if (dir > 0) maxima.push_back(hi);
      dir = -1;
      lo = i;
    } else if (dir <= 0 && y[i] - y[lo] > threshold) {
      dir = 1;
      hi = i;
    }
  }
  return maxima;
}

struct RabiData {
  std::vector<double> a, y, s;
};

FitResult fit_rabi_subset(const RabiData& d, std::size_t n, const fit::FitOptions& solver) {
  const std::span<const double> a(d.a.data(), n), y(d.y.data(), n), s(d.s.data(), n);
  const double amax = a.back();
  double spacing = amax / static_cast<double>(n);
  {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < n; ++i)
      if (a[i] > a[i - 1]) gaps.push_back(a[i] - a[i - 1]);
    if (!gaps.empty()) {
      std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
      spacing = gaps[gaps.size() / 2];
    }
  }

  // Seed from a grid over (kappa, contrast at pi) with the linear terms solved exactly.
  const double kmin = 0.5 * kPi / amax, kmax = kPi / (2.0 * spacing);
  const double contrasts[] = {1.0, 0.9, 0.7, 0.5, 0.3};
  double best = kInf;
  std::vector<double> guess{1.0, kPi / amax, 0.0, 0.0, 0.0};
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = y[i] / s[i];
  constexpr int kGrid = 400;
  for (int gk = 0; gk < kGrid; ++gk) {
    const double kappa = kmin * std::pow(kmax / kmin, gk / static_cast<double>(kGrid - 1));
    for (double f : contrasts) {
      const double gamma = -std::log(f) * kappa / kPi;
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double sn = std::sin(0.5 * kappa * a[i]);
        basis(r, 0) = std::exp(-gamma * a[i]) * sn * sn / s[i];
        basis(r, 1) = a[i] * a[i] / s[i];
        basis(r, 2) = 1.0 / s[i];
      }
      const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
      if (!(coef(0) > 0.0)) continue;
      const double ssr = (basis * coef - rhs).squaredNorm();
      if (ssr < best) {
        best = ssr;
        guess = {coef(0), kappa, gamma, std::max(coef(1), 0.0), std::max(coef(2), 0.0)};
      }
    }
  }

  std::vector<fit::Parameter> params{
      {"amplitude", "counts", guess[0], 0.0, kInf, false},
      {"kappa", "rad/sqrt(pJ)", guess[1], 1e-9, kInf, false},
      {"gamma", "1/sqrt(pJ)", guess[2], 0.0, kInf, false},
      {"background", "counts/pJ", guess[3], 0.0, kInf, false},
      {"offset", "counts", guess[4], 0.0, kInf, false},
  };
  return fit::fit_nlls(damped_rabi_model, a, y, s, params, solver);
}

}  // namespace

double damped_rabi_model(double a, std::span<const double> p) {
  const double sn = std::sin(0.5 * p[1] * a);
  return p[0] * std::exp(-p[2] * a) * sn * sn + p[3] * a * a + p[4];
}

FitResult fit_damped_rabi(std::span<const double> amplitude, std::span<const double> counts,
                          const RabiFitOptions& options) {
  const std::size_t n = amplitude.size();
  require(counts.size() == n, ErrorKind::kShape, "amplitude and count lengths differ");
  require(options.sigma.empty() || options.sigma.size() == n, ErrorKind::kShape,
          "sigma length differs from the data");
  require(n >= options.min_points && options.min_points >= 6, ErrorKind::kFitRange,
          "too few points for a Rabi fit");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return amplitude[i] < amplitude[j]; });
  RabiData d;
  for (std::size_t i : order) {
    require(std::isfinite(amplitude[i]) && amplitude[i] >= 0.0, ErrorKind::kInvalidArgument,
            "amplitudes must be finite and non-negative");
    d.a.push_back(amplitude[i]);
    d.y.push_back(counts[i]);
    d.s.push_back(options.sigma.empty() ? std::sqrt(std::max(counts[i], 1.0)) : options.sigma[i]);
  }
  require(d.a.back() > 0.0, ErrorKind::kFitRange, "amplitude sweep has zero span");
  require(count_extrema(d.y) >= 1, ErrorKind::kFitRange, "no oscillation extremum in the sweep");

  std::size_t used = n;
  FitResult best = fit_rabi_subset(d, used, options.solver);
  while (options.trim) {
    const std::size_t chunk = std::max<std::size_t>(1, used / 20);
    if (used < options.min_points + chunk) break;
    const std::size_t next = used - chunk;
    if (count_extrema(std::span<const double>(d.y.data(), next)) < 1) break;
    FitResult candidate = fit_rabi_subset(d, next, options.solver);
    if (!(candidate.reduced_chi2 < best.reduced_chi2 * (1.0 - options.trim_improvement))) break;
    best = std::move(candidate);
    used = next;
  }
  if (used < n) best.warnings.push_back("excluded " + std::to_string(n - used) + " high-amplitude points");
  return best;
}

Estimate estimate_inversion_fidelity(const FitResult& f) {
  require(f.converged, ErrorKind::kFitRange, "fidelity unavailable from a non-converged fit");
  const auto ik = static_cast<Eigen::Index>(f.index("kappa"));
  const auto ig = static_cast<Eigen::Index>(f.index("gamma"));
  const double kappa = f.values(ik), gamma = f.values(ig);
  require(kappa > 0.0, ErrorKind::kFitRange, "fit has no Rabi frequency");
  const double fid = std::exp(-kPi * gamma / kappa);
  const double dk = fid * kPi * gamma / (kappa * kappa);
  const double dg = -fid * kPi / kappa;
  const double var = dk * dk * f.covariance(ik, ik) + dg * dg * f.covariance(ig, ig) +
                     2.0 * dk * dg * f.covariance(ik, ig);
  return {fid, std::sqrt(std::max(var, 0.0))};
}

double emg_interval_probability(double a, double b, double tau, double t0, double sigma) {
  require(b >= a, ErrorKind::kInvalidArgument, "interval bounds are inverted");
  require(tau > 0.0, ErrorKind::kInvalidArgument, "decay time must be positive");
  // Difference of whichever tail is small to keep relative precision.
  if (b <= t0) return std::max(emg_cdf(b, tau, t0, sigma) - emg_cdf(a, tau, t0, sigma), 0.0);
  return std::max(emg_survival(a, tau, t0, sigma) - emg_survival(b, tau, t0, sigma), 0.0);
}

FitResult fit_lifetime(const photonstats::DecayHistogram& hist, const LifetimeFitOptions& options) {
  const std::size_t nb = hist.counts.size();
  require(nb >= 3 && hist.bin_edges.size() == nb + 1, ErrorKind::kShape,
          "histogram edges do not match its counts");
  const double total = std::accumulate(hist.counts.begin(), hist.counts.end(), 0.0,
                                       [](double acc, std::uint64_t c) { return acc + static_cast<double>(c); });
  require(total >= 1e4, ErrorKind::kInvalidArgument, "lifetime fit needs at least 1e4 events");

  const double t1_guess = options.t1_guess > 0.0 ? options.t1_guess : hist.mean_arrival();
  require(t1_guess > 0.0, ErrorKind::kFitRange, "histogram has no positive arrival times");
  std::vector<double> y(nb);
  for (std::size_t i = 0; i < nb; ++i) y[i] = static_cast<double>(hist.counts[i]);
  const std::size_t tail = std::max<std::size_t>(1, nb / 10);
  const double tail_mean = std::accumulate(y.end() - static_cast<std::ptrdiff_t>(tail), y.end(), 0.0) /
                           static_cast<double>(tail);

  const auto& e = hist.bin_edges;
  const double sigma = hist.irf_sigma;
  const fit::ResidualFn deviance = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < nb; ++i) {
      const double mu = std::max(p[0] * emg_interval_probability(e[i], e[i + 1], p[1], p[2], sigma) + p[3],
                                 1e-300);
      const double n = y[i];
      const double dev = n > 0.0 ? 2.0 * (mu - n + n * std::log(n / mu)) : 2.0 * mu;
      r[i] = std::copysign(std::sqrt(std::max(dev, 0.0)), n - mu);
    }
  };
  const double span = e.back() - e.front();
  std::vector<fit::Parameter> params{
      {"amplitude", "events", total, 0.0, kInf, false},
      {"t1", "ns", t1_guess, 1e-6, kInf, false},
      {"t0", "ns", 0.0, e.front(), e.back(), sigma <= 0.0},
      {"background", "events/bin", std::min(tail_mean, total / static_cast<double>(nb)), 0.0, kInf, false},
  };
  auto res = fit::fit_residuals(deviance, nb, params, options.solver);
  res.range_lower = e.front();
  res.range_upper = e.back();
  if (span < 2.0 * t1_guess) res.warnings.emplace_back("histogram spans less than twice the lifetime guess");
  return res;
}

std::vector<double> bloch_excited_population(std::span<const double> times, double rabi, double t1,
                                             double t2star) {
  require(t1 > 0.0 && t2star > 0.0, ErrorKind::kInvalidArgument, "decay times must be positive");
  const double g1 = std::isfinite(t1) ? 1.0 / t1 : 0.0;
  const double g2 = std::max(1.0 / t2star, 0.5 * g1);
  // (v, w, 1) with w = rho_ee - rho_gg; u decouples for a resonant real drive.
  Eigen::Matrix3d gen;
  gen << -g2, -rabi, 0.0,
         rabi, -g1, -g1,
         0.0, 0.0, 0.0;
  const Eigen::Vector3d start(0.0, -1.0, 1.0);
  std::vector<double> pe(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Eigen::Matrix3d m = (gen * times[i]).exp();
    pe[i] = 0.5 * (1.0 + (m * start)(1));
  }
  return pe;
}

FitResult fit_quasi_cw(std::span<const double> times, std::span<const double> values,
                       const QuasiCwFitOptions& options) {
  const std::size_t n = times.size();
  require(values.size() == n, ErrorKind::kShape, "time and value lengths differ");
  require(options.sigma.empty() || options.sigma.size() == n, ErrorKind::kShape,
          "sigma length differs from the data");
  require(n >= 10, ErrorKind::kFitRange, "too few samples for a quasi-CW fit");
  for (std::size_t i = 1; i < n; ++i)
    require(times[i] > times[i - 1], ErrorKind::kInvalidArgument, "times must increase");

  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  const double range = *vmax - *vmin;
  require(range > 1e-9 * (std::abs(*vmax) + 1e-300), ErrorKind::kFitRange, "trace has no oscillation");
  const auto maxima = swing_maxima(values, 0.1 * range);
  require(maxima.size() >= 2, ErrorKind::kFitRange, "trace has no oscillation");
  const double period = (times[maxima.back()] - times[maxima.front()]) /
                        static_cast<double>(maxima.size() - 1);
  const double dt = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
  require(period / dt >= 6.0, ErrorKind::kFitRange,
          "oscillation is under-sampled (fewer than 6 samples per period)");

  std::vector<double> sigma = options.sigma;
  if (sigma.empty()) sigma.assign(n, 1.0);
  const double t1 = options.t1;

  // Seed rabi and t2star from a coarse grid with the scale and offset solved linearly.
  const double omega0 = 2.0 * kPi / period;
  std::vector<double> guess{omega0, t1, t1, 1.0, 0.0};
  double best = kInf;
  for (double fo : {0.95, 1.0, 1.05}) {
    for (double ft : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
      const auto pe = bloch_excited_population(times, fo * omega0, t1, ft * t1);
      double scale = 1.0, offset = 0.0;
      if (options.counts) {
        Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), 2);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
          const auto r = static_cast<Eigen::Index>(i);
          basis(r, 0) = pe[i] / sigma[i];
          basis(r, 1) = 1.0 / sigma[i];
          rhs(r) = values[i] / sigma[i];
        }
        const Eigen::Vector2d c = basis.colPivHouseholderQr().solve(rhs);
        scale = c(0);
        offset = c(1);
      }
      double ssr = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = (values[i] - scale * pe[i] - offset) / sigma[i];
        ssr += r * r;
      }
      if (ssr < best) {
        best = ssr;
        guess = {fo * omega0, t1, ft * t1, scale, offset};
      }
    }
  }

  std::vector<fit::Parameter> params{
      {"rabi", "rad/ns", guess[0], 0.0, kInf, false},
      {"t1", "ns", t1, 1e-6, kInf, options.fix_t1},
      {"t2star", "ns", guess[2], 1e-6, 2.0 * t1 * (options.fix_t1 ? 1.0 : 4.0), false},
      {"scale", options.counts ? "counts" : "", guess[3], options.counts ? 0.0 : -kInf, kInf, !options.counts},
      {"offset", options.counts ? "counts" : "", guess[4], -kInf, kInf, !options.counts},
  };
  const fit::ResidualFn residuals = [&](std::span<const double> p, std::span<double> r) {
    const auto pe = bloch_excited_population(times, p[0], p[1], p[2]);
    for (std::size_t i = 0; i < n; ++i) r[i] = (values[i] - p[3] * pe[i] - p[4]) / sigma[i];
  };
  auto res = fit::fit_residuals(residuals, n, params, options.solver);
  // Without sigmas the noise scale comes from the residuals.
  if (options.sigma.empty() && res.dof > 0) res.covariance *= res.reduced_chi2;
  res.range_lower = times.front();
  res.range_upper = times.back();
  if ((times.back() - times.front()) < 3.0 * period)
    res.warnings.emplace_back("trace spans fewer than three oscillations");
  return res;
}

double visibility(double i_pi, double i_2pi) {
  require(std::isfinite(i_pi) && std::isfinite(i_2pi) && i_pi >= 0.0, ErrorKind::kInvalidArgument,
          "intensities must be finite and non-negative");
  require(i_2pi > 0.0, ErrorKind::kUndefinedRatio, "visibility undefined: I(2pi) is zero");
  return i_pi / i_2pi;
}

}  // namespace swingup::estimators
