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

// Spectral pulse carving: a broadband Gaussian source is shaped by slit masks
// and optional dispersion, then synthesized into a time-domain Rabi-frequency
// envelope in the rotating frame of the C transition.

#include <span>
#include <utility>
#include <vector>

#include "swingup/grid.hpp"

namespace swingup::pulse {

// Reference numbers of the pulse carver.
inline constexpr double kSourceFwhmGhz = 2820.0;        // 3.6 nm at 619 nm
inline constexpr double kNarrowbandFwhmGhz = 42.3;
inline constexpr double kSubpicosecondWidthGhz = 1400.0;
inline constexpr double kDefaultEdgeSigmaGhz = 2.5;
inline constexpr double kReferencePiAmplitude = 0.2;    // sqrt(pJ)
inline constexpr double kGaussianTimeBandwidth = 0.441;

struct GridOptions {
  std::size_t points = std::size_t{1} << 14;
  double span_factor = 8.0;  // frequency span in units of the source FWHM
};

/// Complex field spectrum on a uniform detuning grid (GHz from the C
/// transition). Amplitudes are in sqrt(pJ/GHz), so the pulse energy in pJ is
/// sum |A|^2 * dnu.
class SpectralEnvelope {
 public:
  SpectralEnvelope(UniformGrid detuning, std::vector<cplx> amplitude);

  const UniformGrid& detuning() const { return detuning_; }
  std::span<const cplx> amplitude() const { return amplitude_; }

  double energy() const;
  /// Power-weighted mean detuning; 0 for an empty spectrum.
  double centroid() const;
  /// FWHM of |A|^2 in GHz (linear interpolation between samples).
  double power_fwhm() const;

  SpectralEnvelope scaled(double factor) const;
  /// Rescaled copy with the requested energy. Zero spectra stay zero.
  SpectralEnvelope with_energy(double energy_pj) const;

 private:
  UniformGrid detuning_;
  std::vector<cplx> amplitude_;
};

/// Dipole coupling that maps the synthesized field (sqrt(pJ*GHz)) to a Rabi
/// frequency in rad/ps. A single constant shared by every pulse shape.
struct Calibration {
  double coupling = 0.0;

  /// Coupling that makes `shape` (any energy) a resonant pi-pulse when carrying
  /// pi_amplitude^2 pJ.
  static Calibration from_pi_amplitude(const SpectralEnvelope& shape, double pi_amplitude);
  /// Narrowband 42.3 GHz carve with its pi-pulse at kReferencePiAmplitude.
  static const Calibration& reference();
};

/// Complex Rabi-frequency envelope on a centered uniform time grid (ps).
class TemporalEnvelope {
 public:
  TemporalEnvelope(UniformGrid time, std::vector<cplx> rabi, double coupling);

  const UniformGrid& time() const { return time_; }
  std::span<const cplx> rabi() const { return rabi_; }
  double coupling() const { return coupling_; }

  /// Cubic Hermite (Catmull-Rom) interpolation; zero outside the grid.
  cplx rabi_at(double t) const;
  double peak() const;
  /// max(|first|, |last|) / peak; 0 for an all-zero envelope.
  double edge_ratio() const;
  /// Pulse energy in pJ from the time-domain samples.
  double energy() const;
  /// [first, last] times where |rabi| exceeds rel_threshold * peak. Returns
  /// the full grid for an all-zero envelope.
  std::pair<double, double> support(double rel_threshold = 1e-10) const;

  TemporalEnvelope scaled(double factor) const;
  TemporalEnvelope operator+(const TemporalEnvelope& other) const;

 private:
  UniformGrid time_;
  std::vector<cplx> rabi_;
  double coupling_;
};

enum class SlitProfile { kRectangular, kGaussian };

struct Slit {
  double center = 0.0;        // GHz
  double width = 0.0;         // GHz; nominal passband (power FWHM for Gaussian)
  double transmission = 1.0;  // field transmission in [0, 1]
  double phase = 0.0;         // rad
  SlitProfile profile = SlitProfile::kRectangular;
  double edge_sigma = 0.0;    // GHz roll-off of rectangular edges; 0 = hard

  double lower() const { return center - 0.5 * width; }
  double upper() const { return center + 0.5 * width; }
  cplx transmission_at(double nu) const;
};

/// Ordered set of non-overlapping slits (nominal passbands must be disjoint).
class SlitMask {
 public:
  explicit SlitMask(std::vector<Slit> slits);

  std::span<const Slit> slits() const { return slits_; }
  cplx transmission_at(double nu) const;

 private:
  std::vector<Slit> slits_;
};

struct DispersionSpec {
  double gdd = 0.0;  // ps^2
  double tod = 0.0;  // ps^3
};

struct AutocorrelationTrace {
  UniformGrid delay;          // ps, symmetric about zero
  std::vector<double> value;  // normalized to 1 at zero delay

  double fwhm() const;
};

SpectralEnvelope gaussian_source(double fwhm_bandwidth, double center_detuning, double energy,
                                 const GridOptions& options = {});
SpectralEnvelope apply_mask(const SpectralEnvelope& src, const SlitMask& mask);
SlitMask super_mask(double det1, double det2, double width1, double width2, double t1,
                    double t2, double relative_phase = 0.0);
SpectralEnvelope apply_dispersion(const SpectralEnvelope& src, const DispersionSpec& d);
TemporalEnvelope to_time(const SpectralEnvelope& src,
                         const Calibration& calibration = Calibration::reference());
double intensity_fwhm(const TemporalEnvelope& p);
AutocorrelationTrace autocorrelation(const TemporalEnvelope& p);
double pulse_area(const TemporalEnvelope& p);

// Mask presets for the three carver configurations.
SlitMask narrowband_mask(double center = 0.0, double width = kNarrowbandFwhmGhz);
SlitMask subpicosecond_mask(double center = 0.0, double width = kSubpicosecondWidthGhz,
                            double edge_sigma = kDefaultEdgeSigmaGhz);

/// Intensity FWHM of a linearly chirped Gaussian with transform-limited FWHM
/// tau0 (ps) after group-delay dispersion gdd (ps^2).
double chirped_gaussian_fwhm(double tau0, double gdd);
/// |gdd| that stretches a transform-limited Gaussian from tau0 to tau (> tau0).
double gdd_for_stretch(double tau0, double tau);

}  // namespace swingup::pulse
