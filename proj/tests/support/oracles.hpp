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

// Independent reference implementations used as test oracles. They share no
// code with the library beyond its public data types.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "swingup/dynamics.hpp"
#include "swingup/pulsecraft.hpp"

namespace swingup::testing {

inline constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

/// Direct O(N^2) evaluation of Omega(t) = g sum_k A_k exp(-2 pi i nu_k t) dnu at one time (ps).
inline cplx direct_synthesis(const pulse::SpectralEnvelope& s, double coupling, double t_ps) {
  const auto& grid = s.detuning();
  const auto amp = s.amplitude();
  cplx acc{};
  for (std::size_t k = 0; k < amp.size(); ++k)
    acc += amp[k] * std::exp(cplx(0.0, -2.0 * kPi * grid[k] * t_ps * 1e-3));
  return coupling * acc * grid.step();
}

/// Dense Lindblad superoperator (column-stacked vec) built from the model's
/// level and transition tables.
class ReferenceLindblad {
 public:
  explicit ReferenceLindblad(const dynamics::EmitterModel& m) : n_(static_cast<Eigen::Index>(m.dimension())) {
    const auto levels = m.levels();
    h0_ = Eigen::MatrixXcd::Zero(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      h0_(i, i) = 2.0 * kPi * levels[static_cast<std::size_t>(i)].energy * 1e-3;
    dip_ = Eigen::MatrixXcd::Zero(n_, n_);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n_, n_);
    dissipator_ = Eigen::MatrixXcd::Zero(n_ * n_, n_ * n_);
    auto add_jump = [&](const Eigen::MatrixXcd& l) {
      const Eigen::MatrixXcd ldl = l.adjoint() * l;
      dissipator_ += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
    };
    for (const auto& t : m.transitions()) {
      dip_(static_cast<Eigen::Index>(t.upper), static_cast<Eigen::Index>(t.lower)) = t.relative_dipole;
      if (std::isfinite(m.t1()) && t.branching > 0.0) {
        Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n_, n_);
        l(static_cast<Eigen::Index>(t.lower), static_cast<Eigen::Index>(t.upper)) =
            std::sqrt(t.branching / m.t1() * 1e-3);
        add_jump(l);
      }
    }
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (levels[static_cast<std::size_t>(i)].manifold == dynamics::Manifold::kExcited &&
          m.pure_dephasing_rate() > 0.0) {
        Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n_, n_);
        l(i, i) = std::sqrt(2.0 * m.pure_dephasing_rate() * 1e-3);
        add_jump(l);
      }
    }
  }

  Eigen::MatrixXcd generator(cplx drive) const {
    const Eigen::MatrixXcd h = h0_ + 0.5 * drive * dip_ + 0.5 * std::conj(drive) * dip_.adjoint();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n_, n_);
    return cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id)) + dissipator_;
  }

  /// Classic fixed-step RK4 from t0 to t1 in `steps` steps.
  Eigen::MatrixXcd rk4(const Eigen::MatrixXcd& rho0, const std::function<cplx(double)>& drive, double t0,
                       double t1, std::size_t steps) const {
    if (n_ == 2) return rk4_fixed<4>(rho0, drive, t0, t1, steps);
    if (n_ == 4) return rk4_fixed<16>(rho0, drive, t0, t1, steps);
    return rk4_fixed<Eigen::Dynamic>(rho0, drive, t0, t1, steps);
  }

 private:
  template <int N>
  Eigen::MatrixXcd rk4_fixed(const Eigen::MatrixXcd& rho0, const std::function<cplx(double)>& drive, double t0,
                             double t1, std::size_t steps) const {
    using Super = Eigen::Matrix<cplx, N, N>;
    using Vec = Eigen::Matrix<cplx, N, 1>;
    // The generator is affine in Re(drive) and Im(drive).
    const Super g0 = generator(0.0);
    const Super g_re = Super(generator(1.0)) - g0;
    const Super g_im = Super(generator(cplx(0.0, 1.0))) - g0;
    auto at = [&](cplx d) -> Super { return g0 + d.real() * g_re + d.imag() * g_im; };
    Vec v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), n_ * n_);
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = t0 + h * static_cast<double>(k);
      const Super ga = at(drive(t)), gm = at(drive(t + 0.5 * h)), gb = at(drive(t + h));
      const Vec k1 = ga * v;
      const Vec k2 = gm * (v + 0.5 * h * k1);
      const Vec k3 = gm * (v + 0.5 * h * k2);
      const Vec k4 = gb * (v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n_, n_);
  }

  static Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  }

  Eigen::Index n_;
  Eigen::MatrixXcd h0_;
  Eigen::MatrixXcd dip_;
  Eigen::MatrixXcd dissipator_;
};

/// Excited population of a resonantly driven, dissipation-free two-level system.
inline double rabi_population(double area) { return std::pow(std::sin(0.5 * area), 2); }

/// Upper bound on the excited population reached by a detuned drive: the
/// steady Rabi amplitude Omega^2 / (Omega^2 + Delta^2) at the peak Rabi rate.
inline double detuned_rabi_bound(double peak_rabi, double detuning_rad) {
  return peak_rabi * peak_rabi / (peak_rabi * peak_rabi + detuning_rad * detuning_rad);
}

/// Ordinary least squares for y = a + b x with weights 1/sigma^2:
/// returns {a, b, var_a, var_b, cov_ab}.
inline std::array<double, 5> weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                                           const std::vector<double>& sigma) {
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double d = s * sxx - sx * sx;
  return {(sxx * sy - sx * sxy) / d, (s * sxy - sx * sy) / d, sxx / d, s / d, -sx / d};
}

}  // namespace swingup::testing
