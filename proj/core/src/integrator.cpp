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

// Dormand-Prince 5(4) embedded pair with FSAL and cubic Hermite dense output.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swingup/dynamics.hpp"
#include "swingup/error.hpp"

namespace swingup::dynamics {
namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < err.cols(); ++j) {
    for (Eigen::Index i = 0; i < err.rows(); ++i) {
      const double scale = atol + rtol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
      worst = std::max(worst, std::abs(err(i, j)) / scale);
    }
  }
  return worst;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

Trajectory evolve_drive(const EmitterModel& model, const DensityMatrix& rho0,
                        const DriveFunction& drive, double t0, double t1,
                        const IntegratorOptions& options) {
  const auto n = static_cast<Eigen::Index>(model.dimension());
  require(rho0.rows() == n && rho0.cols() == n, ErrorKind::kDimension,
          "initial state does not match the model dimension");
  require(t1 > t0, ErrorKind::kInvalidArgument, "integration interval must be non-empty");
  require(options.rel_tol > 0.0 && options.abs_tol > 0.0, ErrorKind::kInvalidArgument,
          "tolerances must be positive");
  const double trace0 = rho0.trace().real();
  if (options.check_invariants) {
    const auto d = diagnose(rho0);
    require(d.trace_error <= options.trace_tol && d.hermiticity_error <= options.hermiticity_tol &&
                d.min_eigenvalue >= -options.eigenvalue_tol,
            ErrorKind::kInvalidArgument, "initial state is not a valid density matrix");
  }

  const Liouvillian lindblad(model);
  auto rhs = [&](double t, const Matrix& y, Matrix& dy) { lindblad.apply(drive(t), y, dy); };

  Trajectory traj;
  Matrix y = rho0;
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n);
  Matrix stage(n, n), y_new(n, n), err(n, n);
  double t = t0;
  rhs(t, y, k1);
  traj.push(t, y, k1);

  double h = options.initial_step;
  if (h <= 0.0) {
    // Hairer-Norsett-Wanner starting guess.
    const double d0 = max_abs(y), d1 = max_abs(k1);
    const double scale = options.abs_tol + options.rel_tol * d0;
    h = (d1 > 0.0) ? 0.01 * scale / (d1 * options.rel_tol + 1e-300) : 1e-6 * (t1 - t0);
    h = std::clamp(h, 1e-6 * (t1 - t0), 0.01 * (t1 - t0));
  }
  h = std::min({h, options.max_step, t1 - t0});

  std::size_t steps = 0;
  int invariant_retries = 0;
  bool last_rejected = false;
  while (t < t1) {
    if (++steps > options.max_steps) {
      fail(ErrorKind::kStiffness, "maximum number of integrator steps exceeded");
    }
    if (h < options.min_step && t + h < t1) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " ps";
      fail(ErrorKind::kStiffness, msg.str());
    }
    const bool final_step = t + h >= t1;
    if (final_step) h = t1 - t;

    stage = y + h * (a21 * k1);
    rhs(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double t_new = final_step ? t1 : t + h;
    rhs(t_new, stage, k6);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t_new, y_new, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = error_norm(err, y, y_new, options.rel_tol, options.abs_tol);
    if (!(en <= 1.0)) {
      const double factor = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      h *= factor;
      last_rejected = true;
      continue;
    }

    if (options.check_invariants) {
      // Rounding is the only source of anti-Hermitian parts; project them out.
      y_new = 0.5 * (y_new + y_new.adjoint()).eval();
      const auto d = diagnose(y_new);
      const bool ok = std::abs(y_new.trace().real() - trace0) <= options.trace_tol &&
                      d.hermiticity_error <= options.hermiticity_tol &&
                      d.min_eigenvalue >= -options.eigenvalue_tol;
      if (!ok) {
        // Treat an invariant breach like a failed error test a few times.
        if (++invariant_retries > 8) {
          std::ostringstream msg;
          msg << "density-matrix invariant violated at t = " << t_new
              << " ps (trace drift " << std::abs(y_new.trace().real() - trace0)
              << ", min eigenvalue " << d.min_eigenvalue << ")";
          fail(ErrorKind::kIntegratorFailure, msg.str());
        }
        h *= 0.25;
        last_rejected = true;
        continue;
      }
      invariant_retries = 0;
      rhs(t_new, y_new, k7);
    }

    t = t_new;
    y.swap(y_new);
    k1.swap(k7);
    traj.push(t, y, k1);

    double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
    h = std::min(h * factor, options.max_step);
    last_rejected = false;
  }
  return traj;
}

}  // namespace swingup::dynamics
