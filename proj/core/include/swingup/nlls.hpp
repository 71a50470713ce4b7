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

// Bounded Levenberg-Marquardt least squares with finite-difference Jacobians.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swingup::fit {

struct Parameter {
  std::string name;
  std::string unit;
  double value = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool fixed = false;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<std::string> units;
  Eigen::VectorXd values;
  Eigen::MatrixXd covariance;  // zero rows/columns for fixed parameters
  std::vector<bool> fixed;
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  std::size_t dof = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;  // max |J^T r| over free, non-clamped parameters
  // Abscissa range actually used by the fit.
  double range_lower = 0.0;
  double range_upper = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;

  std::size_t index(const std::string& name) const;
  double value(const std::string& name) const { return values(static_cast<Eigen::Index>(index(name))); }
  /// One-sigma uncertainty from the covariance diagonal.
  double error(const std::string& name) const;
};

struct FitOptions {
  std::size_t max_iterations = 500;
  double cost_rtol = 1e-10;
  double gradient_tol = 1e-10;
  double fd_relative_step = 1e-3;  // fourth-order stencil
  double initial_damping = 1e-3;
};

/// Scalar model y = f(x; p) with the full parameter vector (fixed ones included).
using ModelFn = std::function<double(double x, std::span<const double> params)>;
/// Writes the weighted residual vector for a full parameter vector.
using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

/// Minimizes sum_i ((y_i - f(x_i; p)) / sigma_i)^2. Deterministic given its inputs.
FitResult fit_nlls(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma, const std::vector<Parameter>& params,
                   const FitOptions& options = {});

/// Minimizes the sum of squares of a caller-supplied residual vector.
FitResult fit_residuals(const ResidualFn& residuals, std::size_t n_residuals,
                        const std::vector<Parameter>& params, const FitOptions& options = {});

}  // namespace swingup::fit
