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

#include "swingup/nlls.hpp"

#include <algorithm>
#include <cmath>

#include "swingup/error.hpp"

namespace swingup::fit {
namespace {

struct Problem {
  const ResidualFn& residuals;
  std::size_t n;
  std::vector<Parameter> params;
  std::vector<Eigen::Index> free;  // indices of non-fixed parameters
  std::vector<double> typical;     // finite-difference scale per free parameter
};

std::vector<double> full_vector(const Problem& pb, const Eigen::VectorXd& x) {
  std::vector<double> p(pb.params.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = pb.params[i].value;
  for (std::size_t k = 0; k < pb.free.size(); ++k)
    p[static_cast<std::size_t>(pb.free[k])] = x(static_cast<Eigen::Index>(k));
  return p;
}

Eigen::VectorXd eval(const Problem& pb, const Eigen::VectorXd& x) {
  const auto p = full_vector(pb, x);
  Eigen::VectorXd r(static_cast<Eigen::Index>(pb.n));
  pb.residuals(p, std::span<double>(r.data(), pb.n));
  return r;
}

double lower_of(const Problem& pb, std::size_t k) { return pb.params[static_cast<std::size_t>(pb.free[k])].lower; }
double upper_of(const Problem& pb, std::size_t k) { return pb.params[static_cast<std::size_t>(pb.free[k])].upper; }

// Fourth-order central differences; near a bound, a short central or
// one-sided difference instead.
Eigen::MatrixXd jacobian(const Problem& pb, const Eigen::VectorXd& x, double rel) {
  const auto m = static_cast<Eigen::Index>(pb.free.size());
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(pb.n), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double scale = std::max(std::abs(x(k)), pb.typical[ku]);
    const double lo = lower_of(pb, ku), hi = upper_of(pb, ku);
    auto shifted = [&](double dx) {
      Eigen::VectorXd xs = x;
      xs(k) += dx;
      return eval(pb, xs);
    };
    const double h = rel * scale;
    if (x(k) - 2.0 * h >= lo && x(k) + 2.0 * h <= hi) {
      jac.col(k) = (8.0 * (shifted(h) - shifted(-h)) - (shifted(2.0 * h) - shifted(-2.0 * h))) / (12.0 * h);
      continue;
    }
    const double hs = 1e-7 * scale;
    const bool up_ok = x(k) + hs <= hi, down_ok = x(k) - hs >= lo;
    if (up_ok && down_ok) {
      jac.col(k) = (shifted(hs) - shifted(-hs)) / (2.0 * hs);
    } else if (up_ok) {
      jac.col(k) = (shifted(hs) - eval(pb, x)) / hs;
    } else {
      jac.col(k) = (eval(pb, x) - shifted(-hs)) / hs;
    }
  }
  return jac;
}

// Parameters pinned to a bound by the gradient are excluded from the step.
std::vector<bool> active_mask(const Problem& pb, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  std::vector<bool> active(pb.free.size(), true);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    if ((x(i) <= lower_of(pb, k) && g(i) > 0.0) || (x(i) >= upper_of(pb, k) && g(i) < 0.0))
      active[k] = false;
  }
  return active;
}

double projected_norm(const Eigen::VectorXd& g, const std::vector<bool>& active) {
  double norm = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k)
    if (active[k]) norm = std::max(norm, std::abs(g(static_cast<Eigen::Index>(k))));
  return norm;
}

FitResult solve(Problem& pb, const FitOptions& opt) {
  const std::size_t np = pb.params.size();
  for (std::size_t i = 0; i < np; ++i) {
    const auto& p = pb.params[i];
    require(std::isfinite(p.value), ErrorKind::kInvalidArgument, "initial guess must be finite");
    require(p.lower <= p.upper, ErrorKind::kInvalidArgument, "parameter bounds are inverted");
    if (!p.fixed) {
      pb.free.push_back(static_cast<Eigen::Index>(i));
      pb.typical.push_back(p.value != 0.0 ? std::abs(p.value) : 1.0);
    }
  }
  const auto m = static_cast<Eigen::Index>(pb.free.size());
  Eigen::VectorXd x(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& p = pb.params[static_cast<std::size_t>(pb.free[static_cast<std::size_t>(k)])];
    x(k) = std::clamp(p.value, p.lower, p.upper);
  }

  FitResult res;
  Eigen::VectorXd r = eval(pb, x);
  require(r.allFinite(), ErrorKind::kInvalidArgument, "residuals are not finite at the initial guess");
  double cost = 0.5 * r.squaredNorm();
  Eigen::MatrixXd jac = jacobian(pb, x, opt.fd_relative_step);
  Eigen::VectorXd g = jac.transpose() * r;
  double lambda = opt.initial_damping;
  double nu = 2.0;

  std::size_t it = 0;
  // Iterations left to drive the gradient down once the cost has settled.
  std::size_t polish = 0;
  bool cost_settled = false;
  while (m > 0 && it < opt.max_iterations) {
    const auto active = active_mask(pb, x, g);
    if (cost == 0.0 || projected_norm(g, active) < opt.gradient_tol) {
      res.converged = true;
      break;
    }
    ++it;
    std::vector<Eigen::Index> idx;
    for (std::size_t k = 0; k < active.size(); ++k)
      if (active[k]) idx.push_back(static_cast<Eigen::Index>(k));
    const auto ma = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd a(ma, ma);
    Eigen::VectorXd ga(ma);
    for (Eigen::Index i = 0; i < ma; ++i) {
      ga(i) = g(idx[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < ma; ++j)
        a(i, j) = jac.col(idx[static_cast<std::size_t>(i)]).dot(jac.col(idx[static_cast<std::size_t>(j)]));
    }
    const double diag_floor = 1e-12 * std::max(a.diagonal().maxCoeff(), 1e-300);

    Eigen::VectorXd step;
    while (true) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index i = 0; i < ma; ++i) damped(i, i) += lambda * std::max(a(i, i), diag_floor);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(-ga);
        if (step.allFinite()) break;
      }
      lambda *= 10.0;
      require(lambda < 1e20, ErrorKind::kSingular, "normal equations are singular");
    }

    Eigen::VectorXd x_new = x;
    for (Eigen::Index i = 0; i < ma; ++i) {
      const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
      x_new(idx[static_cast<std::size_t>(i)]) =
          std::clamp(x(idx[static_cast<std::size_t>(i)]) + step(i), lower_of(pb, k), upper_of(pb, k));
    }
    const Eigen::VectorXd delta = x_new - x;
    const Eigen::VectorXd r_new = eval(pb, x_new);
    const double cost_new = r_new.allFinite() ? 0.5 * r_new.squaredNorm()
                                              : std::numeric_limits<double>::infinity();
    const Eigen::VectorXd jd = jac * delta;
    const double predicted = -(g.dot(delta) + 0.5 * jd.squaredNorm());
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;

    if (cost_new < cost && rho > 0.0) {
      const double rel_change = (cost - cost_new) / cost;
      x = x_new;
      r = r_new;
      cost = cost_new;
      jac = jacobian(pb, x, opt.fd_relative_step);
      g = jac.transpose() * r;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (rel_change < opt.cost_rtol && !cost_settled) {
        cost_settled = true;
        polish = 20;
      }
      if (cost_settled && polish-- == 0) {
        res.converged = true;
        break;
      }
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e16) {
        // No representable descent step remains: a minimum to working precision.
        res.converged = true;
        // Warn only if a full Gauss-Newton step still predicts a real decrease.
        const double newton = 0.5 * ga.dot(a.completeOrthogonalDecomposition().solve(ga));
        if (!cost_settled && !(newton <= 1e-8 * cost))
          res.warnings.emplace_back("step search stalled at numerical precision");
        break;
      }
    }
  }
  if (m == 0) res.converged = true;
  if (!res.converged) res.warnings.emplace_back("iteration limit reached");

  const auto active = active_mask(pb, x, g);
  res.gradient_norm = projected_norm(g, active);
  res.iterations = it;
  res.points = pb.n;
  res.chi2 = 2.0 * cost;
  res.dof = pb.n > pb.free.size() ? pb.n - pb.free.size() : 0;
  res.reduced_chi2 = res.dof > 0 ? res.chi2 / static_cast<double>(res.dof) : 0.0;

  const auto full = full_vector(pb, x);
  res.values = Eigen::Map<const Eigen::VectorXd>(full.data(), static_cast<Eigen::Index>(np));
  res.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  if (m > 0) {
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(normal);
    if (cod.rank() < m) res.warnings.emplace_back("covariance is rank deficient");
    Eigen::MatrixXd cov = cod.pseudoInverse();
    cov = 0.5 * (cov + cov.transpose()).eval();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        res.covariance(pb.free[static_cast<std::size_t>(i)], pb.free[static_cast<std::size_t>(j)]) = cov(i, j);
  }
  for (const auto& p : pb.params) {
    res.names.push_back(p.name);
    res.units.push_back(p.unit);
    res.fixed.push_back(p.fixed);
  }
  return res;
}

}  // namespace

std::size_t FitResult::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  require(it != names.end(), ErrorKind::kInvalidArgument, "unknown fit parameter: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::error(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(std::max(covariance(i, i), 0.0));
}

FitResult fit_residuals(const ResidualFn& residuals, std::size_t n_residuals,
                        const std::vector<Parameter>& params, const FitOptions& options) {
  require(n_residuals > 0, ErrorKind::kInvalidArgument, "no residuals to fit");
  require(!params.empty(), ErrorKind::kInvalidArgument, "no parameters to fit");
  Problem pb{residuals, n_residuals, params, {}, {}};
  return solve(pb, options);
}

FitResult fit_nlls(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma, const std::vector<Parameter>& params,
                   const FitOptions& options) {
  require(x.size() == y.size() && x.size() == sigma.size(), ErrorKind::kShape,
          "x, y and sigma lengths differ");
  require(!x.empty(), ErrorKind::kInvalidArgument, "no data to fit");
  for (double s : sigma)
    require(s > 0.0 && std::isfinite(s), ErrorKind::kInvalidArgument, "sigma must be positive");
  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = (y[i] - model(x[i], p)) / sigma[i];
  };
  auto res = fit_residuals(fn, x.size(), params, options);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  res.range_lower = *lo;
  res.range_upper = *hi;
  return res;
}

}  // namespace swingup::fit
