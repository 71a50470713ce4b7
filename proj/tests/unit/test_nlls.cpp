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
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "swingup/error.hpp"
#include "swingup/nlls.hpp"

using namespace swingup;
using namespace swingup::fit;

namespace {

double decay_model(double x, std::span<const double> p) { return p[0] * std::exp(-x / p[1]) + p[2]; }

struct DecayData {
  std::vector<double> x, y, s;
};

DecayData noisy_decay(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  DecayData d;
  for (int i = 0; i < 200; ++i) {
    const double x = 0.1 * i;
    const std::array<double, 3> truth{5.0, 3.0, 0.5};
    d.x.push_back(x);
    d.s.push_back(0.05);
    d.y.push_back(decay_model(x, truth) + 0.05 * noise(rng));
  }
  return d;
}

std::vector<Parameter> decay_params(double a, double tau, double c) {
  return {{"a", "", a}, {"tau", "s", tau, 0.0}, {"c", "", c}};
}

double chi2(const DecayData& d, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double r = (d.y[i] - decay_model(d.x[i], p)) / d.s[i];
    sum += r * r;
  }
  return sum;
}

}  // namespace

TEST_CASE("exact data and a perfect guess return the truth") {
  std::vector<double> x, y, s;
  for (int i = 0; i < 50; ++i) {
    x.push_back(0.2 * i);
    y.push_back(decay_model(x.back(), std::array<double, 3>{2.0, 1.5, 0.1}));
    s.push_back(0.01);
  }
  const auto r = fit_nlls(decay_model, x, y, s, decay_params(2.0, 1.5, 0.1));
  CHECK(r.converged);
  CHECK(r.chi2 < 1e-20);
  CHECK(r.value("a") == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.value("tau") == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(r.dof == 47);
}

TEST_CASE("noisy nonlinear fit converges from a poor guess") {
  const auto d = noisy_decay(1);
  const auto r = fit_nlls(decay_model, d.x, d.y, d.s, decay_params(1.0, 10.0, 0.0));
  REQUIRE(r.converged);
  CHECK(std::abs(r.value("a") - 5.0) < 3.0 * r.error("a"));
  CHECK(std::abs(r.value("tau") - 3.0) < 3.0 * r.error("tau"));
  CHECK(std::abs(r.value("c") - 0.5) < 3.0 * r.error("c"));
  CHECK(r.reduced_chi2 == doctest::Approx(1.0).epsilon(0.25));
  CHECK(r.points == 200);
  CHECK(r.range_lower == 0.0);
  CHECK(r.range_upper == doctest::Approx(19.9));
}

TEST_CASE("gradient vanishes at a converged solution") {
  const auto d = noisy_decay(2);
  const auto r = fit_nlls(decay_model, d.x, d.y, d.s, decay_params(4.0, 2.0, 0.3));
  REQUIRE(r.converged);
  CHECK(r.gradient_norm < 1e-8);
  // Independent check: central differences of chi2 around the solution,
  // compared with the curvature scale so the test is unit free.
  std::vector<double> p(r.values.data(), r.values.data() + r.values.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(p[k]));
    auto lo = p, hi = p;
    lo[k] -= h;
    hi[k] += h;
    const double grad = (chi2(d, hi) - chi2(d, lo)) / (2.0 * h);
    const double curv = (chi2(d, hi) - 2.0 * chi2(d, p) + chi2(d, lo)) / (h * h);
    // Newton step implied by the finite-difference gradient, in units of the parameter error.
    CHECK(std::abs(grad / curv) < 1e-6 * std::max(1.0, std::abs(p[k])));
  }
}

TEST_CASE("linear model covariance matches ordinary least squares") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x, y, s;
  for (int i = 0; i < 100; ++i) {
    x.push_back(0.3 * i - 10.0);
    s.push_back(0.2 + 0.01 * i);
    y.push_back(1.5 - 0.7 * x.back() + s.back() * noise(rng));
  }
  const ModelFn line = [](double xi, std::span<const double> p) { return p[0] + p[1] * xi; };
  const auto r = fit_nlls(line, x, y, s, {{"a", "", 0.0}, {"b", "", 0.0}});
  const auto ols = swingup::testing::weighted_line(x, y, s);
  CHECK(r.values(0) == doctest::Approx(ols[0]).epsilon(1e-8));
  CHECK(r.values(1) == doctest::Approx(ols[1]).epsilon(1e-8));
  CHECK(r.covariance(0, 0) == doctest::Approx(ols[2]).epsilon(0.05));
  CHECK(r.covariance(1, 1) == doctest::Approx(ols[3]).epsilon(0.05));
  CHECK(r.covariance(0, 1) == doctest::Approx(ols[4]).epsilon(0.05));
  CHECK(std::abs(r.values(0) - 1.5) < 3.0 * std::sqrt(ols[2]));
  CHECK(std::abs(r.values(1) + 0.7) < 3.0 * std::sqrt(ols[3]));
}

TEST_CASE("invalid weights and shapes are rejected") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 2, 3, 4}, zeros(4, 0.0), short_s{1, 1};
  const ModelFn line = [](double xi, std::span<const double> p) { return p[0] + p[1] * xi; };
  const std::vector<Parameter> ps{{"a", "", 0.0}, {"b", "", 0.0}};
  CHECK_THROWS_AS(fit_nlls(line, x, y, zeros, ps), Error);
  CHECK_THROWS_AS(fit_nlls(line, x, y, short_s, ps), Error);
  try {
    fit_nlls(line, x, y, short_s, ps);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kShape);
  }
  CHECK_THROWS_AS(fit_nlls(line, x, y, std::vector<double>(4, 1.0), {{"a", "", 0.0, 1.0, -1.0}}), Error);
}

TEST_CASE("bounds and fixed parameters") {
  const auto d = noisy_decay(3);
  auto ps = decay_params(4.0, 2.0, 0.3);
  ps[2].value = 0.0;
  ps[2].fixed = true;
  ps[1].upper = 2.5;
  const auto r = fit_nlls(decay_model, d.x, d.y, d.s, ps);
  CHECK(r.value("c") == 0.0);
  CHECK(r.error("c") == 0.0);
  CHECK(r.fixed[2]);
  CHECK(r.value("tau") <= 2.5);
  CHECK(r.value("tau") == doctest::Approx(2.5));
  CHECK(r.dof == 198);
  CHECK_THROWS_AS(r.index("missing"), Error);
}

TEST_CASE("caller-supplied residuals") {
  // Rosenbrock as a least-squares problem.
  const ResidualFn f = [](std::span<const double> p, std::span<double> r) {
    r[0] = 10.0 * (p[1] - p[0] * p[0]);
    r[1] = 1.0 - p[0];
  };
  const auto r = fit_residuals(f, 2, {{"x", "", -1.2}, {"y", "", 1.0}});
  CHECK(r.converged);
  CHECK(r.values(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.values(1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fits are deterministic") {
  const auto d = noisy_decay(4);
  const auto a = fit_nlls(decay_model, d.x, d.y, d.s, decay_params(1.0, 1.0, 0.0));
  const auto b = fit_nlls(decay_model, d.x, d.y, d.s, decay_params(1.0, 1.0, 0.0));
  CHECK(a.values == b.values);
  CHECK(a.covariance == b.covariance);
  CHECK(a.iterations == b.iterations);
}
