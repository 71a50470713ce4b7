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

#include "swingup/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "swingup/error.hpp"

namespace swingup::dynamics {
namespace {

double rate_per_ps(double per_ns) { return per_ns / kPsPerNs; }

}  // namespace

// ---------------------------------------------------------------- model

EmitterModel::EmitterModel(std::vector<Level> levels, std::vector<Transition> transitions,
                           double t1_ns, double pure_dephasing_rate)
    : levels_(std::move(levels)),
      transitions_(std::move(transitions)),
      t1_ns_(t1_ns),
      dephasing_(pure_dephasing_rate) {
  const auto n = levels_.size();
  require(n >= 2 && n <= static_cast<std::size_t>(kMaxLevels), ErrorKind::kDimension,
          "emitter models need between 2 and 4 levels");
  require(!transitions_.empty(), ErrorKind::kInvalidArgument, "emitter needs a transition");
  require(t1_ns > 0.0, ErrorKind::kInvalidArgument, "T1 must be positive");
  require(pure_dephasing_rate >= 0.0 && std::isfinite(pure_dephasing_rate),
          ErrorKind::kInvalidArgument, "pure dephasing rate must be finite and non-negative");
  for (const auto& level : levels_) {
    require(std::isfinite(level.energy), ErrorKind::kInvalidArgument,
            "level energies must be real and finite");
  }
  require(levels_.front().manifold == Manifold::kGround, ErrorKind::kInvalidArgument,
          "the first level must be the ground level |1>");
  std::vector<double> branching(n, 0.0);
  for (const auto& t : transitions_) {
    require(t.lower < n && t.upper < n, ErrorKind::kInvalidArgument,
            "transition refers to an unknown level");
    require(levels_[t.lower].manifold == Manifold::kGround &&
                levels_[t.upper].manifold == Manifold::kExcited,
            ErrorKind::kInvalidArgument, "transitions connect a ground to an excited level");
    require(t.relative_dipole > 0.0 && t.relative_dipole <= 1.0, ErrorKind::kInvalidArgument,
            "relative dipole must lie in (0, 1]");
    require(t.branching >= 0.0 && t.branching <= 1.0, ErrorKind::kInvalidArgument,
            "branching ratio must lie in [0, 1]");
    branching[t.upper] += t.branching;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (levels_[i].manifold == Manifold::kExcited && branching[i] > 0.0) {
      require(std::abs(branching[i] - 1.0) < 1e-9, ErrorKind::kInvalidArgument,
              "branching ratios out of level " + levels_[i].label + " must sum to 1");
    }
  }
}

double EmitterModel::dephasing_rate_from_t2star(double t1_ns, double t2star_ns) {
  require(t1_ns > 0.0 && t2star_ns > 0.0, ErrorKind::kInvalidArgument,
          "T1 and T2* must be positive");
  if (std::isinf(t2star_ns)) return 0.0;
  const double rate = 1.0 / t2star_ns - 0.5 / t1_ns;
  require(rate >= -1e-12, ErrorKind::kInvalidArgument, "T2* cannot exceed 2 T1");
  return std::max(rate, 0.0);
}

EmitterModel EmitterModel::two_level(double t1_ns, double t2star_ns) {
  return EmitterModel({{"1", Manifold::kGround, 0.0}, {"3", Manifold::kExcited, 0.0}},
                      {{"C", 0, 1, 1.0, 1.0}}, t1_ns,
                      dephasing_rate_from_t2star(t1_ns, t2star_ns));
}

EmitterModel EmitterModel::four_level(const FourLevelParams& p) {
  std::vector<Level> levels{{"1", Manifold::kGround, 0.0},
                            {"2", Manifold::kGround, p.ground_splitting_ghz},
                            {"3", Manifold::kExcited, 0.0},
                            {"4", Manifold::kExcited, p.excited_splitting_ghz}};
  std::vector<Transition> transitions{{"C", 0, 2, p.dipoles[0], p.branching_c},
                                      {"D", 1, 2, p.dipoles[1], 1.0 - p.branching_c},
                                      {"A", 0, 3, p.dipoles[2], p.branching_a},
                                      {"B", 1, 3, p.dipoles[3], 1.0 - p.branching_a}};
  return EmitterModel(std::move(levels), std::move(transitions), p.t1_ns,
                      dephasing_rate_from_t2star(p.t1_ns, p.t2star_ns));
}

double EmitterModel::coherence_decay_rate() const { return 0.5 / t1_ns_ + dephasing_; }

std::size_t EmitterModel::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].label == label) return i;
  }
  fail(ErrorKind::kInvalidArgument, "no level labelled " + label);
}

EmitterModel EmitterModel::with_lifetimes(double t1_ns, double pure_dephasing_rate) const {
  return EmitterModel(levels_, transitions_, t1_ns, pure_dephasing_rate);
}

EmitterModel EmitterModel::without_dissipation() const {
  return with_lifetimes(std::numeric_limits<double>::infinity(), 0.0);
}

// ---------------------------------------------------------------- operators

Matrix build_hamiltonian(const EmitterModel& model, cplx drive, double frame_detuning) {
  require(std::isfinite(drive.real()) && std::isfinite(drive.imag()),
          ErrorKind::kInvalidArgument, "drive must be finite");
  const auto n = static_cast<Eigen::Index>(model.dimension());
  Matrix h = Matrix::Zero(n, n);
  const auto levels = model.levels();
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& level = levels[static_cast<std::size_t>(j)];
    const double offset =
        level.manifold == Manifold::kExcited ? level.energy - frame_detuning : level.energy;
    h(j, j) = ghz_to_rad_per_ps(offset);
  }
  for (const auto& t : model.transitions()) {
    const auto u = static_cast<Eigen::Index>(t.upper);
    const auto l = static_cast<Eigen::Index>(t.lower);
    h(u, l) += 0.5 * t.relative_dipole * drive;
    h(l, u) += 0.5 * t.relative_dipole * std::conj(drive);
  }
  return h;
}

Liouvillian::Liouvillian(const EmitterModel& model, double frame_detuning) {
  const auto n = static_cast<Eigen::Index>(model.dimension());
  h0_ = build_hamiltonian(model, cplx{}, frame_detuning);
  coupling_ = Matrix::Zero(n, n);
  for (const auto& t : model.transitions()) {
    coupling_(static_cast<Eigen::Index>(t.upper), static_cast<Eigen::Index>(t.lower)) =
        t.relative_dipole;
    if (std::isfinite(model.t1()) && t.branching > 0.0) {
      jumps_.push_back({static_cast<Eigen::Index>(t.lower), static_cast<Eigen::Index>(t.upper),
                        rate_per_ps(t.branching / model.t1())});
    }
  }
  // Pure dephasing sqrt(2 gamma*) |e><e| damps excited coherences at gamma*.
  if (model.pure_dephasing_rate() > 0.0) {
    const auto levels = model.levels();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (levels[static_cast<std::size_t>(j)].manifold == Manifold::kExcited) {
        jumps_.push_back({j, j, rate_per_ps(2.0 * model.pure_dephasing_rate())});
      }
    }
  }
  for (const auto& jump : jumps_) h0_(jump.col, jump.col) -= cplx(0.0, 0.5 * jump.rate);
}

void Liouvillian::apply(cplx drive, const Matrix& rho, Matrix& out) const {
  // out = -i (H_eff rho - rho H_eff^+) + sum_k L_k rho L_k^+ with H_eff = H - i/2 sum L^+L.
  Matrix h = h0_;
  const cplx half = 0.5 * drive;
  h.noalias() += half * coupling_;
  h.noalias() += std::conj(half) * coupling_.transpose();
  out.noalias() = cplx(0.0, -1.0) * (h * rho - rho * h.adjoint());
  for (const auto& jump : jumps_) out(jump.row, jump.row) += jump.rate * rho(jump.col, jump.col);
}

// ---------------------------------------------------------------- states

StateDiagnostics diagnose(const Matrix& rho) {
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

DensityMatrix pure_state(const EmitterModel& model, std::size_t level) {
  require(level < model.dimension(), ErrorKind::kInvalidArgument, "level index out of range");
  const auto n = static_cast<Eigen::Index>(model.dimension());
  DensityMatrix rho = DensityMatrix::Zero(n, n);
  rho(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return rho;
}

DensityMatrix ground_state(const EmitterModel& model) {
  return pure_state(model, model.ground_index());
}

// ---------------------------------------------------------------- trajectory

void Trajectory::push(double t, Matrix rho, Matrix drho) {
  require(times_.empty() || t > times_.back(), ErrorKind::kIntegratorFailure,
          "trajectory times must increase strictly");
  times_.push_back(t);
  states_.push_back(std::move(rho));
  derivatives_.push_back(std::move(drho));
}

Matrix Trajectory::state_at(double t) const {
  require(!times_.empty(), ErrorKind::kInvalidArgument, "empty trajectory");
  if (t <= times_.front()) return states_.front();
  if (t >= times_.back()) return states_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double h = times_[i + 1] - times_[i];
  const double u = (t - times_[i]) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * states_[i] + (u3 - 2 * u2 + u) * h * derivatives_[i] +
         (-2 * u3 + 3 * u2) * states_[i + 1] + (u3 - u2) * h * derivatives_[i + 1];
}

std::vector<double> Trajectory::population(std::size_t level) const {
  std::vector<double> out;
  out.reserve(states_.size());
  const auto k = static_cast<Eigen::Index>(level);
  for (const auto& s : states_) out.push_back(s(k, k).real());
  return out;
}

std::vector<double> Trajectory::sample_population(std::size_t level,
                                                  std::span<const double> times) const {
  std::vector<double> out;
  out.reserve(times.size());
  const auto k = static_cast<Eigen::Index>(level);
  for (double t : times) out.push_back(state_at(t)(k, k).real());
  return out;
}

// ---------------------------------------------------------------- drivers

Trajectory evolve(const EmitterModel& model, const DensityMatrix& rho0,
                  const pulse::TemporalEnvelope& pulse, const IntegratorOptions& options) {
  const auto [t0, t1] = pulse.support();
  IntegratorOptions opts = options;
  // Cap the step so the solver cannot stride across the pulse from its tails.
  opts.max_step = std::min({opts.max_step, 10.0 * pulse.time().step(), (t1 - t0) / 100.0});
  return evolve_drive(
      model, rho0, [&pulse](double t) { return pulse.rabi_at(t); }, t0, t1, opts);
}

Trajectory evolve(const EmitterModel& model, const DensityMatrix& rho0,
                  const pulse::TemporalEnvelope& pulse, double rel_tol, double abs_tol) {
  require(rel_tol > 0.0 && rel_tol <= 1e-2 && abs_tol > 0.0 && abs_tol <= 1e-2,
          ErrorKind::kInvalidArgument, "tolerances must lie in (0, 1e-2]");
  IntegratorOptions options;
  options.rel_tol = rel_tol;
  options.abs_tol = abs_tol;
  return evolve(model, rho0, pulse, options);
}

Trajectory evolve_quasi_cw(const EmitterModel& model, double rabi_frequency, double duration,
                           const IntegratorOptions& options) {
  require(duration > 0.0, ErrorKind::kInvalidArgument, "duration must be positive");
  require(std::isfinite(rabi_frequency), ErrorKind::kInvalidArgument, "Rabi frequency must be finite");
  const cplx drive(rabi_frequency / kPsPerNs, 0.0);
  IntegratorOptions opts = options;
  opts.max_step = std::min(opts.max_step, duration * kPsPerNs / 200.0);
  return evolve_drive(
      model, ground_state(model), [drive](double) { return drive; }, 0.0, duration * kPsPerNs,
      opts);
}

Trajectory free_decay(const EmitterModel& model, const DensityMatrix& rho0, double duration) {
  require(duration > 0.0, ErrorKind::kInvalidArgument, "duration must be positive");
  IntegratorOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  return evolve_drive(
      model, rho0, [](double) { return cplx{}; }, 0.0, duration * kPsPerNs, opts);
}

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
  require(rho.rows() == 2 && rho.cols() == 2, ErrorKind::kDimension,
          "Bloch vectors need a two-level state");
  return {2.0 * rho(0, 1).real(), 2.0 * rho(0, 1).imag(), (rho(1, 1) - rho(0, 0)).real()};
}

double cross_coupling_leakage(const EmitterModel& model, const pulse::TemporalEnvelope& pulse,
                              const IntegratorOptions& options) {
  require(model.dimension() == 4, ErrorKind::kDimension,
          "cross-coupling leakage needs the four-level model");
  const auto c = model.transitions().front();
  const auto traj = evolve(model, ground_state(model), pulse, options);
  const auto& rho = traj.final_state();
  const auto lo = static_cast<Eigen::Index>(c.lower);
  const auto up = static_cast<Eigen::Index>(c.upper);
  return std::max(0.0, 1.0 - rho(lo, lo).real() - rho(up, up).real());
}

}  // namespace swingup::dynamics
