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

// Lindblad dynamics of the emitter in the rotating frame of the C transition.

#include <Eigen/Core>

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "swingup/grid.hpp"
#include "swingup/pulsecraft.hpp"

namespace swingup::dynamics {

inline constexpr int kMaxLevels = 4;
inline constexpr double kPaperT1Ns = 16.2;
inline constexpr double kPaperT2StarNs = 10.9;
inline constexpr double kDTransitionOffsetGhz = 830.0;

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxLevels,
                             kMaxLevels>;
/// Density matrices are plain matrices; see diagnose() for their invariants.
using DensityMatrix = Matrix;

enum class Manifold { kGround, kExcited };

struct Level {
  std::string label;
  Manifold manifold = Manifold::kGround;
  double energy = 0.0;  // GHz above the manifold's reference level (|1> or |3>)
};

struct Transition {
  std::string label;
  std::size_t lower = 0;
  std::size_t upper = 0;
  double relative_dipole = 1.0;  // (0, 1]
  double branching = 1.0;        // share of the upper level's decay into this channel
};

struct FourLevelParams {
  double t1_ns = kPaperT1Ns;
  double t2star_ns = std::numeric_limits<double>::infinity();
  double ground_splitting_ghz = kDTransitionOffsetGhz;  // |2> above |1>
  double excited_splitting_ghz = 3000.0;                // |4> above |3>
  double branching_c = 0.5;  // |3> -> |1>; the rest goes to |2>
  double branching_a = 0.5;  // |4> -> |1>; the rest goes to |2>
  std::array<double, 4> dipoles{1.0, 1.0, 1.0, 1.0};  // C, D, A, B
};

class EmitterModel {
 public:
  /// pure_dephasing_rate is the excited-state coherence decay contribution in
  /// 1/ns; t1_ns may be +inf for a non-decaying emitter.
  EmitterModel(std::vector<Level> levels, std::vector<Transition> transitions, double t1_ns,
               double pure_dephasing_rate);

  /// Levels {|1>, |3>} joined by the C transition.
  static EmitterModel two_level(double t1_ns = kPaperT1Ns,
                                double t2star_ns = std::numeric_limits<double>::infinity());
  /// Levels |1>, |2> (ground) and |3>, |4> (excited) with transitions C, D, A, B.
  static EmitterModel four_level(const FourLevelParams& params = {});

  /// gamma* = 1/T2* - 1/(2 T1). Requires T2* <= 2 T1.
  static double dephasing_rate_from_t2star(double t1_ns, double t2star_ns);

  std::size_t dimension() const { return levels_.size(); }
  std::span<const Level> levels() const { return levels_; }
  std::span<const Transition> transitions() const { return transitions_; }
  double t1() const { return t1_ns_; }
  double pure_dephasing_rate() const { return dephasing_; }
  /// 1/T2* implied by T1 and the pure dephasing rate, in 1/ns.
  double coherence_decay_rate() const;

  std::size_t index_of(const std::string& label) const;
  /// Level |1>: the state every experiment starts from.
  std::size_t ground_index() const { return 0; }
  /// Upper level of the first transition (the C transition's |3>).
  std::size_t radiative_index() const { return transitions_.front().upper; }

  EmitterModel with_lifetimes(double t1_ns, double pure_dephasing_rate) const;
  EmitterModel without_dissipation() const;

 private:
  std::vector<Level> levels_;
  std::vector<Transition> transitions_;
  double t1_ns_;
  double dephasing_;
};

/// Rotating-wave Hamiltonian in rad/ps for a complex drive (rad/ps) in a frame
/// rotating `frame_detuning` GHz away from the C transition.
Matrix build_hamiltonian(const EmitterModel& model, cplx drive, double frame_detuning = 0.0);

/// Precomputed right-hand side of the master equation
///   d rho/dt = -i[H(t), rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho}).
class Liouvillian {
 public:
  explicit Liouvillian(const EmitterModel& model, double frame_detuning = 0.0);

  void apply(cplx drive, const Matrix& rho, Matrix& out) const;
  std::size_t dimension() const { return static_cast<std::size_t>(h0_.rows()); }

 private:
  struct Jump {
    Eigen::Index row;
    Eigen::Index col;
    double rate;  // 1/ps
  };
  Matrix h0_;        // diagonal part minus i/2 sum L^+L
  Matrix coupling_;  // relative dipoles at (upper, lower)
  std::vector<Jump> jumps_;
};

struct StateDiagnostics {
  double trace_error = 0.0;        // |tr rho - 1|
  double hermiticity_error = 0.0;  // max |rho - rho^+|
  double min_eigenvalue = 0.0;
};

StateDiagnostics diagnose(const Matrix& rho);
DensityMatrix pure_state(const EmitterModel& model, std::size_t level);
DensityMatrix ground_state(const EmitterModel& model);

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();  // ps
  double initial_step = 0.0;                                  // 0 = automatic
  double min_step = 1e-12;                                    // ps
  std::size_t max_steps = 50'000'000;
  /// Check trace/Hermiticity/positivity at every accepted step. Disable only
  /// for propagating non-physical operators (e.g. superoperator columns).
  bool check_invariants = true;
  double trace_tol = 1e-9;
  double hermiticity_tol = 1e-12;
  double eigenvalue_tol = 1e-9;
};

/// Accepted steps of a solve with their derivatives; times in ps.
class Trajectory {
 public:
  void push(double t, Matrix rho, Matrix drho);

  std::size_t size() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const Matrix> states() const { return states_; }
  std::span<const Matrix> derivatives() const { return derivatives_; }
  const Matrix& final_state() const { return states_.back(); }

  /// Cubic Hermite dense output; t is clamped to the trajectory span.
  Matrix state_at(double t) const;
  std::vector<double> population(std::size_t level) const;
  std::vector<double> sample_population(std::size_t level, std::span<const double> times) const;

 private:
  std::vector<double> times_;
  std::vector<Matrix> states_;
  std::vector<Matrix> derivatives_;
};

using DriveFunction = std::function<cplx(double t_ps)>;

/// General master-equation solve over [t0, t1] (ps) under `drive`.
Trajectory evolve_drive(const EmitterModel& model, const DensityMatrix& rho0,
                        const DriveFunction& drive, double t0, double t1,
                        const IntegratorOptions& options = {});

/// Solve across the support of a shaped pulse.
Trajectory evolve(const EmitterModel& model, const DensityMatrix& rho0,
                  const pulse::TemporalEnvelope& pulse, const IntegratorOptions& options = {});
Trajectory evolve(const EmitterModel& model, const DensityMatrix& rho0,
                  const pulse::TemporalEnvelope& pulse, double rel_tol, double abs_tol);

/// Constant resonant drive switched on at t = 0 from |1>; rabi in rad/ns,
/// duration in ns. Trajectory times remain in ps.
Trajectory evolve_quasi_cw(const EmitterModel& model, double rabi_frequency, double duration,
                           const IntegratorOptions& options = {});

/// Undriven evolution for `duration` ns.
Trajectory free_decay(const EmitterModel& model, const DensityMatrix& rho0, double duration);

/// Pauli expectations (x, y, z) with z = rho_ee - rho_gg. Two-level only.
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

/// Population left outside {|1>, |3>} after the pulse, starting from |1>.
double cross_coupling_leakage(const EmitterModel& model, const pulse::TemporalEnvelope& pulse,
                              const IntegratorOptions& options = {});

}  // namespace swingup::dynamics
