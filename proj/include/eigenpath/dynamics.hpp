// Copyright 2026 The Eigenpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Learning dynamics of tabular policy evaluation.
//
// Continuous-time TD is the linear ODE dQ/dt = -(I - gamma P^pi) Q + r whose
// error obeys Q_t - Q* = expm(-t (I - gamma P^pi)) (Q_0 - Q*). The discrete
// learners are synchronous expected-update sweeps.

#ifndef EIGENPATH_DYNAMICS_HPP_
#define EIGENPATH_DYNAMICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "eigenpath/erc.hpp"
#include "eigenpath/mdp.hpp"

namespace eigenpath {

// Time-indexed record of the approximation error Q_t - Q*.
struct PathTrace {
  std::vector<double> times;
  std::vector<Vector> errors;  // errors[k] is Q_{t_k} - Q*
  std::vector<double> error_norms;
  std::vector<double> subspace_distances;

  std::size_t size() const { return times.size(); }
  // Appends a row, computing its L2 norm and subspace distance.
  void push(double time, const Eigen::Ref<const Vector>& error);
  // Errors stacked as rows.
  Matrix error_matrix() const;

  // step,time,error_l2,subspace_distance[,e0,...]; per-entry columns only
  // when full is set.
  void write_csv(std::ostream& out, bool full) const;
};

// Propagates an error vector through expm(-t (I - gamma P^pi)).
class ErrorPropagator {
 public:
  ErrorPropagator(const InducedTransition& p_pi, double gamma);
  Vector propagate(const Eigen::Ref<const Vector>& error0, double t) const;

 private:
  Matrix generator_;  // -(I - gamma P^pi)
};

// expm(-t (I - gamma P^pi)) (q0 - q_star); exactly q0 - q_star at t = 0.
Vector closed_form_error(const InducedTransition& p_pi, double gamma, const QTable& q0,
                         const QTable& q_star, double t);

inline constexpr std::size_t kMaxOdeSteps = 100'000'000;

// One classical RK4 step of the TD ODE.
Vector rk4_step(const EvaluationModel& model, const Eigen::Ref<const Vector>& q, double dt);

// Fixed-step RK4 from q0 to t_end. The step is t_end / ceil(t_end / dt), so the
// last row lands on t_end exactly and no step exceeds dt.
PathTrace integrate_td_ode(const EvaluationModel& model, const QTable& q0, double t_end,
                           double dt);

// q + lr (Bq - q)
QTable discrete_td_sweep(const EvaluationModel& model, const QTable& q, double lr);

enum class Stepper { kOde, kTd, kErc, kErcStar };

struct StepperConfig {
  Stepper kind = Stepper::kTd;
  ErcConfig erc;      // lr is shared by the TD learner; beta unused there
  double dt = 0.01;   // ODE only
};

// Runs `steps` updates from q0 and logs the error after each one (steps + 1
// rows, the first being q0 - Q*). Q* is solved exactly.
PathTrace record_inherent_path(const EvaluationModel& model, const QTable& q0,
                               const StepperConfig& config, std::size_t steps);
PathTrace record_inherent_path(const EvaluationModel& model, const QTable& q0,
                               const QTable& q_star, const StepperConfig& config,
                               std::size_t steps);

// Zero table plus independent N(0, scale^2) entries drawn from a generator
// seeded with `seed`. scale = 0 gives exactly zero.
QTable perturbed_initial_q(Index n_states, Index n_actions, double scale,
                           std::uint64_t seed);

// First row index whose value is at or below fraction * series[0]; nullopt if
// none. Used to compare when the distance and norm series settle.
std::optional<std::size_t> first_drop_below(const std::vector<double>& series,
                                            double fraction);

}  // namespace eigenpath

#endif  // EIGENPATH_DYNAMICS_HPP_
