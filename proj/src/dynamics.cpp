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

#include "eigenpath/dynamics.hpp"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "eigenpath/csv.hpp"
#include "eigenpath/errors.hpp"
#include "eigenpath/spectral.hpp"

namespace eigenpath {

void PathTrace::push(double time, const Eigen::Ref<const Vector>& error) {
  if (!error.allFinite()) throw NumericalError("non-finite approximation error in trace");
  if (!errors.empty() && errors.front().size() != error.size()) {
    throw DimensionError("trace rows must share one length");
  }
  errors.emplace_back(error);
  times.push_back(time);
  error_norms.push_back(error.norm());
  subspace_distances.push_back(distance_to_one_eigensubspace(error));
}

Matrix PathTrace::error_matrix() const {
  if (errors.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Index>(errors.size()), errors.front().size());
  for (std::size_t k = 0; k < errors.size(); ++k) {
    out.row(static_cast<Index>(k)) = errors[k].transpose();
  }
  return out;
}

void PathTrace::write_csv(std::ostream& out, bool full) const {
  std::vector<std::string> header{"step", "time", "error_l2", "subspace_distance"};
  if (full) {
    const Index cols = errors.empty() ? 0 : errors.front().size();
    for (Index j = 0; j < cols; ++j) header.push_back("e" + std::to_string(j));
  }
  CsvWriter csv(out, header);
  for (std::size_t k = 0; k < size(); ++k) {
    if (!full) {
      csv.row(k, times[k], error_norms[k], subspace_distances[k]);
      continue;
    }
    out << k << ',' << format_real(times[k]) << ',' << format_real(error_norms[k]) << ','
        << format_real(subspace_distances[k]);
    for (Index j = 0; j < errors[k].size(); ++j) out << ',' << format_real(errors[k](j));
    out << '\n';
  }
}

ErrorPropagator::ErrorPropagator(const InducedTransition& p_pi, double gamma)
    : generator_(gamma * p_pi.matrix() - Matrix::Identity(p_pi.size(), p_pi.size())) {}

Vector ErrorPropagator::propagate(const Eigen::Ref<const Vector>& error0, double t) const {
  if (!(t >= 0.0)) throw InvariantError("time must be non-negative");
  if (error0.size() != generator_.rows()) {
    throw DimensionError("error vector does not match P^pi");
  }
  if (t == 0.0) return error0;
  const Matrix scaled = t * generator_;
  const Matrix propagator = scaled.exp();
  return propagator * error0;
}

Vector closed_form_error(const InducedTransition& p_pi, double gamma, const QTable& q0,
                         const QTable& q_star, double t) {
  if (q0.size() != q_star.size()) throw DimensionError("q0 and q_star differ in length");
  return ErrorPropagator(p_pi, gamma).propagate(q0.values() - q_star.values(), t);
}

namespace {

Vector td_field(const EvaluationModel& model, const Eigen::Ref<const Vector>& q) {
  return model.reward() + model.gamma() * (model.transition().matrix() * q) - q;
}

void check_q(const EvaluationModel& model, const QTable& q) {
  if (q.n_states() != model.n_states() || q.n_actions() != model.n_actions()) {
    throw DimensionError("Q table does not match the evaluation model");
  }
}

}  // namespace

Vector rk4_step(const EvaluationModel& model, const Eigen::Ref<const Vector>& q, double dt) {
  const Vector k1 = td_field(model, q);
  const Vector k2 = td_field(model, q + 0.5 * dt * k1);
  const Vector k3 = td_field(model, q + 0.5 * dt * k2);
  const Vector k4 = td_field(model, q + dt * k3);
  return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

PathTrace integrate_td_ode(const EvaluationModel& model, const QTable& q0, double t_end,
                           double dt) {
  check_q(model, q0);
  if (!(dt > 0.0)) throw InvariantError("dt must be positive");
  if (!(t_end >= 0.0)) throw InvariantError("t_end must be non-negative");
  const double raw_steps = std::ceil(t_end / dt - 1e-9);
  if (raw_steps > static_cast<double>(kMaxOdeSteps)) {
    throw InvariantError("t_end / dt needs more than " + std::to_string(kMaxOdeSteps) +
                         " steps");
  }
  const auto steps = static_cast<std::size_t>(std::max(0.0, raw_steps));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
  const Vector q_star = solve_q_star(model).values();

  PathTrace trace;
  trace.errors.reserve(steps + 1);
  Vector q = q0.values();
  trace.push(0.0, q - q_star);
  for (std::size_t k = 1; k <= steps; ++k) {
    q = rk4_step(model, q, h);
    trace.push(k == steps ? t_end : static_cast<double>(k) * h, q - q_star);
  }
  return trace;
}

QTable discrete_td_sweep(const EvaluationModel& model, const QTable& q, double lr) {
  if (!(lr > 0.0 && lr <= 1.0)) {
    throw InvariantError("learning rate must lie in (0, 1], got " + std::to_string(lr));
  }
  const QTable target = bellman_backup(model, q);
  const Vector error = q.values() - target.values();
  return QTable(q.n_states(), q.n_actions(), q.values() - lr * error);
}

PathTrace record_inherent_path(const EvaluationModel& model, const QTable& q0,
                               const StepperConfig& config, std::size_t steps) {
  return record_inherent_path(model, q0, solve_q_star(model), config, steps);
}

PathTrace record_inherent_path(const EvaluationModel& model, const QTable& q0,
                               const QTable& q_star, const StepperConfig& config,
                               std::size_t steps) {
  check_q(model, q0);
  config.erc.validate();
  if (config.kind == Stepper::kOde && !(config.dt > 0.0)) {
    throw InvariantError("ODE stepper needs dt > 0");
  }
  PathTrace trace;
  trace.errors.reserve(steps + 1);
  QTable q = q0;
  trace.push(0.0, q.values() - q_star.values());
  for (std::size_t k = 0; k < steps; ++k) {
    switch (config.kind) {
      case Stepper::kOde:
        q = QTable(q.n_states(), q.n_actions(), rk4_step(model, q.values(), config.dt));
        break;
      case Stepper::kTd:
        q = discrete_td_sweep(model, q, config.erc.lr.at(k));
        break;
      case Stepper::kErc:
        q = erc_update_sweep(model, q, config.erc, k);
        break;
      case Stepper::kErcStar:
        q = erc_star_update_sweep(model, q, q_star, config.erc, k);
        break;
    }
    const double time = config.kind == Stepper::kOde
                            ? static_cast<double>(k + 1) * config.dt
                            : static_cast<double>(k + 1);
    trace.push(time, q.values() - q_star.values());
  }
  return trace;
}

QTable perturbed_initial_q(Index n_states, Index n_actions, double scale,
                           std::uint64_t seed) {
  if (!(scale >= 0.0)) throw InvariantError("perturbation scale must be non-negative");
  Vector values = Vector::Zero(n_states * n_actions);
  if (scale > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, scale);
    for (Index i = 0; i < values.size(); ++i) values(i) = noise(rng);
  }
  return QTable(n_states, n_actions, std::move(values));
}

std::optional<std::size_t> first_drop_below(const std::vector<double>& series,
                                            double fraction) {
  if (series.empty()) return std::nullopt;
  const double threshold = fraction * series.front();
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] <= threshold) return k;
  }
  return std::nullopt;
}

}  // namespace eigenpath
