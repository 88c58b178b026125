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

#include "eigenpath/erc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "eigenpath/errors.hpp"

namespace eigenpath {
namespace {

void check_same_shape(const QTable& a, const QTable& b) {
  if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions()) {
    throw DimensionError("Q tables differ in shape: " + std::to_string(a.n_states()) + "x" +
                         std::to_string(a.n_actions()) + " vs " +
                         std::to_string(b.n_states()) + "x" + std::to_string(b.n_actions()));
  }
}

double population_variance(const Vector& v) {
  return (v.array() - v.mean()).square().mean();
}

double checked_lr(const ErcConfig& cfg, std::size_t step) {
  const double lr = cfg.lr.at(step);
  if (!(lr > 0.0 && lr <= 1.0)) {
    throw InvariantError("learning rate must lie in (0, 1], got " + std::to_string(lr) +
                         " at step " + std::to_string(step));
  }
  return lr;
}

}  // namespace

LearningRate::LearningRate(double constant) : constant_(constant) {}

LearningRate::LearningRate(std::function<double(std::size_t)> schedule)
    : schedule_(std::move(schedule)) {}

double LearningRate::at(std::size_t step) const {
  return schedule_ ? schedule_(step) : constant_;
}

void ErcConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvariantError("beta must be a finite non-negative number");
  }
  if (lr.is_constant()) {
    const double a = lr.at(0);
    if (!(a > 0.0 && a <= 1.0)) {
      throw InvariantError("learning rate must lie in (0, 1], got " + std::to_string(a));
    }
  }
  if (truncation_enabled && !(r_min <= r_max)) {
    throw InvariantError("truncation bounds need r_min <= r_max");
  }
}

BellmanError::BellmanError(const QTable& q, const QTable& target) {
  check_same_shape(q, target);
  values_ = q.values() - target.values();
}

double BellmanError::push_penalty() const { return population_variance(values_); }

double r_push(const QTable& q, const QTable& target) {
  return BellmanError(q, target).push_penalty();
}

double policy_evaluation_loss(const QTable& q, const QTable& target) {
  return BellmanError(q, target).values().squaredNorm() / static_cast<double>(q.size());
}

double erc_loss(const QTable& q, const QTable& target, const ErcConfig& cfg) {
  const BellmanError err(q, target);
  const double pe = err.values().squaredNorm() / static_cast<double>(q.size());
  if (cfg.beta == 0.0) return pe;
  double reg = cfg.beta * err.push_penalty();
  if (cfg.truncation_enabled) reg = std::clamp(reg, cfg.r_min, cfg.r_max);
  return pe + reg;
}

double effective_beta(double r_push_value, const ErcConfig& cfg) {
  if (!cfg.truncation_enabled || cfg.beta == 0.0 || r_push_value <= 0.0) return cfg.beta;
  const double reg = cfg.beta * r_push_value;
  return std::clamp(reg, cfg.r_min, cfg.r_max) / r_push_value;
}

QTable erc_update_sweep(const EvaluationModel& model, const QTable& q,
                        const ErcConfig& cfg, std::size_t step) {
  const double lr = checked_lr(cfg, step);
  const QTable target = bellman_backup(model, q);
  // Both the target and the centring constant come from the pre-update q.
  const Vector error = q.values() - target.values();
  const double centring = -error.mean();
  const double beta = cfg.truncation_enabled ? effective_beta(population_variance(error), cfg)
                                             : cfg.beta;
  if (beta == 0.0) return QTable(q.n_states(), q.n_actions(), q.values() - lr * error);
  Vector grad = (1.0 + beta) * error;
  grad.array() += beta * centring;
  return QTable(q.n_states(), q.n_actions(), q.values() - lr * grad);
}

QTable erc_update_sweep(const TabularMdp& mdp, const Policy& policy, const QTable& q,
                        const ErcConfig& cfg, std::size_t step) {
  return erc_update_sweep(EvaluationModel(mdp, policy), q, cfg, step);
}

QTable erc_star_update_sweep(const EvaluationModel& model, const QTable& q,
                             const QTable& q_star, const ErcConfig& cfg,
                             std::size_t step) {
  check_same_shape(q, q_star);
  const double lr = checked_lr(cfg, step);
  const QTable target = bellman_backup(model, q);
  const Vector approx_error = q.values() - q_star.values();
  Vector push = approx_error;
  push.array() -= approx_error.mean();
  double beta = cfg.beta;
  if (cfg.truncation_enabled) {
    beta = effective_beta(population_variance(approx_error), cfg);
  }
  const Vector td_error = q.values() - target.values();
  if (beta == 0.0) return QTable(q.n_states(), q.n_actions(), q.values() - lr * td_error);
  const Vector grad = td_error + beta * push;
  return QTable(q.n_states(), q.n_actions(), q.values() - lr * grad);
}

VarianceDecomposition variance_decomposition(const QTable& q, const QTable& target) {
  check_same_shape(q, target);
  const Vector dq = q.values().array() - q.values().mean();
  const Vector dt = target.values().array() - target.values().mean();
  const double n = static_cast<double>(q.size());
  VarianceDecomposition out;
  out.var_q = dq.squaredNorm() / n;
  out.var_target = dt.squaredNorm() / n;
  out.covariance = dq.dot(dt) / n;
  out.r_push_value = r_push(q, target);
  out.identity_residual =
      std::abs(out.r_push_value - (out.var_q + out.var_target - 2.0 * out.covariance));
  if (out.identity_residual > 1e-10 * std::max(1.0, out.var_q + out.var_target)) {
    std::ostringstream os;
    os << "variance identity violated by " << out.identity_residual;
    throw NumericalError(os.str());
  }
  return out;
}

Vector regularized_reward(const EvaluationModel& model, const QTable& q, double beta) {
  const QTable target = bellman_backup(model, q);
  const double shift = beta / (1.0 + beta) * (q.values() - target.values()).mean();
  return model.reward().array() + shift;
}

double regularized_fixed_point_check(const EvaluationModel& model, const QTable& q,
                                     const ErcConfig& cfg) {
  const Vector r_erc = regularized_reward(model, q, cfg.beta);
  const Vector rhs = r_erc + model.gamma() * (model.transition().matrix() * q.values());
  return (q.values() - rhs).lpNorm<Eigen::Infinity>();
}

ErcConvergence iterate_erc(const EvaluationModel& model, const QTable& q0,
                           const ErcConfig& cfg, double tol, std::size_t max_sweeps) {
  cfg.validate();
  QTable q = q0;
  for (std::size_t k = 0; k < max_sweeps; ++k) {
    QTable next = erc_update_sweep(model, q, cfg, k);
    const double change = (next.values() - q.values()).lpNorm<Eigen::Infinity>();
    q = std::move(next);
    if (change < tol) return {std::move(q), k + 1, change};
  }
  throw ConvergenceError("ERC iteration did not settle within " +
                         std::to_string(max_sweeps) + " sweeps");
}

std::optional<double> index_of_dispersion(const Eigen::Ref<const Vector>& values) {
  if (values.size() == 0) return std::nullopt;
  const double mean = values.mean();
  if (std::abs(mean) < 1e-9) return std::nullopt;
  return (values.array() - mean).square().mean() / mean;
}

}  // namespace eigenpath
