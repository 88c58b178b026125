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

// Eigensubspace-regularised critic (ERC) for tabular policy evaluation.
//
// With Bellman error B = Q - BQ and Z = mean(B), the push regulariser is the
// population variance of B, (1/N) sum_i (B_i - Z)^2, and the ERC loss is
// mean(B^2) + beta * R_push. The tabular update is one gradient step on that
// loss with the target BQ and the centring term held constant:
//
//   Q' = Q - lr * [(1 + beta) (Q - BQ) + beta * C],   C = mean(BQ - Q),
//
// which is exactly Q - lr * (N/2) * grad L_ERC, and exactly the TD sweep
// Q - lr * (Q - BQ) at beta = 0.

#ifndef EIGENPATH_ERC_HPP_
#define EIGENPATH_ERC_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

#include "eigenpath/mdp.hpp"

namespace eigenpath {

// A constant step size or a schedule alpha_t indexed by sweep number.
class LearningRate {
 public:
  LearningRate(double constant);  // NOLINT(google-explicit-constructor)
  explicit LearningRate(std::function<double(std::size_t)> schedule);

  double at(std::size_t step) const;
  bool is_constant() const { return !schedule_; }

 private:
  double constant_ = 0.0;
  std::function<double(std::size_t)> schedule_;
};

struct ErcConfig {
  double beta = 0.3;
  LearningRate lr = 0.01;
  bool truncation_enabled = false;
  double r_max = std::numeric_limits<double>::infinity();
  double r_min = 0.0;

  // Throws InvariantError on beta < 0, a constant lr outside (0, 1], or
  // r_min > r_max with truncation enabled.
  void validate() const;
};

// B = q - target over the flat index.
class BellmanError {
 public:
  BellmanError(const QTable& q, const QTable& target);

  const Vector& values() const { return values_; }
  double mean() const { return values_.mean(); }
  // (1/N) sum_i (B_i - mean)^2
  double push_penalty() const;

 private:
  Vector values_;
};

double r_push(const QTable& q, const QTable& target);

// mean((q - target)^2)
double policy_evaluation_loss(const QTable& q, const QTable& target);

// policy_evaluation_loss + beta * r_push, with the regulariser clamped to
// [r_min, r_max] when truncation is enabled. beta = 0 gives the plain loss.
double erc_loss(const QTable& q, const QTable& target, const ErcConfig& cfg);

// Effective regularisation strength for one sweep. Without truncation this is
// beta. With truncation the beta-dependent correction is rescaled so that its
// implied regulariser beta_eff * R_push equals clamp(beta * R_push, r_min, r_max).
double effective_beta(double r_push_value, const ErcConfig& cfg);

QTable erc_update_sweep(const EvaluationModel& model, const QTable& q,
                        const ErcConfig& cfg, std::size_t step = 0);
QTable erc_update_sweep(const TabularMdp& mdp, const Policy& policy,
                        const QTable& q, const ErcConfig& cfg, std::size_t step = 0);

// Oracle variant pushing the approximation error q - q_star itself:
//   Q' = (1 - lr (1 + beta)) Q + lr BQ + lr beta (Q* + mean(Q - Q*) e),
// evaluated as Q - lr [(Q - BQ) + beta (d - mean(d))] with d = Q - Q*.
QTable erc_star_update_sweep(const EvaluationModel& model, const QTable& q,
                             const QTable& q_star, const ErcConfig& cfg,
                             std::size_t step = 0);

struct VarianceDecomposition {
  double var_q = 0.0;
  double var_target = 0.0;
  double covariance = 0.0;
  double r_push_value = 0.0;
  // |r_push - (var_q + var_target - 2 cov)|
  double identity_residual = 0.0;
};

// Population moments over the (s, a) entries. Throws NumericalError if the
// identity r_push = var_q + var_target - 2 cov is off by more than 1e-10
// (relative to max(1, var_q + var_target)).
VarianceDecomposition variance_decomposition(const QTable& q, const QTable& target);

// r_erc = r + beta / (1 + beta) * mean(q - Bq)
Vector regularized_reward(const EvaluationModel& model, const QTable& q, double beta);

// ||q - (r_erc + gamma P^pi q)||_inf; zero at a fixed point of the ERC sweep.
double regularized_fixed_point_check(const EvaluationModel& model, const QTable& q,
                                     const ErcConfig& cfg);

struct ErcConvergence {
  QTable q;
  std::size_t sweeps = 0;
  double last_change = 0.0;
};

// Iterates erc_update_sweep until the sup-norm step change drops below tol.
// Throws ConvergenceError after max_sweeps.
ErcConvergence iterate_erc(const EvaluationModel& model, const QTable& q0,
                           const ErcConfig& cfg, double tol = 1e-10,
                           std::size_t max_sweeps = 1'000'000);

// Variance over mean of the entries; nullopt when |mean| < 1e-9.
std::optional<double> index_of_dispersion(const Eigen::Ref<const Vector>& values);

}  // namespace eigenpath

#endif  // EIGENPATH_ERC_HPP_
