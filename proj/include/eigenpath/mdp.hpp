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

// Finite MDPs, fixed policies and exact policy evaluation.
//
// Every quantity indexed by a state-action pair uses the flat index
// s * n_actions + a. This convention is global: Q tables, reward vectors,
// rows and columns of the induced transition matrix all follow it.

#ifndef EIGENPATH_MDP_HPP_
#define EIGENPATH_MDP_HPP_

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

namespace eigenpath {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr Index flat_index(Index state, Index action, Index n_actions) {
  return state * n_actions + action;
}

// A finite discounted MDP with state-action rewards.
//
// The transition kernel is stored as an (n_states * n_actions) x n_states
// matrix whose row flat(s, a) is the distribution P(. | s, a).
class TabularMdp {
 public:
  // Throws InvariantError / DimensionError when the arguments do not describe
  // a valid MDP (row sums within 1e-12, non-negative entries, 0 <= gamma < 1).
  TabularMdp(Index n_states, Index n_actions, Matrix transition, Vector reward,
             double gamma, Vector rho0);

  Index n_states() const { return n_states_; }
  Index n_actions() const { return n_actions_; }
  Index size() const { return n_states_ * n_actions_; }
  double gamma() const { return gamma_; }

  double transition(Index state, Index action, Index next) const {
    return transition_(flat_index(state, action, n_actions_), next);
  }
  double reward(Index state, Index action) const {
    return reward_(flat_index(state, action, n_actions_));
  }

  const Matrix& transition_matrix() const { return transition_; }
  const Vector& reward_vector() const { return reward_; }
  const Vector& rho0() const { return rho0_; }

  // Same dynamics and rewards under a different discount.
  TabularMdp with_gamma(double gamma) const;

  // True when every action self-loops with probability 1 and pays nothing.
  bool is_terminal(Index state) const;

 private:
  Index n_states_;
  Index n_actions_;
  Matrix transition_;
  Vector reward_;
  double gamma_;
  Vector rho0_;
};

// A stationary stochastic policy pi(a | s), stored as an n_states x n_actions
// table with rows summing to one.
class Policy {
 public:
  explicit Policy(Matrix probs);

  static Policy uniform(Index n_states, Index n_actions);

  Index n_states() const { return probs_.rows(); }
  Index n_actions() const { return probs_.cols(); }
  double probability(Index state, Index action) const {
    return probs_(state, action);
  }
  const Matrix& probs() const { return probs_; }

 private:
  Matrix probs_;
};

// Q values over the flat state-action index. Entries are always finite.
class QTable {
 public:
  QTable(Index n_states, Index n_actions, Vector values);

  static QTable zeros(Index n_states, Index n_actions);

  Index n_states() const { return n_states_; }
  Index n_actions() const { return n_actions_; }
  Index size() const { return values_.size(); }

  double operator()(Index state, Index action) const {
    return values_(flat_index(state, action, n_actions_));
  }
  const Vector& values() const { return values_; }

 private:
  Index n_states_;
  Index n_actions_;
  Vector values_;
};

// P^pi on state-action pairs: entry (flat(s,a), flat(s',a')) is
// P(s'|s,a) * pi(a'|s'). Row-stochastic by construction.
class InducedTransition {
 public:
  // Wraps an arbitrary matrix after checking it is square and row-stochastic
  // (rows within 1e-10 of one, entries non-negative).
  static InducedTransition from_matrix(Matrix matrix);

  const Matrix& matrix() const { return matrix_; }
  Index size() const { return matrix_.rows(); }

 private:
  explicit InducedTransition(Matrix matrix) : matrix_(std::move(matrix)) {}
  Matrix matrix_;
};

InducedTransition build_induced_transition(const TabularMdp& mdp,
                                           const Policy& policy);

// The pieces of a fixed-policy evaluation problem over the flat index:
// reward r, induced transition P^pi and discount gamma. Built once and shared
// by the hot loops, which only need r + gamma P^pi q.
class EvaluationModel {
 public:
  EvaluationModel(const TabularMdp& mdp, const Policy& policy);
  // For matrices that do not come from an (mdp, policy) pair, e.g. a chain
  // constructed directly for spectral checks. n_actions is used for indexing.
  EvaluationModel(InducedTransition transition, Vector reward, double gamma,
                  Index n_states, Index n_actions);

  Index n_states() const { return n_states_; }
  Index n_actions() const { return n_actions_; }
  Index size() const { return reward_.size(); }
  double gamma() const { return gamma_; }
  const InducedTransition& transition() const { return transition_; }
  const Vector& reward() const { return reward_; }

 private:
  InducedTransition transition_;
  Vector reward_;
  double gamma_;
  Index n_states_;
  Index n_actions_;
};

// r + gamma * P^pi * q as a dense matrix-vector product.
QTable bellman_backup(const EvaluationModel& model, const QTable& q);

// r(s,a) + gamma * sum_{s'} P(s'|s,a) sum_{a'} pi(a'|s') q(s',a') by direct
// summation over the MDP tables. Never forms P^pi.
QTable bellman_backup(const TabularMdp& mdp, const Policy& policy,
                      const QTable& q);

// Q* = (I - gamma P^pi)^{-1} r by a partial-pivot LU solve.
QTable solve_q_star(const EvaluationModel& model);
QTable solve_q_star(const TabularMdp& mdp, const Policy& policy);

struct ValueIterationResult {
  QTable q;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kValueIterationCap = 10'000'000;

// Repeats the direct-summation backup from Q = 0 until the sup-norm change
// drops below tol. Throws ConvergenceError after kValueIterationCap sweeps.
ValueIterationResult value_iteration_oracle(const TabularMdp& mdp,
                                            const Policy& policy, double tol);

// Throws DimensionError unless the policy matches the MDP's shape.
void check_compatible(const TabularMdp& mdp, const Policy& policy);

}  // namespace eigenpath

#endif  // EIGENPATH_MDP_HPP_
