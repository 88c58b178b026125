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

#include "eigenpath/mdp.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "eigenpath/errors.hpp"

namespace eigenpath {
namespace {

constexpr double kDistributionTol = 1e-12;
constexpr double kStochasticRowTol = 1e-10;

std::string shape(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

void check_distribution(const Eigen::Ref<const Vector>& p, double tol,
                        const std::string& what) {
  if (!p.allFinite()) throw InvariantError(what + " has non-finite entries");
  if ((p.array() < 0.0).any()) throw InvariantError(what + " has negative entries");
  const double total = p.sum();
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << total << ", expected 1";
    throw InvariantError(os.str());
  }
}

}  // namespace

TabularMdp::TabularMdp(Index n_states, Index n_actions, Matrix transition,
                       Vector reward, double gamma, Vector rho0)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      rho0_(std::move(rho0)) {
  if (n_states_ < 1 || n_actions_ < 1) {
    throw InvariantError("an MDP needs at least one state and one action");
  }
  const Index pairs = n_states_ * n_actions_;
  if (transition_.rows() != pairs || transition_.cols() != n_states_) {
    throw DimensionError("transition is " +
                         shape(transition_.rows(), transition_.cols()) +
                         ", expected " + shape(pairs, n_states_));
  }
  if (reward_.size() != pairs) {
    throw DimensionError("reward has " + std::to_string(reward_.size()) +
                         " entries, expected " + std::to_string(pairs));
  }
  if (rho0_.size() != n_states_) {
    throw DimensionError("rho0 has " + std::to_string(rho0_.size()) +
                         " entries, expected " + std::to_string(n_states_));
  }
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
    throw InvariantError("gamma must lie in [0, 1), got " + std::to_string(gamma_));
  }
  if (!reward_.allFinite()) throw InvariantError("reward has non-finite entries");
  for (Index s = 0; s < n_states_; ++s) {
    for (Index a = 0; a < n_actions_; ++a) {
      check_distribution(transition_.row(flat_index(s, a, n_actions_)).transpose(),
                         kDistributionTol,
                         "P(.|" + std::to_string(s) + "," + std::to_string(a) + ")");
    }
  }
  check_distribution(rho0_, kDistributionTol, "rho0");
}

TabularMdp TabularMdp::with_gamma(double gamma) const {
  return TabularMdp(n_states_, n_actions_, transition_, reward_, gamma, rho0_);
}

bool TabularMdp::is_terminal(Index state) const {
  for (Index a = 0; a < n_actions_; ++a) {
    const Index row = flat_index(state, a, n_actions_);
    if (transition_(row, state) != 1.0 || reward_(row) != 0.0) return false;
  }
  return true;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw InvariantError("a policy needs at least one state and one action");
  }
  for (Index s = 0; s < probs_.rows(); ++s) {
    check_distribution(probs_.row(s).transpose(), kDistributionTol,
                       "pi(.|" + std::to_string(s) + ")");
  }
}

Policy Policy::uniform(Index n_states, Index n_actions) {
  return Policy(Matrix::Constant(n_states, n_actions,
                                 1.0 / static_cast<double>(n_actions)));
}

QTable::QTable(Index n_states, Index n_actions, Vector values)
    : n_states_(n_states), n_actions_(n_actions), values_(std::move(values)) {
  if (values_.size() != n_states_ * n_actions_) {
    throw DimensionError("Q table has " + std::to_string(values_.size()) +
                         " entries, expected " +
                         std::to_string(n_states_ * n_actions_));
  }
  if (!values_.allFinite()) throw InvariantError("Q table has non-finite entries");
}

QTable QTable::zeros(Index n_states, Index n_actions) {
  return QTable(n_states, n_actions, Vector::Zero(n_states * n_actions));
}

InducedTransition InducedTransition::from_matrix(Matrix matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw DimensionError("induced transition must be square and non-empty, got " +
                         shape(matrix.rows(), matrix.cols()));
  }
  for (Index i = 0; i < matrix.rows(); ++i) {
    check_distribution(matrix.row(i).transpose(), kStochasticRowTol,
                       "row " + std::to_string(i) + " of P^pi");
  }
  return InducedTransition(std::move(matrix));
}

void check_compatible(const TabularMdp& mdp, const Policy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw DimensionError("policy is " + shape(policy.n_states(), policy.n_actions()) +
                         " but the MDP has " + shape(mdp.n_states(), mdp.n_actions()) +
                         " states x actions");
  }
}

InducedTransition build_induced_transition(const TabularMdp& mdp,
                                           const Policy& policy) {
  check_compatible(mdp, policy);
  const Index n_states = mdp.n_states();
  const Index n_actions = mdp.n_actions();
  Matrix m(mdp.size(), mdp.size());
  for (Index row = 0; row < mdp.size(); ++row) {
    for (Index next = 0; next < n_states; ++next) {
      const double p = mdp.transition_matrix()(row, next);
      for (Index a = 0; a < n_actions; ++a) {
        m(row, flat_index(next, a, n_actions)) = p * policy.probability(next, a);
      }
    }
  }
  return InducedTransition::from_matrix(std::move(m));
}

EvaluationModel::EvaluationModel(const TabularMdp& mdp, const Policy& policy)
    : transition_(build_induced_transition(mdp, policy)),
      reward_(mdp.reward_vector()),
      gamma_(mdp.gamma()),
      n_states_(mdp.n_states()),
      n_actions_(mdp.n_actions()) {}

EvaluationModel::EvaluationModel(InducedTransition transition, Vector reward,
                                 double gamma, Index n_states, Index n_actions)
    : transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      n_states_(n_states),
      n_actions_(n_actions) {
  if (transition_.size() != reward_.size() || reward_.size() != n_states_ * n_actions_) {
    throw DimensionError("P^pi is " + shape(transition_.size(), transition_.size()) +
                         ", reward has " + std::to_string(reward_.size()) +
                         " entries, layout is " + shape(n_states_, n_actions_));
  }
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
    throw InvariantError("gamma must lie in [0, 1), got " + std::to_string(gamma_));
  }
  if (!reward_.allFinite()) throw InvariantError("reward has non-finite entries");
}

namespace {

void check_q_shape(Index n_states, Index n_actions, const QTable& q) {
  if (q.n_states() != n_states || q.n_actions() != n_actions) {
    throw DimensionError("Q table is " + shape(q.n_states(), q.n_actions()) +
                         ", expected " + shape(n_states, n_actions));
  }
}

}  // namespace

QTable bellman_backup(const EvaluationModel& model, const QTable& q) {
  check_q_shape(model.n_states(), model.n_actions(), q);
  Vector out = model.reward() + model.gamma() * (model.transition().matrix() * q.values());
  return QTable(model.n_states(), model.n_actions(), std::move(out));
}

QTable bellman_backup(const TabularMdp& mdp, const Policy& policy, const QTable& q) {
  check_compatible(mdp, policy);
  check_q_shape(mdp.n_states(), mdp.n_actions(), q);
  const Index n_states = mdp.n_states();
  const Index n_actions = mdp.n_actions();
  // Expected next value of each state under pi.
  Vector state_value(n_states);
  for (Index s = 0; s < n_states; ++s) {
    double v = 0.0;
    for (Index a = 0; a < n_actions; ++a) v += policy.probability(s, a) * q(s, a);
    state_value(s) = v;
  }
  Vector out(mdp.size());
  for (Index row = 0; row < mdp.size(); ++row) {
    double expected = 0.0;
    for (Index next = 0; next < n_states; ++next) {
      expected += mdp.transition_matrix()(row, next) * state_value(next);
    }
    out(row) = mdp.reward_vector()(row) + mdp.gamma() * expected;
  }
  return QTable(n_states, n_actions, std::move(out));
}

QTable solve_q_star(const EvaluationModel& model) {
  const Index n = model.size();
  const Matrix system =
      Matrix::Identity(n, n) - model.gamma() * model.transition().matrix();
  const Eigen::PartialPivLU<Matrix> lu(system);
  Vector q = lu.solve(model.reward());
  const double residual = (system * q - model.reward()).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, model.reward().lpNorm<Eigen::Infinity>());
  if (!q.allFinite() || residual > 1e-9 * scale) {
    std::ostringstream os;
    os << "linear solve for Q* failed: residual " << residual
       << ", reciprocal condition estimate " << lu.rcond();
    throw NumericalError(os.str());
  }
  return QTable(model.n_states(), model.n_actions(), std::move(q));
}

QTable solve_q_star(const TabularMdp& mdp, const Policy& policy) {
  return solve_q_star(EvaluationModel(mdp, policy));
}

ValueIterationResult value_iteration_oracle(const TabularMdp& mdp,
                                            const Policy& policy, double tol) {
  if (!(tol > 0.0)) throw InvariantError("value iteration tolerance must be positive");
  QTable q = QTable::zeros(mdp.n_states(), mdp.n_actions());
  for (std::size_t it = 1; it <= kValueIterationCap; ++it) {
    QTable next = bellman_backup(mdp, policy, q);
    const double change = (next.values() - q.values()).lpNorm<Eigen::Infinity>();
    q = std::move(next);
    if (change < tol) return {std::move(q), it};
  }
  throw ConvergenceError("value iteration did not reach tolerance within " +
                         std::to_string(kValueIterationCap) + " sweeps");
}

}  // namespace eigenpath
