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

// Named numerical checks tying the implementation back to its theory. Each
// returns measured residuals so a failing check says by how much it failed.

#ifndef EIGENPATH_VERIFICATION_HPP_
#define EIGENPATH_VERIFICATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "eigenpath/erc.hpp"
#include "eigenpath/mdp.hpp"

namespace eigenpath {

enum class CheckStatus { kPass, kFail, kSkipped };

std::string_view status_name(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kFail;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// 4-state birth-death chain with eigenvalues 1, 0.656, 0.3, 0.244.
InducedTransition constructed_chain();

// Dominant eigenvalue is 1 and its eigenvector is parallel to e.
CheckResult check_dominant_eigenpair(const InducedTransition& p_pi, double tol = 1e-8);

// Mean projection against a dense scan of c e, plus orthogonality of the
// residual, on random vectors.
CheckResult check_subspace_projection(std::size_t samples, std::uint64_t seed,
                                      double tol = 1e-10);

// Exact linear solve against plain value iteration.
CheckResult check_exact_solve(const TabularMdp& mdp, const Policy& policy, double tol = 1e-8);

// Matrix-exponential error against fixed-step RK4 at each time.
CheckResult check_closed_form_vs_rk4(const EvaluationModel& model, const QTable& q0,
                                     const std::vector<double>& times, double dt = 1e-3,
                                     double tol = 1e-6);

// Least-squares slope of log|alpha_1(t)| against t, where alpha(t) are the
// eigenbasis coordinates of the matrix-exponential error. Expected gamma - 1.
// Skipped when the transition violates the spectral assumption.
CheckResult check_dominant_rate(const InducedTransition& p_pi, double gamma,
                                double rel_tol = 0.01);

// Central finite differences on the regularised loss with the target and
// the centring mean frozen, over `instances` random MDPs.
CheckResult check_erc_gradient(const std::vector<double>& betas, std::size_t instances,
                               std::uint64_t seed, double h = 1e-6, double rel_tol = 1e-5);

// Iterates ERC to a sup-norm step change below 1e-10 and checks the shifted
// Bellman residual.
CheckResult check_erc_convergence(const EvaluationModel& model, const ErcConfig& cfg,
                                  double residual_tol = 1e-7);

// var(Q) + var(BQ) - 2 cov(Q, BQ) against the push penalty on random pairs.
CheckResult check_variance_identity(std::size_t pairs, std::uint64_t seed, double tol = 1e-10);

// beta = 0 ERC and ERC* traces equal the TD trace bit for bit.
CheckResult check_beta_zero_reduction(const EvaluationModel& model, const QTable& q0,
                                      double lr, std::size_t steps);

}  // namespace eigenpath

#endif  // EIGENPATH_VERIFICATION_HPP_
