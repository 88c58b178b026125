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

#include "eigenpath/verification.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>

#include "eigenpath/dynamics.hpp"
#include "eigenpath/envs.hpp"
#include "eigenpath/spectral.hpp"

namespace eigenpath {
namespace {

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

CheckResult verdict(std::string name, double measured, double threshold, std::string detail) {
  CheckResult out;
  out.name = std::move(name);
  out.measured = measured;
  out.threshold = threshold;
  out.status = measured <= threshold ? CheckStatus::kPass : CheckStatus::kFail;
  out.detail = std::move(detail);
  return out;
}

}  // namespace

std::string_view status_name(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "PASS";
    case CheckStatus::kFail: return "FAIL";
    case CheckStatus::kSkipped: return "SKIPPED";
  }
  return "FAIL";
}

InducedTransition constructed_chain() {
  Matrix p(4, 4);
  p << 0.6, 0.3, 0.1, 0.0,
       0.2, 0.5, 0.2, 0.1,
       0.1, 0.2, 0.5, 0.2,
       0.0, 0.1, 0.3, 0.6;
  return InducedTransition::from_matrix(std::move(p));
}

CheckResult check_dominant_eigenpair(const InducedTransition& p_pi, double tol) {
  const EigenDecomposition decomp = eigendecompose(p_pi, tol);
  const double lambda_gap = std::abs(decomp.eigenvalues(0) - 1.0);
  const Index n = p_pi.size();
  const Vector ones = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  const double cosine = std::abs(decomp.eigenvectors.col(0).dot(ones.cast<std::complex<double>>())) /
                        decomp.eigenvectors.col(0).norm();
  const double measured = std::max(lambda_gap, 1.0 - cosine);
  return verdict("dominant_eigenpair", measured, tol,
                 describe("|lambda_1 - 1| = %.3g, 1 - |cos(H_1, e)| = %.3g", lambda_gap,
                          1.0 - cosine));
}

CheckResult check_subspace_projection(std::size_t samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> sizes(1, 64);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_orthogonality = 0.0;
  std::size_t scan_violations = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    Vector b(sizes(rng));
    for (Index i = 0; i < b.size(); ++i) b(i) = 3.0 * normal(rng) + 1.0;
    const Vector proj = project_to_one_eigensubspace(b);
    const double dist = distance_to_one_eigensubspace(b);
    const Vector residual = b - proj;
    worst_orthogonality = std::max(
        worst_orthogonality, std::abs(residual.sum()) / std::max(1.0, b.cwiseAbs().sum()));
    const double c0 = proj(0);
    for (int j = -50; j <= 50; ++j) {
      const double c = c0 + 0.01 * j;
      const double other = (b.array() - c).matrix().norm();
      if (other < dist * (1.0 - 1e-12)) ++scan_violations;
    }
  }
  CheckResult out = verdict("subspace_projection", worst_orthogonality, tol,
                            describe("residual-sum gap; %.0f scan points beat the mean over "
                                     "%.0f vectors",
                                     static_cast<double>(scan_violations),
                                     static_cast<double>(samples)));
  if (scan_violations > 0) out.status = CheckStatus::kFail;
  return out;
}

CheckResult check_exact_solve(const TabularMdp& mdp, const Policy& policy, double tol) {
  const QTable exact = solve_q_star(mdp, policy);
  const ValueIterationResult vi = value_iteration_oracle(mdp, policy, 1e-13);
  const double diff = (exact.values() - vi.q.values()).cwiseAbs().maxCoeff();
  return verdict("exact_solve_vs_value_iteration", diff, tol,
                 describe("sup |LU - VI| = %.3g after %.0f sweeps", diff,
                          static_cast<double>(vi.iterations)));
}

CheckResult check_closed_form_vs_rk4(const EvaluationModel& model, const QTable& q0,
                                     const std::vector<double>& times, double dt,
                                     double tol) {
  const QTable q_star = solve_q_star(model);
  const ErrorPropagator propagator(model.transition(), model.gamma());
  const Vector err0 = q0.values() - q_star.values();
  double worst = 0.0;
  for (double t : times) {
    const PathTrace rk4 = integrate_td_ode(model, q0, t, dt);
    const Vector closed = propagator.propagate(err0, t);
    worst = std::max(worst, (closed - rk4.errors.back()).cwiseAbs().maxCoeff());
  }
  return verdict("closed_form_vs_rk4", worst, tol,
                 describe("sup-norm gap over %.0f times, dt = %.3g",
                          static_cast<double>(times.size()), dt));
}

CheckResult check_dominant_rate(const InducedTransition& p_pi, double gamma, double rel_tol) {
  const EigenDecomposition decomp = eigendecompose(p_pi);
  const AssumptionReport report = check_assumption_one(decomp);
  if (!report.holds) {
    CheckResult out;
    out.name = "dominant_coefficient_rate";
    out.status = CheckStatus::kSkipped;
    out.threshold = rel_tol;
    out.measured = std::numeric_limits<double>::quiet_NaN();
    out.detail = "spectral assumption violated: " + report.summary();
    return out;
  }
  const Index n = p_pi.size();
  Vector reward(n);
  for (Index i = 0; i < n; ++i) reward(i) = 1.0 + 0.5 * static_cast<double>(i % 3);
  const EvaluationModel model(p_pi, reward, gamma, n, 1);
  const QTable q_star = solve_q_star(model);
  const Vector err0 = -q_star.values();
  const ErrorPropagator propagator(p_pi, gamma);

  std::vector<double> ts, ys;
  for (int k = 0; k <= 40; ++k) {
    const double t = 0.5 * k;
    const ErrorDecomposition coeffs = decompose_error(decomp, propagator.propagate(err0, t));
    ts.push_back(t);
    ys.push_back(std::log(std::abs(coeffs.coefficients(0))));
  }
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) t_mean += ts[i], y_mean += ys[i];
  t_mean /= static_cast<double>(ts.size());
  y_mean /= static_cast<double>(ts.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - t_mean) * (ys[i] - y_mean);
    sxx += (ts[i] - t_mean) * (ts[i] - t_mean);
  }
  const double slope = sxy / sxx;
  const double expected = gamma - 1.0;
  const double rel = std::abs(slope - expected) / std::abs(expected);
  return verdict("dominant_coefficient_rate", rel, rel_tol,
                 describe("fitted slope %.10g, expected %.10g", slope, expected));
}

CheckResult check_erc_gradient(const std::vector<double>& betas, std::size_t instances,
                               std::uint64_t seed, double h, double rel_tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> states(2, 6), actions(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const TabularMdp mdp = random_mdp(states(rng), actions(rng), 0.9, rng());
    const Policy policy = Policy::uniform(mdp.n_states(), mdp.n_actions());
    const EvaluationModel model(mdp, policy);
    Vector values(model.size());
    for (Index i = 0; i < values.size(); ++i) values(i) = normal(rng);
    const QTable q(mdp.n_states(), mdp.n_actions(), values);
    const Vector target = bellman_backup(model, q).values();
    const double frozen_mean = (values - target).mean();
    const double n = static_cast<double>(values.size());
    for (double beta : betas) {
      auto loss = [&](const Vector& x) {
        const Vector b = x - target;
        return b.squaredNorm() / n + beta * (b.array() - frozen_mean).square().sum() / n;
      };
      ErcConfig cfg;
      cfg.beta = beta;
      cfg.lr = 0.01;
      Vector grad(values.size());
      for (Index i = 0; i < values.size(); ++i) {
        Vector up = values, down = values;
        up(i) += h;
        down(i) -= h;
        grad(i) = (loss(up) - loss(down)) / (2.0 * h);
      }
      const Vector expected = -0.01 * (n / 2.0) * grad;
      const Vector actual = erc_update_sweep(model, q, cfg, 0).values() - values;
      worst = std::max(worst, (actual - expected).norm() / expected.norm());
    }
  }
  return verdict("erc_gradient_finite_difference", worst, rel_tol,
                 describe("worst relative error over %.0f instances x %.0f betas",
                          static_cast<double>(instances), static_cast<double>(betas.size())));
}

CheckResult check_erc_convergence(const EvaluationModel& model, const ErcConfig& cfg,
                                  double residual_tol) {
  const ErcConvergence run = iterate_erc(model, QTable::zeros(model.n_states(), model.n_actions()),
                                         cfg, 1e-10);
  const double residual = regularized_fixed_point_check(model, run.q, cfg);
  CheckResult out = verdict("erc_convergence_fixed_point", residual, residual_tol,
                            describe("%.0f sweeps, last step change %.3g",
                                     static_cast<double>(run.sweeps), run.last_change));
  if (!(run.last_change < 1e-10)) out.status = CheckStatus::kFail;
  return out;
}

CheckResult check_variance_identity(std::size_t pairs, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> states(1, 8), actions(1, 4);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Index s = states(rng), a = actions(rng);
    const double sq = scale(rng), st = scale(rng);
    Vector qv(s * a), tv(s * a);
    for (Index i = 0; i < qv.size(); ++i) qv(i) = sq * normal(rng);
    for (Index i = 0; i < tv.size(); ++i) tv(i) = st * normal(rng);
    const VarianceDecomposition d =
        variance_decomposition(QTable(s, a, qv), QTable(s, a, tv));
    const double lhs = d.var_q + d.var_target - 2.0 * d.covariance;
    const double rhs = d.r_push_value;
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return verdict("variance_identity", worst, tol,
                 describe("worst relative gap over %.0f pairs", static_cast<double>(pairs)));
}

CheckResult check_beta_zero_reduction(const EvaluationModel& model, const QTable& q0, double lr,
                                      std::size_t steps) {
  StepperConfig td;
  td.kind = Stepper::kTd;
  td.erc.lr = lr;
  StepperConfig erc = td;
  erc.kind = Stepper::kErc;
  erc.erc.beta = 0.0;
  StepperConfig erc_star = erc;
  erc_star.kind = Stepper::kErcStar;
  const QTable q_star = solve_q_star(model);
  const Matrix base = record_inherent_path(model, q0, q_star, td, steps).error_matrix();
  std::size_t mismatches = 0;
  for (const StepperConfig* cfg : {&erc, &erc_star}) {
    const Matrix other = record_inherent_path(model, q0, q_star, *cfg, steps).error_matrix();
    for (Index i = 0; i < base.size(); ++i) {
      if (std::memcmp(base.data() + i, other.data() + i, sizeof(double)) != 0) ++mismatches;
    }
  }
  return verdict("beta_zero_reduction", static_cast<double>(mismatches), 0.0,
                 describe("%.0f differing entries over %.0f steps",
                          static_cast<double>(mismatches), static_cast<double>(steps)));
}

}  // namespace eigenpath
