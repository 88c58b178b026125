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

// Acceptance suite: one PASS/FAIL line per criterion, each with its measured
// value, tolerance and wall time against its time budget. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "eigenpath/dynamics.hpp"
#include "eigenpath/envs.hpp"
#include "eigenpath/erc.hpp"
#include "eigenpath/experiment.hpp"
#include "eigenpath/monte_carlo.hpp"
#include "eigenpath/spectral.hpp"
#include "eigenpath/verification.hpp"

namespace {

using namespace eigenpath;

struct Outcome {
  bool pass = false;
  std::string measured;
};

struct Criterion {
  const char* id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Policy random_policy(Index s, Index a, std::mt19937_64& rng) {
  std::exponential_distribution<double> draw(1.0);
  std::bernoulli_distribution deterministic(0.2);
  std::uniform_int_distribution<Index> pick(0, a - 1);
  Matrix probs = Matrix::Zero(s, a);
  for (Index i = 0; i < s; ++i) {
    if (deterministic(rng)) {
      probs(i, pick(rng)) = 1.0;
      continue;
    }
    for (Index j = 0; j < a; ++j) probs(i, j) = draw(rng);
    probs.row(i) /= probs.row(i).sum();
  }
  return Policy(std::move(probs));
}

Outcome ac1_eigenpair() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> states(1, 8), actions(1, 4);
  double worst_lambda = 0.0, worst_cos = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Index s = states(rng), a = actions(rng);
    const TabularMdp mdp = random_mdp(s, a, 0.9, rng());
    const InducedTransition p = build_induced_transition(mdp, random_policy(s, a, rng));
    const EigenDecomposition d = eigendecompose(p);
    const ComplexVector h = d.eigenvectors.col(0);
    const double cosine =
        std::abs(h.sum()) / (h.norm() * std::sqrt(static_cast<double>(h.size())));
    worst_lambda = std::max(worst_lambda, std::abs(d.eigenvalues(0) - 1.0));
    worst_cos = std::max(worst_cos, 1.0 - cosine);
  }
  return {worst_lambda <= 1e-8 && worst_cos <= 1e-8,
          fmt("max |lambda_1-1| = %.2e, max 1-|cos| = %.2e (tol 1e-8)", worst_lambda, worst_cos)};
}

Outcome ac2_exact_solve() {
  double worst = 0.0;
  auto compare = [&](const TabularMdp& mdp, const Policy& pi) {
    const QTable exact = solve_q_star(mdp, pi);
    const QTable vi = value_iteration_oracle(mdp, pi, 1e-13).q;
    worst = std::max(worst, (exact.values() - vi.values()).cwiseAbs().maxCoeff());
  };
  compare(build_frozenlake(0.9), Policy::uniform(16, 4));
  compare(build_cliffwalking(0.9), Policy::uniform(48, 4));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> states(1, 10), actions(1, 4);
  for (int k = 0; k < 100; ++k) {
    const Index s = states(rng), a = actions(rng);
    compare(random_mdp(s, a, 0.95, rng()), random_policy(s, a, rng));
  }
  return {worst <= 1e-8, fmt("max sup |LU - VI| = %.2e (tol 1e-8)", worst)};
}

Outcome ac3_closed_form() {
  const TabularMdp mdp = build_frozenlake(0.9);
  const EvaluationModel model(mdp, Policy::uniform(16, 4));
  const QTable q_star = solve_q_star(model);
  const QTable q0 = perturbed_initial_q(16, 4, 1.0, 3);
  double worst = 0.0;
  for (double t : {0.1, 1.0, 5.0, 20.0}) {
    const Vector closed = closed_form_error(model.transition(), 0.9, q0, q_star, t);
    const Vector rk4 = integrate_td_ode(model, q0, t, 1e-3).errors.back();
    worst = std::max(worst, (closed - rk4).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, fmt("max sup gap over t in {0.1,1,5,20} = %.2e (tol 1e-6)", worst)};
}

Outcome ac4_rate() {
  const double gamma = 0.9;
  const InducedTransition p = constructed_chain();
  const EigenDecomposition d = eigendecompose(p);
  if (!check_assumption_one(d).holds) return {false, "constructed chain violates the assumption"};
  Vector reward(4);
  reward << 1.0, 0.5, 0.25, 2.0;
  const EvaluationModel model(p, reward, gamma, 4, 1);
  const QTable q_star = solve_q_star(model);
  const QTable q0 = QTable::zeros(4, 1);
  std::vector<double> t, y;
  for (int k = 0; k <= 60; ++k) {
    t.push_back(0.25 * k);
    const Vector err = closed_form_error(p, gamma, q0, q_star, t.back());
    y.push_back(std::log(std::abs(decompose_error(d, err).coefficients(0))));
  }
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  const double rel = std::abs(slope - (gamma - 1.0)) / (1.0 - gamma);
  return {rel <= 0.01, fmt("slope %.12f vs %.3f, relative gap %.2e (tol 1e-2)", slope,
                           gamma - 1.0, rel)};
}

Outcome ac5_inherent_path() {
  const EvaluationModel model(build_frozenlake(0.9), Policy::uniform(16, 4));
  const QTable q_star = solve_q_star(model);
  StepperConfig cfg;
  cfg.kind = Stepper::kTd;
  cfg.erc.lr = 0.01;
  int leads = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QTable q0 = perturbed_initial_q(16, 4, 0.01, seed);
    const PathTrace trace = record_inherent_path(model, q0, q_star, cfg, 3000);
    const auto d = first_drop_below(trace.subspace_distances, 0.1);
    const auto e = first_drop_below(trace.error_norms, 0.1);
    const bool lead = d && (!e || *d < *e);
    leads += lead ? 1 : 0;
    detail += (seed ? " " : "") + (d ? std::to_string(*d) : "-") + "<" +
              (e ? std::to_string(*e) : "-");
  }
  return {leads >= 9, std::to_string(leads) + "/10 runs lead (need 9); hits " + detail};
}

Outcome ac6_gradient() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<Index> states(2, 6), actions(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Index s = states(rng), a = actions(rng);
    const TabularMdp mdp = random_mdp(s, a, 0.9, rng());
    const EvaluationModel model(mdp, random_policy(s, a, rng));
    Vector qv(s * a);
    for (Index i = 0; i < qv.size(); ++i) qv(i) = normal(rng);
    const QTable q(s, a, qv);
    const Vector target = bellman_backup(model, q).values();
    const double m = (qv - target).mean();
    const double n = static_cast<double>(qv.size());
    for (double beta : {0.0, 0.1, 0.3, 1.0}) {
      auto loss = [&](const Vector& x) {
        const Vector b = x - target;
        return b.squaredNorm() / n + beta * (b.array() - m).square().sum() / n;
      };
      Vector grad(qv.size());
      for (Index i = 0; i < qv.size(); ++i) {
        Vector up = qv, down = qv;
        up(i) += 1e-6;
        down(i) -= 1e-6;
        grad(i) = (loss(up) - loss(down)) / 2e-6;
      }
      ErcConfig cfg;
      cfg.beta = beta;
      cfg.lr = 0.01;
      const Vector step = erc_update_sweep(model, q, cfg).values() - qv;
      const Vector expected = -0.01 * (n / 2.0) * grad;
      worst = std::max(worst, (step - expected).norm() / expected.norm());
    }
  }
  return {worst <= 1e-5, fmt("max relative error = %.2e (tol 1e-5)", worst)};
}

Outcome ac7_convergence() {
  ErcConfig cfg;
  cfg.beta = 0.3;
  cfg.lr = 0.01;
  std::string detail;
  bool ok = true;
  for (const char* name : {"frozenlake4x4", "cliffwalking"}) {
    const TabularMdp mdp = make_env(name, 0.9);
    const EvaluationModel model(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()));
    const ErcConvergence run = iterate_erc(model, QTable::zeros(mdp.n_states(), mdp.n_actions()),
                                           cfg, 1e-10);
    const double residual = regularized_fixed_point_check(model, run.q, cfg);
    ok = ok && run.last_change < 1e-10 && residual <= 1e-7;
    detail += std::string(detail.empty() ? "" : "; ") + name +
              fmt(": %.0f sweeps, change %.2e, residual %.2e", static_cast<double>(run.sweeps),
                  run.last_change, residual);
  }
  return {ok, detail + " (tol 1e-10 / 1e-7)"};
}

Outcome ac8_comparison() {
  const EvaluationModel model(build_frozenlake(0.9), Policy::uniform(16, 4));
  const QTable q_star = solve_q_star(model);
  constexpr std::size_t kSteps = 3000;
  StepperConfig td;
  td.kind = Stepper::kTd;
  td.erc.lr = 0.01;
  StepperConfig erc = td;
  erc.kind = Stepper::kErc;
  erc.erc.beta = 0.3;
  std::vector<double> td_dist(kSteps + 1, 0.0), erc_dist(kSteps + 1, 0.0);
  double td_mae = 0.0, erc_mae = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QTable q0 = perturbed_initial_q(16, 4, 1.0, seed);
    const PathTrace a = record_inherent_path(model, q0, q_star, td, kSteps);
    const PathTrace b = record_inherent_path(model, q0, q_star, erc, kSteps);
    for (std::size_t k = 0; k <= kSteps; ++k) {
      td_dist[k] += a.subspace_distances[k] / 10.0;
      erc_dist[k] += b.subspace_distances[k] / 10.0;
    }
    td_mae += a.errors.back().cwiseAbs().mean() / 10.0;
    erc_mae += b.errors.back().cwiseAbs().mean() / 10.0;
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = kSteps / 10; k <= kSteps; ++k) worst = std::max(worst, erc_dist[k] - td_dist[k]);
  return {worst <= 0.0 && erc_mae <= td_mae,
          fmt("max(erc-td) distance after burn-in = %.3e; final MAE erc %.5f vs td %.5f", worst,
              erc_mae, td_mae)};
}

Outcome ac9_identity() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Index> states(1, 10), actions(1, 5);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Index s = states(rng), a = actions(rng);
    Vector qv(s * a), tv(s * a);
    for (Index i = 0; i < qv.size(); ++i) qv(i) = 5.0 * normal(rng) + 2.0;
    for (Index i = 0; i < tv.size(); ++i) tv(i) = normal(rng) - 1.0;
    const VarianceDecomposition d = variance_decomposition(QTable(s, a, qv), QTable(s, a, tv));
    worst = std::max(worst,
                     std::abs(d.var_q + d.var_target - 2.0 * d.covariance - d.r_push_value));
  }
  return {worst <= 1e-10, fmt("max |var+var-2cov - R_push| = %.2e (tol 1e-10)", worst)};
}

Outcome ac10_monte_carlo() {
  const TabularMdp mdp = build_frozenlake(0.9);
  const Policy pi = Policy::uniform(16, 4);
  const McEstimate est = monte_carlo_q(mdp, pi, 100'000, minimal_horizon(0.9), 2024);
  const auto terminal = terminal_pairs(mdp);
  bool covered = true;
  for (Index i = 0; i < mdp.size(); ++i) {
    if (!terminal[static_cast<std::size_t>(i)] && !est.defined(i)) covered = false;
  }
  const double err = est.max_abs_error(solve_q_star(mdp, pi));
  return {covered && err <= 0.02,
          fmt("sup |MC - Q*| = %.4f (tol 0.02), all non-terminal pairs visited: ", err) +
              (covered ? "yes" : "no")};
}

bool same_bits(const PathTrace& a, const PathTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.errors[k].size() != b.errors[k].size() ||
        std::memcmp(a.errors[k].data(), b.errors[k].data(),
                    sizeof(double) * static_cast<std::size_t>(a.errors[k].size())) != 0) {
      return false;
    }
  }
  return true;
}

Outcome ac11_reduction() {
  int configs = 0, identical = 0;
  auto run = [&](const TabularMdp& mdp, double lr, double scale, bool truncation) {
    const EvaluationModel model(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()));
    const QTable q_star = solve_q_star(model);
    const QTable q0 = perturbed_initial_q(mdp.n_states(), mdp.n_actions(), scale, configs);
    StepperConfig td;
    td.kind = Stepper::kTd;
    td.erc.lr = lr;
    td.erc.beta = 0.0;
    td.erc.truncation_enabled = truncation;
    td.erc.r_min = truncation ? 0.01 : 0.0;
    td.erc.r_max = truncation ? 0.5 : std::numeric_limits<double>::infinity();
    StepperConfig erc = td, star = td;
    erc.kind = Stepper::kErc;
    star.kind = Stepper::kErcStar;
    const PathTrace base = record_inherent_path(model, q0, q_star, td, 400);
    ++configs;
    identical += same_bits(base, record_inherent_path(model, q0, q_star, erc, 400)) &&
                         same_bits(base, record_inherent_path(model, q0, q_star, star, 400))
                     ? 1
                     : 0;
  };
  run(build_frozenlake(0.9), 0.01, 1.0, false);
  run(build_frozenlake(0.5), 0.3, 0.01, true);
  run(build_cliffwalking(0.9), 0.01, 1.0, false);
  run(build_cliffwalking(0.99), 0.1, 0.0, true);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    run(random_mdp(2 + static_cast<Index>(seed), 3, 0.9, seed), 0.05 * (1 + seed % 4), 2.0,
        seed % 2 == 1);
  }
  return {identical == configs,
          std::to_string(identical) + "/" + std::to_string(configs) +
              " configs bitwise identical over 400 steps (ERC and ERC*)"};
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    out[entry.path().filename().string()] = text.str();
  }
  return out;
}

Outcome ac12_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "eigenpath_acceptance";
  std::filesystem::remove_all(root);
  std::map<std::string, std::string> runs[2];
  for (int r = 0; r < 2; ++r) {
    ExperimentConfig cfg;
    cfg.steps = 500;
    cfg.mc_episodes = 2000;
    cfg.out_dir = root / ("run" + std::to_string(r));
    cmd_solve(cfg);
    cmd_path(cfg);
    cmd_compare(cfg);
    cmd_dispersion(cfg);
    cmd_verify(cfg);
    runs[r] = read_dir(cfg.out_dir);
  }
  std::filesystem::remove_all(root);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) ++differing;
  }
  const bool ok = differing == 0 && runs[0].size() == runs[1].size() && !runs[0].empty();
  return {ok, std::to_string(runs[0].size()) + " CSV files compared, " +
                  std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"AC1", "dominant eigenpair of fuzzed P^pi", 30, ac1_eigenpair},
      {"AC2", "exact solve vs value iteration", 10, ac2_exact_solve},
      {"AC3", "matrix exponential vs RK4 on FrozenLake", 30, ac3_closed_form},
      {"AC4", "dominant coefficient decays at gamma - 1", 5, ac4_rate},
      {"AC5", "TD path reaches the subspace first", 60, ac5_inherent_path},
      {"AC6", "ERC sweep equals the finite-difference gradient step", 60, ac6_gradient},
      {"AC7", "ERC convergence and shifted fixed point", 120, ac7_convergence},
      {"AC8", "ERC vs TD distance and error", 120, ac8_comparison},
      {"AC9", "variance identity", 5, ac9_identity},
      {"AC10", "Monte Carlo ground truth", 120, ac10_monte_carlo},
      {"AC11", "beta = 0 reduces to TD bitwise", 10, ac11_reduction},
      {"AC12", "byte-identical repeated experiments", 60, ac12_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%-4s %s  %s | %s | %.2fs (budget %.0fs%s)\n", c.id, pass ? "PASS" : "FAIL",
                c.title, outcome.measured.c_str(), seconds, c.budget_seconds,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
