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

#include "eigenpath/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "eigenpath/csv.hpp"
#include "eigenpath/dynamics.hpp"
#include "eigenpath/envs.hpp"
#include "eigenpath/errors.hpp"
#include "eigenpath/mdp_io.hpp"
#include "eigenpath/monte_carlo.hpp"
#include "eigenpath/parallel.hpp"
#include "eigenpath/spectral.hpp"
#include "eigenpath/svg.hpp"
#include "eigenpath/verification.hpp"

namespace eigenpath {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kDefaultSteps = 3000;
constexpr double kPathInitScale = 0.01;
constexpr double kCompareInitScale = 1.0;
constexpr std::size_t kPlotPoints = 600;
constexpr double kLeadMajority = 0.9;

struct Problem {
  TabularMdp mdp;
  Policy policy;
  EvaluationModel model;
  QTable q_star;

  Problem(TabularMdp m, Policy p)
      : mdp(std::move(m)), policy(std::move(p)), model(mdp, policy), q_star(solve_q_star(model)) {}
};

Problem load_problem(const ExperimentConfig& config) {
  TabularMdp mdp = [&] {
    try {
      return make_env(config.env, config.gamma);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  Policy policy = config.policy == "uniform"
                      ? Policy::uniform(mdp.n_states(), mdp.n_actions())
                      : load_policy(config.policy);
  try {
    check_compatible(mdp, policy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return Problem(std::move(mdp), std::move(policy));
}

std::ofstream open_output(const fs::path& path, CommandResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  result.files.push_back(path);
  return out;
}

fs::path prepare_output(const ExperimentConfig& config, CommandResult& result) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + config.out_dir.string() + ": " +
                             ec.message());
  }
  open_output(config.out_dir / "config.toml", result) << to_toml(config);
  return config.out_dir;
}

std::size_t steps_or_default(const ExperimentConfig& config) {
  return config.steps == 0 ? kDefaultSteps : config.steps;
}

std::vector<Learner> learners_or(const ExperimentConfig& config, std::vector<Learner> fallback) {
  return config.learners.empty() ? fallback : config.learners;
}

bool contains(const std::vector<Learner>& learners, Learner l) {
  return std::find(learners.begin(), learners.end(), l) != learners.end();
}

std::string fmt_real(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void write_checks(const fs::path& path, const std::vector<CheckResult>& checks,
                  CommandResult& result) {
  std::ofstream out = open_output(path, result);
  CsvWriter csv(out, {"check", "status", "measured", "threshold", "detail"});
  for (const CheckResult& c : checks) {
    csv.row(c.name, status_name(c.status), c.measured, c.threshold, "\"" + c.detail + "\"");
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-32s measured %.3g (threshold %.3g)",
                  std::string(status_name(c.status)).c_str(), c.name.c_str(), c.measured,
                  c.threshold);
    result.summary.push_back(std::string(line) + "  " + c.detail);
    if (c.status == CheckStatus::kFail) result.passed = false;
  }
}

StepperConfig stepper_for(Learner learner, const ExperimentConfig& config) {
  StepperConfig sc;
  sc.erc = config.erc_config();
  sc.dt = config.dt;
  switch (learner) {
    case Learner::kTd: sc.kind = Stepper::kTd; break;
    case Learner::kErc: sc.kind = Stepper::kErc; break;
    case Learner::kErcStar: sc.kind = Stepper::kErcStar; break;
    case Learner::kOde: sc.kind = Stepper::kOde; break;
    case Learner::kMc: throw ConfigError("mc has no sweep stepper");
  }
  return sc;
}

QTable initial_q(const Problem& p, double scale, std::uint64_t seed) {
  return perturbed_initial_q(p.mdp.n_states(), p.mdp.n_actions(), scale, seed);
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

std::size_t mc_horizon(const ExperimentConfig& config) {
  return config.mc_horizon == 0 ? minimal_horizon(config.gamma) : config.mc_horizon;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// ----------------------------------------------------------------- path

struct PathRun {
  Learner learner;
  std::vector<std::uint64_t> seeds;
  std::vector<PathTrace> traces;
};

PathRun run_paths(const Problem& p, const ExperimentConfig& config, Learner learner,
                  double scale, std::size_t steps) {
  PathRun run{learner, {}, {}};
  if (learner == Learner::kOde) {
    run.seeds = {config.seeds.front()};
  } else {
    run.seeds = config.seeds;
  }
  run.traces.resize(run.seeds.size());
  parallel_for(run.seeds.size(), [&](std::size_t i) {
    const QTable q0 = initial_q(p, scale, run.seeds[i]);
    if (learner == Learner::kMc) {
      run.traces[i] = monte_carlo_path(p.mdp, p.policy, p.q_star, q0, config.mc_episodes,
                                       config.mc_checkpoint, mc_horizon(config), run.seeds[i]);
    } else {
      run.traces[i] = record_inherent_path(p.model, q0, p.q_star, stepper_for(learner, config),
                                           steps);
    }
  });
  return run;
}

// Index of the first row at or below kSettleFraction of the initial value.
std::string hit_cell(const std::optional<std::size_t>& hit) {
  return hit ? std::to_string(*hit) : std::string("none");
}

}  // namespace

CommandResult cmd_solve(const ExperimentConfig& config) {
  config.validate();
  CommandResult result;
  const Problem p = load_problem(config);
  const fs::path dir = prepare_output(config, result);

  save_mdp(p.mdp, dir / "mdp.json");
  result.files.push_back(dir / "mdp.json");
  {
    std::ofstream out = open_output(dir / "q_star.csv", result);
    CsvWriter csv(out, {"state", "action", "q_star"});
    for (Index s = 0; s < p.mdp.n_states(); ++s) {
      for (Index a = 0; a < p.mdp.n_actions(); ++a) {
        csv.row(s, a, p.q_star.values()(flat_index(s, a, p.mdp.n_actions())));
      }
    }
  }
  const EigenDecomposition decomp = eigendecompose(p.model.transition());
  {
    std::ofstream out = open_output(dir / "spectrum.csv", result);
    write_spectrum_csv(out, decomp);
  }
  const AssumptionReport report = check_assumption_one(decomp);
  {
    std::ofstream out = open_output(dir / "assumption.txt", result);
    out << "holds: " << (report.holds ? "true" : "false") << '\n';
    out << "min_singular_value: " << format_real(decomp.min_singular_value) << '\n';
    out << "condition_estimate: " << format_real(decomp.condition_estimate) << '\n';
    for (const std::string& v : report.violations) out << "violation: " << v << '\n';
  }
  result.summary.push_back("pairs " + std::to_string(p.q_star.size()) + ", spectral assumption " +
                           (report.holds ? "holds" : "fails: " + report.summary()));
  write_checks(dir / "solve_checks.csv",
               {check_dominant_eigenpair(p.model.transition()),
                check_exact_solve(p.mdp, p.policy)},
               result);
  return result;
}

CommandResult cmd_path(const ExperimentConfig& config) {
  config.validate();
  CommandResult result;
  std::vector<Learner> learners = learners_or(config, {Learner::kTd});
  const bool wants_counterpart =
      config.mc_counterpart && !contains(learners, Learner::kMc) &&
      (contains(learners, Learner::kTd) || contains(learners, Learner::kOde));
  if (wants_counterpart) learners.push_back(Learner::kMc);

  const Problem p = load_problem(config);
  const fs::path dir = prepare_output(config, result);
  const double scale = config.init_scale.value_or(kPathInitScale);
  const std::size_t steps = steps_or_default(config);

  std::ofstream summary_out = open_output(dir / "path_summary.csv", result);
  CsvWriter summary(summary_out,
                    {"learner", "seed", "distance_hit", "norm_hit", "distance_leads"});
  for (Learner learner : learners) {
    const PathRun run = run_paths(p, config, learner, scale, steps);
    const std::string name(learner_name(learner));
    PlotPanel panel{name + " path", "distance to 1-eigensubspace", "error L2 norm", false, {}};
    std::size_t leads = 0;
    for (std::size_t i = 0; i < run.traces.size(); ++i) {
      const PathTrace& trace = run.traces[i];
      const std::string stem = learner == Learner::kOde ? "path_ode"
                                                         : "path_" + name + "_" + seed_tag(run.seeds[i]);
      {
        std::ofstream out = open_output(dir / (stem + ".csv"), result);
        trace.write_csv(out, config.full);
      }
      const auto dist_hit = first_drop_below(trace.subspace_distances, kSettleFraction);
      const auto norm_hit = first_drop_below(trace.error_norms, kSettleFraction);
      const bool lead = dist_hit && (!norm_hit || *dist_hit < *norm_hit);
      leads += lead ? 1 : 0;
      summary.row(name, run.seeds[i], hit_cell(dist_hit), hit_cell(norm_hit), lead ? 1 : 0);

      PlotSeries series{learner == Learner::kOde ? "ode" : seed_tag(run.seeds[i]), {}, {}, {}, {}};
      for (std::size_t k : thin_indices(trace.size(), kPlotPoints)) {
        series.x.push_back(trace.subspace_distances[k]);
        series.y.push_back(trace.error_norms[k]);
      }
      panel.series.push_back(std::move(series));
    }
    write_chart(dir / ("path_" + name + "_plot.svg"), {panel});
    result.files.push_back(dir / ("path_" + name + "_plot.svg"));
    result.files.push_back(dir / ("path_" + name + "_plot.csv"));

    std::string line = name + ": distance settles first in " + std::to_string(leads) + "/" +
                       std::to_string(run.traces.size()) + " runs";
    if (learner == Learner::kTd) {
      const bool ok = static_cast<double>(leads) >=
                      kLeadMajority * static_cast<double>(run.traces.size()) - 1e-12;
      if (!ok) result.passed = false;
      line += ok ? " (PASS, need 90%)" : " (FAIL, need 90%)";
    }
    result.summary.push_back(line);
  }
  return result;
}

CommandResult cmd_compare(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Learner> learners =
      learners_or(config, {Learner::kTd, Learner::kErc, Learner::kErcStar});
  if (!contains(learners, Learner::kTd) || !contains(learners, Learner::kErc)) {
    throw ConfigError("compare needs at least the td and erc learners");
  }
  for (Learner l : learners) {
    if (l == Learner::kOde || l == Learner::kMc) {
      throw ConfigError("compare supports td, erc and erc_star only");
    }
  }
  CommandResult result;
  const Problem p = load_problem(config);
  const fs::path dir = prepare_output(config, result);
  const double scale = config.init_scale.value_or(kCompareInitScale);
  const std::size_t steps = steps_or_default(config);
  const std::size_t n_seeds = config.seeds.size();
  const ErcConfig erc = config.erc_config();

  // One task per (learner, seed); slot order fixes the output order.
  std::vector<PathTrace> traces(learners.size() * n_seeds);
  parallel_for(traces.size(), [&](std::size_t task) {
    const Learner learner = learners[task / n_seeds];
    const QTable q0 = initial_q(p, scale, config.seeds[task % n_seeds]);
    traces[task] = record_inherent_path(p.model, q0, p.q_star, stepper_for(learner, config), steps);
  });

  // Per-run loss traces.
  std::vector<std::string> trace_text(traces.size());
  parallel_for(traces.size(), [&](std::size_t task) {
    const Learner learner = learners[task / n_seeds];
    std::ostringstream out;
    CsvWriter csv(out, {"step", "loss_pe", "r_push", "loss_total", "error_l2_vs_qstar",
                        "subspace_distance", "var_q", "var_target", "covariance"});
    const PathTrace& trace = traces[task];
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const QTable q(p.mdp.n_states(), p.mdp.n_actions(), trace.errors[k] + p.q_star.values());
      const QTable target = bellman_backup(p.model, q);
      const double loss_pe = policy_evaluation_loss(q, target);
      const VarianceDecomposition vd = variance_decomposition(q, target);
      double total = loss_pe;
      if (learner == Learner::kErc) {
        total = erc_loss(q, target, erc);
      } else if (learner == Learner::kErcStar) {
        const Vector& d = trace.errors[k];
        total = loss_pe + erc.beta * (d.array() - d.mean()).square().mean();
      }
      csv.row(k, loss_pe, vd.r_push_value, total, trace.error_norms[k],
              trace.subspace_distances[k], vd.var_q, vd.var_target, vd.covariance);
    }
    trace_text[task] = out.str();
  });
  for (std::size_t task = 0; task < traces.size(); ++task) {
    const std::string name(learner_name(learners[task / n_seeds]));
    open_output(dir / ("trace_" + name + "_" + seed_tag(config.seeds[task % n_seeds]) + ".csv"),
                result)
        << trace_text[task];
  }

  // Aggregation across seeds.
  struct Aggregate {
    std::vector<double> dist_mean, dist_std, mae_mean, mae_std;
  };
  std::vector<Aggregate> agg(learners.size());
  std::ofstream out = open_output(dir / "compare.csv", result);
  CsvWriter csv(out, {"learner", "step", "distance_mean", "distance_std", "abs_error_mean",
                      "abs_error_std"});
  for (std::size_t li = 0; li < learners.size(); ++li) {
    for (std::size_t k = 0; k <= steps; ++k) {
      std::vector<double> dist, mae;
      for (std::size_t si = 0; si < n_seeds; ++si) {
        const PathTrace& trace = traces[li * n_seeds + si];
        dist.push_back(trace.subspace_distances[k]);
        mae.push_back(trace.errors[k].cwiseAbs().mean());
      }
      agg[li].dist_mean.push_back(mean_of(dist));
      agg[li].dist_std.push_back(population_std(dist));
      agg[li].mae_mean.push_back(mean_of(mae));
      agg[li].mae_std.push_back(population_std(mae));
      csv.row(std::string(learner_name(learners[li])), k, agg[li].dist_mean.back(),
              agg[li].dist_std.back(), agg[li].mae_mean.back(), agg[li].mae_std.back());
    }
  }

  PlotPanel dist_panel{"distance to 1-eigensubspace", "step", "distance", true, {}};
  PlotPanel mae_panel{"absolute approximation error", "step", "mean |Q - Q*|", true, {}};
  const auto idx = thin_indices(steps + 1, kPlotPoints);
  for (std::size_t li = 0; li < learners.size(); ++li) {
    const std::string name(learner_name(learners[li]));
    PlotSeries d{name, {}, {}, {}, {}}, m{name, {}, {}, {}, {}};
    for (std::size_t k : idx) {
      const double x = static_cast<double>(k);
      d.x.push_back(x);
      d.y.push_back(agg[li].dist_mean[k]);
      d.y_low.push_back(agg[li].dist_mean[k] - agg[li].dist_std[k]);
      d.y_high.push_back(agg[li].dist_mean[k] + agg[li].dist_std[k]);
      m.x.push_back(x);
      m.y.push_back(agg[li].mae_mean[k]);
      m.y_low.push_back(agg[li].mae_mean[k] - agg[li].mae_std[k]);
      m.y_high.push_back(agg[li].mae_mean[k] + agg[li].mae_std[k]);
    }
    dist_panel.series.push_back(std::move(d));
    mae_panel.series.push_back(std::move(m));
  }
  write_chart(dir / "compare_plot.svg", {dist_panel, mae_panel});
  result.files.push_back(dir / "compare_plot.svg");
  result.files.push_back(dir / "compare_plot.csv");

  const std::size_t td = static_cast<std::size_t>(
      std::find(learners.begin(), learners.end(), Learner::kTd) - learners.begin());
  const std::size_t ec = static_cast<std::size_t>(
      std::find(learners.begin(), learners.end(), Learner::kErc) - learners.begin());
  const std::size_t burn_in =
      static_cast<std::size_t>(std::ceil(kBurnInFraction * static_cast<double>(steps)));
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::size_t worst_step = burn_in;
  for (std::size_t k = burn_in; k <= steps; ++k) {
    const double gap = agg[ec].dist_mean[k] - agg[td].dist_mean[k];
    if (gap > worst_gap) worst_gap = gap, worst_step = k;
  }
  CheckResult dist_check;
  dist_check.name = "erc_distance_after_burn_in";
  dist_check.measured = worst_gap;
  dist_check.threshold = 0.0;
  dist_check.status = worst_gap <= 0.0 ? CheckStatus::kPass : CheckStatus::kFail;
  dist_check.detail = "max (erc - td) mean distance from step " + std::to_string(burn_in) +
                      ", attained at step " + std::to_string(worst_step);
  CheckResult mae_check;
  mae_check.name = "erc_final_abs_error";
  mae_check.measured = agg[ec].mae_mean[steps] - agg[td].mae_mean[steps];
  mae_check.threshold = 0.0;
  mae_check.status = mae_check.measured <= 0.0 ? CheckStatus::kPass : CheckStatus::kFail;
  mae_check.detail = "erc " + fmt_real("%.6g", agg[ec].mae_mean[steps]) + " vs td " +
                     fmt_real("%.6g", agg[td].mae_mean[steps]) + " at the final step";
  write_checks(dir / "compare_checks.csv", {dist_check, mae_check}, result);
  return result;
}

CommandResult cmd_dispersion(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Learner> learners = learners_or(config, {Learner::kTd, Learner::kErc});
  for (Learner l : learners) {
    if (l == Learner::kMc) throw ConfigError("dispersion supports sweep learners only");
  }
  CommandResult result;
  const Problem p = load_problem(config);
  const fs::path dir = prepare_output(config, result);
  const double scale = config.init_scale.value_or(kCompareInitScale);
  const std::size_t steps = steps_or_default(config);
  const std::size_t n_seeds = config.seeds.size();

  std::vector<std::vector<std::optional<double>>> index(learners.size() * n_seeds);
  parallel_for(index.size(), [&](std::size_t task) {
    const Learner learner = learners[task / n_seeds];
    const QTable q0 = initial_q(p, scale, config.seeds[task % n_seeds]);
    const PathTrace trace =
        record_inherent_path(p.model, q0, p.q_star, stepper_for(learner, config), steps);
    for (const Vector& err : trace.errors) {
      index[task].push_back(index_of_dispersion(err + p.q_star.values()));
    }
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ofstream out = open_output(dir / "dispersion.csv", result);
  CsvWriter csv(out, {"learner", "step", "index_mean", "index_std", "defined_seeds"});
  PlotPanel panel{"index of dispersion of Q", "step", "variance / mean", false, {}};
  const auto idx = thin_indices(steps + 1, kPlotPoints);
  for (std::size_t li = 0; li < learners.size(); ++li) {
    const std::string name(learner_name(learners[li]));
    std::vector<double> means(steps + 1, nan);
    for (std::size_t k = 0; k <= steps; ++k) {
      std::vector<double> vals;
      for (std::size_t si = 0; si < n_seeds; ++si) {
        if (const auto& v = index[li * n_seeds + si][k]) vals.push_back(*v);
      }
      means[k] = mean_of(vals);
      csv.row(name, k, means[k], population_std(vals), vals.size());
    }
    PlotSeries series{name, {}, {}, {}, {}};
    for (std::size_t k : idx) {
      if (std::isnan(means[k])) continue;
      series.x.push_back(static_cast<double>(k));
      series.y.push_back(means[k]);
    }
    panel.series.push_back(std::move(series));
  }
  write_chart(dir / "dispersion_plot.svg", {panel});
  result.files.push_back(dir / "dispersion_plot.svg");
  result.files.push_back(dir / "dispersion_plot.csv");

  std::ofstream sum_out = open_output(dir / "dispersion_summary.csv", result);
  CsvWriter sum(sum_out, {"learner", "seed", "trajectory_mean_index", "defined_steps"});
  std::map<Learner, double> learner_mean;
  for (std::size_t li = 0; li < learners.size(); ++li) {
    std::vector<double> per_seed;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      std::vector<double> vals;
      for (const auto& v : index[li * n_seeds + si]) {
        if (v) vals.push_back(*v);
      }
      const double m = mean_of(vals);
      sum.row(std::string(learner_name(learners[li])), config.seeds[si], m, vals.size());
      if (!std::isnan(m)) per_seed.push_back(m);
    }
    learner_mean[learners[li]] = mean_of(per_seed);
    result.summary.push_back(std::string(learner_name(learners[li])) +
                             ": trajectory-mean index averaged over seeds " +
                             fmt_real("%.6g", learner_mean[learners[li]]));
  }
  if (learner_mean.count(Learner::kTd) && learner_mean.count(Learner::kErc)) {
    CheckResult check;
    check.name = "erc_mean_index_not_above_td";
    check.measured = learner_mean[Learner::kErc] - learner_mean[Learner::kTd];
    check.threshold = 0.0;
    check.status = check.measured <= 0.0 ? CheckStatus::kPass : CheckStatus::kFail;
    check.detail = "seed-averaged trajectory-mean index, erc minus td";
    write_checks(dir / "dispersion_checks.csv", {check}, result);
  }
  return result;
}

CommandResult cmd_verify(const ExperimentConfig& config) {
  config.validate();
  CommandResult result;
  const Problem p = load_problem(config);
  const fs::path dir = prepare_output(config, result);
  const QTable q0 = initial_q(p, 1.0, config.seeds.front());
  const InducedTransition rate_instance =
      config.rate_instance == "identity"
          ? InducedTransition::from_matrix(Matrix::Identity(4, 4))
          : constructed_chain();
  std::vector<CheckResult> checks;
  checks.push_back(check_dominant_eigenpair(p.model.transition()));
  checks.push_back(check_exact_solve(p.mdp, p.policy));
  checks.push_back(check_subspace_projection(200, config.seeds.front()));
  checks.push_back(check_closed_form_vs_rk4(p.model, q0, {0.1, 1.0, 5.0, 20.0}));
  checks.push_back(check_dominant_rate(rate_instance, config.gamma));
  checks.push_back(check_erc_gradient({0.0, 0.1, 0.3, 1.0}, 5, config.seeds.front()));
  checks.push_back(check_erc_convergence(p.model, config.erc_config()));
  checks.push_back(check_variance_identity(1000, config.seeds.front()));
  checks.push_back(check_beta_zero_reduction(p.model, q0, config.lr, 200));
  write_checks(dir / "verify.csv", checks, result);
  return result;
}

}  // namespace eigenpath
