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

// Command-line front end: eigenpath <solve|path|compare|verify|dispersion>.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 runtime failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eigenpath/experiment.hpp"

namespace {

using eigenpath::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::string out;
  std::string seeds;
  bool full = false;
  std::string env;
  std::string policy;
  double gamma = 0.0;
  std::vector<std::string> learners;
  std::size_t steps = 0;
  double beta = 0.0;
  double lr = 0.0;
  bool truncation = false;
  double r_max = 0.0;
  double r_min = 0.0;
  double init_scale = 0.0;
  double dt = 0.0;
  std::size_t episodes = 0;
  std::size_t checkpoint = 0;
  std::size_t horizon = 0;
  std::string rate_instance;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw eigenpath::ConfigError("--seeds expects comma-separated integers, got '" + text + "'");
    }
    seeds.push_back(v);
  }
  if (seeds.empty()) throw eigenpath::ConfigError("--seeds must list at least one seed");
  return seeds;
}

ExperimentConfig resolve(const CLI::App& app, const Overrides& o) {
  ExperimentConfig cfg =
      o.config_path.empty() ? ExperimentConfig{} : eigenpath::load_config(o.config_path);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--out")) cfg.out_dir = o.out;
  if (given("--seeds")) cfg.seeds = parse_seeds(o.seeds);
  if (given("--full")) cfg.full = o.full;
  if (given("--env")) cfg.env = o.env;
  if (given("--policy")) cfg.policy = o.policy;
  if (given("--gamma")) cfg.gamma = o.gamma;
  if (given("--learner")) {
    cfg.learners.clear();
    for (const std::string& l : o.learners) cfg.learners.push_back(eigenpath::parse_learner(l));
  }
  if (given("--steps")) cfg.steps = o.steps;
  if (given("--beta")) cfg.beta = o.beta;
  if (given("--lr")) cfg.lr = o.lr;
  if (given("--truncation")) cfg.truncation = o.truncation;
  if (given("--r-max")) cfg.r_max = o.r_max;
  if (given("--r-min")) cfg.r_min = o.r_min;
  if (given("--init-scale")) cfg.init_scale = o.init_scale;
  if (given("--dt")) cfg.dt = o.dt;
  if (given("--episodes")) cfg.mc_episodes = o.episodes;
  if (given("--checkpoint")) cfg.mc_checkpoint = o.checkpoint;
  if (given("--horizon")) cfg.mc_horizon = o.horizon;
  if (given("--rate-instance")) cfg.rate_instance = o.rate_instance;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of tabular policy-evaluation dynamics"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "TOML experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seeds", o.seeds, "comma-separated seed list");
  app.add_flag("--full", o.full, "write every error entry in path CSVs");
  app.add_option("--env", o.env, "frozenlake4x4 | cliffwalking | random:<S>x<A>:<seed>");
  app.add_option("--policy", o.policy, "uniform or a policy JSON file");
  app.add_option("--gamma", o.gamma, "discount factor");
  app.add_option("--learner", o.learners, "td, erc, erc_star, ode, mc")->delimiter(',');
  app.add_option("--steps", o.steps, "sweeps per run");
  app.add_option("--beta", o.beta, "regularisation weight");
  app.add_option("--lr", o.lr, "learning rate");
  app.add_flag("--truncation", o.truncation, "clamp the regulariser to [r_min, r_max]");
  app.add_option("--r-max", o.r_max, "truncation ceiling");
  app.add_option("--r-min", o.r_min, "truncation floor");
  app.add_option("--init-scale", o.init_scale, "std of the Q0 perturbation");
  app.add_option("--dt", o.dt, "RK4 step of the ode learner");
  app.add_option("--episodes", o.episodes, "Monte Carlo episodes");
  app.add_option("--checkpoint", o.checkpoint, "episodes between Monte Carlo path rows");
  app.add_option("--horizon", o.horizon, "Monte Carlo truncation horizon");
  app.add_option("--rate-instance", o.rate_instance, "chain | identity (verify)");

  struct Command {
    const char* name;
    const char* help;
    eigenpath::CommandResult (*run)(const ExperimentConfig&);
  };
  const Command commands[] = {
      {"solve", "exact Q*, spectrum of P^pi and the spectral-assumption report",
       eigenpath::cmd_solve},
      {"path", "error paths of td / ode / mc learners", eigenpath::cmd_path},
      {"compare", "td vs erc vs erc_star across seeds", eigenpath::cmd_compare},
      {"verify", "numerical verification battery", eigenpath::cmd_verify},
      {"dispersion", "index of dispersion of Q over training", eigenpath::cmd_dispersion},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = resolve(app, o);
    for (const Command& c : commands) {
      if (!app.got_subcommand(c.name)) continue;
      const eigenpath::CommandResult result = c.run(cfg);
      for (const std::string& line : result.summary) std::cout << line << '\n';
      std::cout << "wrote " << result.files.size() << " files to " << cfg.out_dir.string()
                << '\n';
      return result.passed ? 0 : 1;
    }
  } catch (const eigenpath::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
