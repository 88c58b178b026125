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

// Deterministic experiment runners behind the command-line tool. Every
// runner writes CSV (and SVG with sidecar CSV) under the configured output
// directory together with the effective configuration.

#ifndef EIGENPATH_EXPERIMENT_HPP_
#define EIGENPATH_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eigenpath/erc.hpp"

namespace eigenpath {

// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Learner { kTd, kErc, kErcStar, kOde, kMc };

std::string_view learner_name(Learner learner);
Learner parse_learner(std::string_view name);

inline constexpr double kBurnInFraction = 0.1;
inline constexpr double kSettleFraction = 0.1;

struct ExperimentConfig {
  std::string env = "frozenlake4x4";
  // "uniform" or the path of a serialized policy.
  std::string policy = "uniform";
  double gamma = 0.9;
  // Empty means the command's default learner set.
  std::vector<Learner> learners;

  double beta = 0.3;
  double lr = 0.01;
  bool truncation = false;
  double r_max = std::numeric_limits<double>::infinity();
  double r_min = 0.0;

  // 0 means the command default.
  std::size_t steps = 0;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // Standard deviation of the Q0 perturbation; unset means the command
  // default (0.01 for path, 1.0 for compare and dispersion).
  std::optional<double> init_scale;
  double dt = 0.01;

  std::size_t mc_episodes = 20000;
  std::size_t mc_checkpoint = 100;
  // 0 means the minimal admissible horizon for gamma.
  std::size_t mc_horizon = 0;
  bool mc_counterpart = true;

  // Transition used by the rate check of `verify`: "chain" or "identity".
  std::string rate_instance = "chain";

  std::filesystem::path out_dir = "results";
  bool full = false;

  ErcConfig erc_config() const;
  // Throws ConfigError.
  void validate() const;
};

ExperimentConfig parse_config(std::string_view toml_text);
ExperimentConfig load_config(const std::filesystem::path& path);
// The output directory is left out so that runs differing only in where they
// write produce identical bytes.
std::string to_toml(const ExperimentConfig& config);

struct CommandResult {
  bool passed = true;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;
};

CommandResult cmd_solve(const ExperimentConfig& config);
CommandResult cmd_path(const ExperimentConfig& config);
CommandResult cmd_compare(const ExperimentConfig& config);
CommandResult cmd_verify(const ExperimentConfig& config);
CommandResult cmd_dispersion(const ExperimentConfig& config);

}  // namespace eigenpath

#endif  // EIGENPATH_EXPERIMENT_HPP_
