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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eigenpath/experiment.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace eigenpath {
namespace {

const std::vector<std::string_view>& known_keys(std::string_view section) {
  static const std::vector<std::string_view> top = {
      "env", "policy", "gamma", "learners", "steps", "seeds", "init_scale",
      "out", "full", "erc", "ode", "mc", "verify"};
  static const std::vector<std::string_view> erc = {"beta", "lr", "truncation", "r_max",
                                                    "r_min"};
  static const std::vector<std::string_view> ode = {"dt"};
  static const std::vector<std::string_view> mc = {"episodes", "checkpoint", "horizon",
                                                   "counterpart"};
  static const std::vector<std::string_view> verify = {"rate_instance"};
  static const std::vector<std::string_view> none;
  if (section.empty()) return top;
  if (section == "erc") return erc;
  if (section == "ode") return ode;
  if (section == "mc") return mc;
  if (section == "verify") return verify;
  return none;
}

void reject_unknown(const toml::table& table, std::string_view section) {
  const auto& keys = known_keys(section);
  for (const auto& [key, node] : table) {
    if (std::find(keys.begin(), keys.end(), key.str()) == keys.end()) {
      throw ConfigError("unknown config key '" +
                        (section.empty() ? std::string() : std::string(section) + ".") +
                        std::string(key.str()) + "'");
    }
    if (section.empty() && node.is_table()) reject_unknown(*node.as_table(), key.str());
  }
}

std::string key_path(std::string_view section, std::string_view key) {
  return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

const toml::node* find(const toml::table& root, std::string_view section,
                       std::string_view key) {
  const toml::table* table = &root;
  if (!section.empty()) {
    const toml::node* sub = root.get(section);
    if (sub == nullptr) return nullptr;
    table = sub->as_table();
    if (table == nullptr) throw ConfigError("'" + std::string(section) + "' must be a table");
  }
  return table->get(key);
}

void read_real(const toml::table& root, std::string_view section, std::string_view key,
               double& out) {
  const toml::node* node = find(root, section, key);
  if (node == nullptr) return;
  if (auto v = node->value<double>()) {
    out = *v;
    return;
  }
  throw ConfigError("'" + key_path(section, key) + "' must be a number");
}

void read_bool(const toml::table& root, std::string_view section, std::string_view key,
               bool& out) {
  const toml::node* node = find(root, section, key);
  if (node == nullptr) return;
  if (auto v = node->value_exact<bool>()) {
    out = *v;
    return;
  }
  throw ConfigError("'" + key_path(section, key) + "' must be a boolean");
}

void read_count(const toml::table& root, std::string_view section, std::string_view key,
                std::size_t& out) {
  const toml::node* node = find(root, section, key);
  if (node == nullptr) return;
  if (auto v = node->value_exact<std::int64_t>(); v && *v >= 0) {
    out = static_cast<std::size_t>(*v);
    return;
  }
  throw ConfigError("'" + key_path(section, key) + "' must be a non-negative integer");
}

void read_string(const toml::table& root, std::string_view section, std::string_view key,
                 std::string& out) {
  const toml::node* node = find(root, section, key);
  if (node == nullptr) return;
  if (auto v = node->value_exact<std::string>()) {
    out = *v;
    return;
  }
  throw ConfigError("'" + key_path(section, key) + "' must be a string");
}

}  // namespace

std::string_view learner_name(Learner learner) {
  switch (learner) {
    case Learner::kTd: return "td";
    case Learner::kErc: return "erc";
    case Learner::kErcStar: return "erc_star";
    case Learner::kOde: return "ode";
    case Learner::kMc: return "mc";
  }
  return "td";
}

Learner parse_learner(std::string_view name) {
  for (Learner l : {Learner::kTd, Learner::kErc, Learner::kErcStar, Learner::kOde, Learner::kMc}) {
    if (learner_name(l) == name) return l;
  }
  throw ConfigError("unknown learner '" + std::string(name) +
                    "' (expected td, erc, erc_star, ode or mc)");
}

ErcConfig ExperimentConfig::erc_config() const {
  ErcConfig cfg;
  cfg.beta = beta;
  cfg.lr = lr;
  cfg.truncation_enabled = truncation;
  cfg.r_max = r_max;
  cfg.r_min = r_min;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (env.empty()) throw ConfigError("env must not be empty");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("erc.beta must be >= 0");
  if (!(lr > 0.0 && lr <= 1.0)) throw ConfigError("erc.lr must lie in (0, 1]");
  if (!(r_min >= 0.0) || !(r_max >= r_min)) {
    throw ConfigError("erc.r_min and erc.r_max must satisfy 0 <= r_min <= r_max");
  }
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (init_scale && !(*init_scale >= 0.0 && std::isfinite(*init_scale))) {
    throw ConfigError("init_scale must be a finite non-negative number");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("ode.dt must be positive");
  if (mc_episodes == 0) throw ConfigError("mc.episodes must be positive");
  if (mc_checkpoint == 0) throw ConfigError("mc.checkpoint must be positive");
  if (rate_instance != "chain" && rate_instance != "identity") {
    throw ConfigError("verify.rate_instance must be 'chain' or 'identity'");
  }
}

ExperimentConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  reject_unknown(root, "");

  ExperimentConfig cfg;
  read_string(root, "", "env", cfg.env);
  read_string(root, "", "policy", cfg.policy);
  read_real(root, "", "gamma", cfg.gamma);
  if (const toml::node* node = root.get("learners")) {
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw ConfigError("'learners' must be an array of strings");
    for (const toml::node& item : *arr) {
      auto name = item.value_exact<std::string>();
      if (!name) throw ConfigError("'learners' must be an array of strings");
      cfg.learners.push_back(parse_learner(*name));
    }
  }
  read_count(root, "", "steps", cfg.steps);
  if (const toml::node* node = root.get("seeds")) {
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw ConfigError("'seeds' must be an array of integers");
    cfg.seeds.clear();
    for (const toml::node& item : *arr) {
      auto v = item.value_exact<std::int64_t>();
      if (!v || *v < 0) throw ConfigError("'seeds' must be non-negative integers");
      cfg.seeds.push_back(static_cast<std::uint64_t>(*v));
    }
  }
  if (root.contains("init_scale")) {
    double scale = 0.0;
    read_real(root, "", "init_scale", scale);
    cfg.init_scale = scale;
  }
  std::string out = cfg.out_dir.string();
  read_string(root, "", "out", out);
  cfg.out_dir = out;
  read_bool(root, "", "full", cfg.full);

  read_real(root, "erc", "beta", cfg.beta);
  read_real(root, "erc", "lr", cfg.lr);
  read_bool(root, "erc", "truncation", cfg.truncation);
  read_real(root, "erc", "r_max", cfg.r_max);
  read_real(root, "erc", "r_min", cfg.r_min);
  read_real(root, "ode", "dt", cfg.dt);
  read_count(root, "mc", "episodes", cfg.mc_episodes);
  read_count(root, "mc", "checkpoint", cfg.mc_checkpoint);
  read_count(root, "mc", "horizon", cfg.mc_horizon);
  read_bool(root, "mc", "counterpart", cfg.mc_counterpart);
  read_string(root, "verify", "rate_instance", cfg.rate_instance);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_toml(const ExperimentConfig& config) {
  toml::table root;
  root.insert("env", config.env);
  root.insert("policy", config.policy);
  root.insert("gamma", config.gamma);
  toml::array learners;
  for (Learner l : config.learners) learners.push_back(std::string(learner_name(l)));
  root.insert("learners", std::move(learners));
  root.insert("steps", static_cast<std::int64_t>(config.steps));
  toml::array seeds;
  for (std::uint64_t s : config.seeds) seeds.push_back(static_cast<std::int64_t>(s));
  root.insert("seeds", std::move(seeds));
  if (config.init_scale) root.insert("init_scale", *config.init_scale);
  root.insert("full", config.full);
  root.insert("erc", toml::table{{"beta", config.beta},
                                 {"lr", config.lr},
                                 {"truncation", config.truncation},
                                 {"r_max", config.r_max},
                                 {"r_min", config.r_min}});
  root.insert("ode", toml::table{{"dt", config.dt}});
  root.insert("mc", toml::table{{"episodes", static_cast<std::int64_t>(config.mc_episodes)},
                                {"checkpoint", static_cast<std::int64_t>(config.mc_checkpoint)},
                                {"horizon", static_cast<std::int64_t>(config.mc_horizon)},
                                {"counterpart", config.mc_counterpart}});
  root.insert("verify", toml::table{{"rate_instance", config.rate_instance}});
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

}  // namespace eigenpath
