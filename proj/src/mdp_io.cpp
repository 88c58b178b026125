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

#include "eigenpath/mdp_io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "eigenpath/errors.hpp"

namespace eigenpath {
namespace {

using nlohmann::json;

Index read_dimension(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer()) {
    throw InvariantError(std::string("missing integer field '") + key + "'");
  }
  return doc.at(key).get<Index>();
}

// The named member, or a null node when absent.
const json& field(const json& doc, const char* key) {
  static const json kNull;
  const auto it = doc.find(key);
  return it == doc.end() ? kNull : *it;
}

const json& read_array(const json& node, Index expected, const std::string& what) {
  if (!node.is_array() || static_cast<Index>(node.size()) != expected) {
    throw DimensionError(what + " must be an array of length " +
                         std::to_string(expected));
  }
  return node;
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

void write_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

json mdp_to_json(const TabularMdp& mdp) {
  const Index n_states = mdp.n_states();
  const Index n_actions = mdp.n_actions();
  json reward = json::array();
  json transition = json::array();
  for (Index s = 0; s < n_states; ++s) {
    std::vector<double> r_row;
    json t_row = json::array();
    for (Index a = 0; a < n_actions; ++a) {
      r_row.push_back(mdp.reward(s, a));
      std::vector<double> dist;
      for (Index next = 0; next < n_states; ++next) {
        dist.push_back(mdp.transition(s, a, next));
      }
      t_row.push_back(dist);
    }
    reward.push_back(r_row);
    transition.push_back(t_row);
  }
  std::vector<double> rho0(mdp.rho0().data(), mdp.rho0().data() + n_states);
  return json{{"n_states", n_states},     {"n_actions", n_actions},
              {"gamma", mdp.gamma()},     {"rho0", rho0},
              {"reward", reward},         {"transition", transition}};
}

TabularMdp mdp_from_json(const json& doc) {
  const Index n_states = read_dimension(doc, "n_states");
  const Index n_actions = read_dimension(doc, "n_actions");
  if (n_states < 1 || n_actions < 1) {
    throw InvariantError("n_states and n_actions must be positive");
  }
  if (!doc.contains("gamma") || !doc.at("gamma").is_number()) {
    throw InvariantError("missing numeric field 'gamma'");
  }
  const auto& rho0_node = read_array(field(doc, "rho0"), n_states, "rho0");
  const auto& reward_node = read_array(field(doc, "reward"), n_states, "reward");
  const auto& trans_node =
      read_array(field(doc, "transition"), n_states, "transition");

  Vector rho0(n_states);
  Vector reward(n_states * n_actions);
  Matrix transition(n_states * n_actions, n_states);
  for (Index s = 0; s < n_states; ++s) {
    rho0(s) = rho0_node.at(s).get<double>();
    const auto& r_row = read_array(reward_node.at(s), n_actions,
                                   "reward[" + std::to_string(s) + "]");
    const auto& t_row = read_array(trans_node.at(s), n_actions,
                                   "transition[" + std::to_string(s) + "]");
    for (Index a = 0; a < n_actions; ++a) {
      reward(flat_index(s, a, n_actions)) = r_row.at(a).get<double>();
      const auto& dist = read_array(
          t_row.at(a), n_states,
          "transition[" + std::to_string(s) + "][" + std::to_string(a) + "]");
      for (Index next = 0; next < n_states; ++next) {
        transition(flat_index(s, a, n_actions), next) = dist.at(next).get<double>();
      }
    }
  }
  return TabularMdp(n_states, n_actions, std::move(transition), std::move(reward),
                    doc.at("gamma").get<double>(), std::move(rho0));
}

json policy_to_json(const Policy& policy) {
  json probs = json::array();
  for (Index s = 0; s < policy.n_states(); ++s) {
    std::vector<double> row;
    for (Index a = 0; a < policy.n_actions(); ++a) row.push_back(policy.probability(s, a));
    probs.push_back(row);
  }
  return json{{"n_states", policy.n_states()},
              {"n_actions", policy.n_actions()},
              {"probs", probs}};
}

Policy policy_from_json(const json& doc) {
  const Index n_states = read_dimension(doc, "n_states");
  const Index n_actions = read_dimension(doc, "n_actions");
  if (n_states < 1 || n_actions < 1) {
    throw InvariantError("n_states and n_actions must be positive");
  }
  const auto& rows = read_array(field(doc, "probs"), n_states, "probs");
  Matrix probs(n_states, n_actions);
  for (Index s = 0; s < n_states; ++s) {
    const auto& row = read_array(rows.at(s), n_actions, "probs[" + std::to_string(s) + "]");
    for (Index a = 0; a < n_actions; ++a) probs(s, a) = row.at(a).get<double>();
  }
  return Policy(std::move(probs));
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  write_file(mdp_to_json(mdp), path);
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  return mdp_from_json(read_file(path));
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
  write_file(policy_to_json(policy), path);
}

Policy load_policy(const std::filesystem::path& path) {
  return policy_from_json(read_file(path));
}

}  // namespace eigenpath
