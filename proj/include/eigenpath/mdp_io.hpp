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

// JSON (de)serialization of MDPs and policies.
//
// MDP document:
//   {"n_states": S, "n_actions": A, "gamma": g, "rho0": [S],
//    "reward": [[A] x S], "transition": [[[S] x A] x S]}
// Policy document:
//   {"n_states": S, "n_actions": A, "probs": [[A] x S]}
//
// Doubles are written in shortest round-trip form, so load(save(x)) is
// bit-identical.

#ifndef EIGENPATH_MDP_IO_HPP_
#define EIGENPATH_MDP_IO_HPP_

#include <filesystem>

#include <nlohmann/json.hpp>

#include "eigenpath/mdp.hpp"

namespace eigenpath {

nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& doc);

nlohmann::json policy_to_json(const Policy& policy);
Policy policy_from_json(const nlohmann::json& doc);

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);
TabularMdp load_mdp(const std::filesystem::path& path);

void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);

}  // namespace eigenpath

#endif  // EIGENPATH_MDP_IO_HPP_
