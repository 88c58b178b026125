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

// Exact tabular models of the grid environments used in the experiments and a
// seeded random-MDP generator.
//
// Terminal cells (holes, goals) are absorbing: every action self-loops with
// probability 1 and zero reward, so their Q values are 0 and the matrix
// Bellman equation applies without special cases.

#ifndef EIGENPATH_ENVS_HPP_
#define EIGENPATH_ENVS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eigenpath/mdp.hpp"

namespace eigenpath {

struct GridMove {
  int d_row = 0;
  int d_col = 0;
};

// The executed action is (chosen + action_offset) mod n_actions.
struct SlipOutcome {
  int action_offset = 0;
  double probability = 1.0;
};

// A grid world described by its layout.
//
// Cells: 'S' start, 'F' free, 'H' hole (absorbing), 'G' goal (absorbing),
// 'C' cliff (entering it pays cliff_reward and teleports to the start).
// Moves off the grid leave the agent in place.
struct EnvSpec {
  std::string name;
  std::vector<std::string> layout;
  std::vector<GridMove> actions;
  std::vector<SlipOutcome> slip;
  double step_reward = 0.0;   // paid on every move, including into the goal
  double goal_reward = 0.0;   // added when a move enters the goal
  double cliff_reward = 0.0;  // replaces step_reward when a move enters a cliff

  Index rows() const { return static_cast<Index>(layout.size()); }
  Index cols() const { return layout.empty() ? 0 : static_cast<Index>(layout.front().size()); }
  char cell(Index state) const;

  // Rewards depending on the landing cell are marginalised into r(s, a).
  TabularMdp compile(double gamma) const;
};

// 4x4 slippery lake; actions LEFT, DOWN, RIGHT, UP; the chosen move and each
// perpendicular move happen with probability 1/3; reward 1 on reaching G.
EnvSpec frozenlake4x4_spec();

// 4x12 cliff walk; actions UP, RIGHT, DOWN, LEFT; deterministic; -1 per step,
// -100 and back to start on entering the cliff.
EnvSpec cliffwalking_spec();

TabularMdp build_frozenlake(double gamma = 0.9);
TabularMdp build_cliffwalking(double gamma = 0.9);

// Transition rows from a flat Dirichlet, rewards uniform in [-1, 1], uniform
// rho0. Identical output for identical arguments.
TabularMdp random_mdp(Index n_states, Index n_actions, double gamma, std::uint64_t seed);

// "frozenlake4x4", "cliffwalking" or "random:<n_s>x<n_a>:<seed>".
TabularMdp make_env(std::string_view name, double gamma);

// Flat indices (s, a) whose state is terminal.
std::vector<bool> terminal_pairs(const TabularMdp& mdp);

}  // namespace eigenpath

#endif  // EIGENPATH_ENVS_HPP_
