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

#include "eigenpath/envs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "eigenpath/errors.hpp"

namespace eigenpath {

char EnvSpec::cell(Index state) const {
  return layout[static_cast<std::size_t>(state / cols())][static_cast<std::size_t>(state % cols())];
}

TabularMdp EnvSpec::compile(double gamma) const {
  if (layout.empty() || actions.empty() || slip.empty()) {
    throw InvariantError(name + ": layout, actions and slip model must be non-empty");
  }
  for (const auto& row : layout) {
    if (static_cast<Index>(row.size()) != cols()) {
      throw InvariantError(name + ": layout rows differ in width");
    }
  }
  const Index n_states = rows() * cols();
  const Index n_actions = static_cast<Index>(actions.size());
  Index start = -1;
  for (Index s = 0; s < n_states; ++s) {
    const char c = cell(s);
    if (c == 'S') {
      if (start >= 0) throw InvariantError(name + ": more than one start cell");
      start = s;
    } else if (c != 'F' && c != 'H' && c != 'G' && c != 'C') {
      throw InvariantError(name + ": unknown cell type '" + std::string(1, c) + "'");
    }
  }
  if (start < 0) throw InvariantError(name + ": no start cell");

  Matrix transition = Matrix::Zero(n_states * n_actions, n_states);
  Vector reward = Vector::Zero(n_states * n_actions);
  for (Index s = 0; s < n_states; ++s) {
    const Index row = s / cols();
    const Index col = s % cols();
    for (Index a = 0; a < n_actions; ++a) {
      const Index pair = flat_index(s, a, n_actions);
      if (cell(s) == 'H' || cell(s) == 'G') {
        transition(pair, s) = 1.0;
        continue;
      }
      for (const SlipOutcome& outcome : slip) {
        const Index executed = ((a + outcome.action_offset) % n_actions + n_actions) % n_actions;
        const GridMove& move = actions[static_cast<std::size_t>(executed)];
        const Index r = std::clamp<Index>(row + move.d_row, 0, rows() - 1);
        const Index c = std::clamp<Index>(col + move.d_col, 0, cols() - 1);
        const Index landed = r * cols() + c;
        if (cell(landed) == 'C') {
          transition(pair, start) += outcome.probability;
          reward(pair) += outcome.probability * cliff_reward;
          continue;
        }
        transition(pair, landed) += outcome.probability;
        const double gain = step_reward + (cell(landed) == 'G' ? goal_reward : 0.0);
        reward(pair) += outcome.probability * gain;
      }
    }
  }
  Vector rho0 = Vector::Zero(n_states);
  rho0(start) = 1.0;
  return TabularMdp(n_states, n_actions, std::move(transition), std::move(reward), gamma,
                    std::move(rho0));
}

EnvSpec frozenlake4x4_spec() {
  EnvSpec spec;
  spec.name = "frozenlake4x4";
  spec.layout = {"SFFF", "FHFH", "FFFH", "HFFG"};
  spec.actions = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  const double third = 1.0 / 3.0;
  spec.slip = {{-1, third}, {0, third}, {1, third}};
  spec.goal_reward = 1.0;
  return spec;
}

EnvSpec cliffwalking_spec() {
  EnvSpec spec;
  spec.name = "cliffwalking";
  spec.layout = {"FFFFFFFFFFFF", "FFFFFFFFFFFF", "FFFFFFFFFFFF", "SCCCCCCCCCCG"};
  spec.actions = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};
  spec.slip = {{0, 1.0}};
  spec.step_reward = -1.0;
  spec.cliff_reward = -100.0;
  return spec;
}

TabularMdp build_frozenlake(double gamma) { return frozenlake4x4_spec().compile(gamma); }

TabularMdp build_cliffwalking(double gamma) { return cliffwalking_spec().compile(gamma); }

TabularMdp random_mdp(Index n_states, Index n_actions, double gamma, std::uint64_t seed) {
  if (n_states < 1 || n_actions < 1) {
    throw InvariantError("random MDP needs at least one state and one action");
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit_reward(-1.0, 1.0);
  Matrix transition(n_states * n_actions, n_states);
  Vector reward(n_states * n_actions);
  for (Index pair = 0; pair < n_states * n_actions; ++pair) {
    for (Index next = 0; next < n_states; ++next) transition(pair, next) = unit_exp(rng);
    transition.row(pair) /= transition.row(pair).sum();
    reward(pair) = unit_reward(rng);
  }
  Vector rho0 = Vector::Constant(n_states, 1.0 / static_cast<double>(n_states));
  return TabularMdp(n_states, n_actions, std::move(transition), std::move(reward), gamma,
                    std::move(rho0));
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view whole) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvariantError("malformed environment name '" + std::string(whole) +
                         "', expected random:<n_s>x<n_a>:<seed>");
  }
  return value;
}

}  // namespace

TabularMdp make_env(std::string_view name, double gamma) {
  if (name == "frozenlake4x4") return build_frozenlake(gamma);
  if (name == "cliffwalking") return build_cliffwalking(gamma);
  constexpr std::string_view kRandom = "random:";
  if (name.substr(0, kRandom.size()) == kRandom) {
    const std::string_view rest = name.substr(kRandom.size());
    const auto x = rest.find('x');
    const auto colon = rest.find(':');
    if (x == std::string_view::npos || colon == std::string_view::npos || x > colon) {
      throw InvariantError("malformed environment name '" + std::string(name) +
                           "', expected random:<n_s>x<n_a>:<seed>");
    }
    const auto n_states = parse_number<Index>(rest.substr(0, x), name);
    const auto n_actions = parse_number<Index>(rest.substr(x + 1, colon - x - 1), name);
    const auto seed = parse_number<std::uint64_t>(rest.substr(colon + 1), name);
    return random_mdp(n_states, n_actions, gamma, seed);
  }
  throw InvariantError("unknown environment '" + std::string(name) + "'");
}

std::vector<bool> terminal_pairs(const TabularMdp& mdp) {
  std::vector<bool> out(static_cast<std::size_t>(mdp.size()), false);
  for (Index s = 0; s < mdp.n_states(); ++s) {
    if (!mdp.is_terminal(s)) continue;
    for (Index a = 0; a < mdp.n_actions(); ++a) {
      out[static_cast<std::size_t>(flat_index(s, a, mdp.n_actions()))] = true;
    }
  }
  return out;
}

}  // namespace eigenpath
