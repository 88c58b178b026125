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

#include "doctest.h"
#include "eigenpath/envs.hpp"
#include "eigenpath/errors.hpp"
#include "eigenpath/mdp.hpp"

using namespace eigenpath;

namespace {

constexpr Index kLeft = 0, kDown = 1, kRight = 2, kUp = 3;
constexpr Index kCliffUp = 0, kCliffRight = 1, kCliffDown = 2, kCliffLeft = 3;

}  // namespace

TEST_CASE("FrozenLake shape, start and terminals") {
  const TabularMdp mdp = build_frozenlake(0.9);
  CHECK(mdp.n_states() == 16);
  CHECK(mdp.n_actions() == 4);
  CHECK(mdp.rho0()(0) == 1.0);
  CHECK(mdp.rho0().sum() == 1.0);
  for (Index s : {5, 7, 11, 12, 15}) CHECK(mdp.is_terminal(s));
  for (Index s : {0, 1, 6, 10, 14}) CHECK_FALSE(mdp.is_terminal(s));
  const auto terminal = terminal_pairs(mdp);
  CHECK(std::count(terminal.begin(), terminal.end(), true) == 20);
}

TEST_CASE("FrozenLake rows enumerated by hand") {
  const TabularMdp mdp = build_frozenlake(0.9);
  const double third = 1.0 / 3.0;
  // Corner, pushing left: up and left bump the wall, down reaches 4.
  CHECK(mdp.transition(0, kLeft, 0) == doctest::Approx(2 * third));
  CHECK(mdp.transition(0, kLeft, 4) == doctest::Approx(third));
  CHECK(mdp.reward(0, kLeft) == 0.0);
  // Next to the goal, pushing right: down bumps, right reaches G, up to 10.
  CHECK(mdp.transition(14, kRight, 14) == doctest::Approx(third));
  CHECK(mdp.transition(14, kRight, 15) == doctest::Approx(third));
  CHECK(mdp.transition(14, kRight, 10) == doctest::Approx(third));
  CHECK(mdp.reward(14, kRight) == doctest::Approx(third));
  // Between two holes, pushing down: left and right fall in.
  CHECK(mdp.transition(6, kDown, 5) == doctest::Approx(third));
  CHECK(mdp.transition(6, kDown, 10) == doctest::Approx(third));
  CHECK(mdp.transition(6, kDown, 7) == doctest::Approx(third));
  CHECK(mdp.reward(6, kDown) == 0.0);
  // Holes and goal self-loop.
  CHECK(mdp.transition(5, kUp, 5) == 1.0);
  CHECK(mdp.transition(15, kLeft, 15) == 1.0);
  CHECK(mdp.reward(15, kLeft) == 0.0);
}

TEST_CASE("FrozenLake Q* under the uniform policy") {
  // Reference values from an independent grid-world build and value iteration.
  const QTable q = solve_q_star(build_frozenlake(0.9), Policy::uniform(16, 4));
  CHECK(q.values()(flat_index(0, kLeft, 4)) == doctest::Approx(0.004702943935569743).epsilon(1e-10));
  CHECK(q.values()(flat_index(14, kRight, 4)) ==
        doctest::Approx(0.48287196557029277).epsilon(1e-10));
  CHECK(q.values().mean() == doctest::Approx(0.04756679220962104).epsilon(1e-10));
  CHECK(q.values().maxCoeff() == doctest::Approx(0.48989529605729454).epsilon(1e-10));
  CHECK(q.values().minCoeff() == 0.0);
}

TEST_CASE("CliffWalking moves, cliff and goal") {
  const TabularMdp mdp = build_cliffwalking(0.9);
  CHECK(mdp.n_states() == 48);
  CHECK(mdp.n_actions() == 4);
  CHECK(mdp.rho0()(36) == 1.0);
  CHECK(mdp.is_terminal(47));
  CHECK_FALSE(mdp.is_terminal(37));
  // Stepping off the start into the cliff pays -100 and returns to the start.
  CHECK(mdp.transition(36, kCliffRight, 36) == 1.0);
  CHECK(mdp.reward(36, kCliffRight) == -100.0);
  CHECK(mdp.transition(36, kCliffUp, 24) == 1.0);
  CHECK(mdp.reward(36, kCliffUp) == -1.0);
  CHECK(mdp.transition(36, kCliffLeft, 36) == 1.0);
  CHECK(mdp.transition(24, kCliffDown, 36) == 1.0);
  CHECK(mdp.transition(26, kCliffDown, 36) == 1.0);
  CHECK(mdp.reward(26, kCliffDown) == -100.0);
  // The last step into the goal still costs -1.
  CHECK(mdp.transition(35, kCliffDown, 47) == 1.0);
  CHECK(mdp.reward(35, kCliffDown) == -1.0);
}

TEST_CASE("CliffWalking Q* under the uniform policy") {
  const QTable q = solve_q_star(build_cliffwalking(0.9), Policy::uniform(48, 4));
  CHECK(q.values()(flat_index(0, kCliffUp, 4)) ==
        doctest::Approx(-48.938609462702125).epsilon(1e-10));
  CHECK(q.values()(flat_index(36, kCliffRight, 4)) ==
        doctest::Approx(-235.80649201934844).epsilon(1e-10));
  CHECK(q.values().mean() == doctest::Approx(-109.95932062697666).epsilon(1e-10));
}

TEST_CASE("random MDPs are valid and reproducible") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Index s = 1 + static_cast<Index>(seed % 10), a = 1 + static_cast<Index>(seed % 5);
    const TabularMdp mdp = random_mdp(s, a, 0.9, seed);
    CHECK((mdp.transition_matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(mdp.reward_vector().cwiseAbs().maxCoeff() <= 1.0);
  }
  const TabularMdp a = random_mdp(4, 3, 0.9, 17), b = random_mdp(4, 3, 0.9, 17);
  CHECK(a.transition_matrix() == b.transition_matrix());
  CHECK(a.reward_vector() == b.reward_vector());
  CHECK(a.transition_matrix() != random_mdp(4, 3, 0.9, 18).transition_matrix());
  CHECK_THROWS_AS(random_mdp(0, 3, 0.9, 1), InvariantError);
}

TEST_CASE("environment names") {
  CHECK(make_env("frozenlake4x4", 0.5).gamma() == 0.5);
  CHECK(make_env("cliffwalking", 0.9).n_states() == 48);
  const TabularMdp r = make_env("random:3x2:9", 0.8);
  CHECK(r.n_states() == 3);
  CHECK(r.n_actions() == 2);
  CHECK(r.transition_matrix() == random_mdp(3, 2, 0.8, 9).transition_matrix());
  CHECK_THROWS_AS(make_env("random:3:9", 0.9), InvariantError);
  CHECK_THROWS_AS(make_env("random:ax2:9", 0.9), InvariantError);
  CHECK_THROWS_AS(make_env("taxi", 0.9), InvariantError);
}

TEST_CASE("custom layouts are validated") {
  EnvSpec spec = frozenlake4x4_spec();
  spec.layout[0][0] = 'F';
  CHECK_THROWS_AS(spec.compile(0.9), InvariantError);
  spec = frozenlake4x4_spec();
  spec.layout[1][1] = 'X';
  CHECK_THROWS_AS(spec.compile(0.9), InvariantError);
  spec = frozenlake4x4_spec();
  spec.layout[2] = "FF";
  CHECK_THROWS_AS(spec.compile(0.9), InvariantError);
}
