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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "eigenpath/envs.hpp"
#include "eigenpath/errors.hpp"
#include "eigenpath/mdp.hpp"
#include "eigenpath/mdp_io.hpp"
#include "test_support.hpp"

using namespace eigenpath;
using eigenpath::testing::make_mdp;
using eigenpath::testing::random_policy;
using eigenpath::testing::random_vector;

TEST_CASE("flat index is state-major") {
  CHECK(flat_index(0, 0, 4) == 0);
  CHECK(flat_index(2, 3, 4) == 11);
  CHECK(flat_index(5, 0, 1) == 5);
}

TEST_CASE("constructor rejects malformed models") {
  Matrix p(1, 1);
  p << 1.0;
  Vector r(1);
  r << 1.0;
  CHECK_NOTHROW(make_mdp(1, 1, p, r, 0.9));
  CHECK_THROWS_AS(make_mdp(1, 1, p, r, 1.0), InvariantError);
  CHECK_THROWS_AS(make_mdp(1, 1, p, r, -0.1), InvariantError);

  Matrix leaky(1, 1);
  leaky << 0.9;
  CHECK_THROWS_AS(make_mdp(1, 1, leaky, r, 0.9), InvariantError);

  Matrix negative(2, 2);
  negative << 1.5, -0.5, 0.0, 1.0;
  CHECK_THROWS_AS(make_mdp(2, 1, negative, Vector::Zero(2), 0.9), InvariantError);

  CHECK_THROWS_AS(make_mdp(2, 1, p, r, 0.9), DimensionError);
  CHECK_THROWS_AS(TabularMdp(1, 1, p, r, 0.9, Vector::Constant(1, 0.5)), InvariantError);

  Vector bad_r(1);
  bad_r << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_mdp(1, 1, p, bad_r, 0.9), InvariantError);
}

TEST_CASE("policy and Q table validation") {
  Matrix probs(1, 2);
  probs << 0.7, 0.2;
  CHECK_THROWS_AS(Policy{probs}, InvariantError);
  CHECK_THROWS_AS(QTable(2, 2, Vector::Zero(3)), DimensionError);
  Vector inf = Vector::Zero(2);
  inf(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(QTable(1, 2, inf), InvariantError);
  const Policy uniform = Policy::uniform(3, 4);
  CHECK(uniform.probs().isApproxToConstant(0.25));
}

TEST_CASE("single self-looping state has Q* = r / (1 - gamma)") {
  Matrix p(1, 1);
  p << 1.0;
  Vector r(1);
  r << 1.0;
  const TabularMdp mdp = make_mdp(1, 1, p, r, 0.9);
  const Policy pi = Policy::uniform(1, 1);
  CHECK(solve_q_star(mdp, pi).values()(0) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(value_iteration_oracle(mdp, pi, 1e-13).q.values()(0) ==
        doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("two-state chain into an absorbing state") {
  Matrix p(2, 2);
  p << 0.0, 1.0,
       0.0, 1.0;
  Vector r(2);
  r << 1.0, 0.0;
  const TabularMdp mdp = make_mdp(2, 1, p, r, 0.9);
  const QTable q = solve_q_star(mdp, Policy::uniform(2, 1));
  CHECK(q.values()(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(q.values()(1)) < 1e-15);
  CHECK(mdp.is_terminal(1));
  CHECK_FALSE(mdp.is_terminal(0));
}

TEST_CASE("gamma = 0 gives Q* = r") {
  const TabularMdp mdp = random_mdp(4, 3, 0.0, 11);
  const QTable q = solve_q_star(mdp, Policy::uniform(4, 3));
  CHECK((q.values() - mdp.reward_vector()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("induced transition is row-stochastic on fuzzed MDPs and policies") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Index s = 1 + static_cast<Index>(seed % 7), a = 1 + static_cast<Index>(seed % 4);
    const TabularMdp mdp = random_mdp(s, a, 0.9, seed);
    const InducedTransition p = build_induced_transition(mdp, random_policy(s, a, seed + 1000));
    CHECK(p.size() == s * a);
    CHECK((p.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(p.matrix().minCoeff() >= 0.0);
  }
}

TEST_CASE("induced transition entries are P(s'|s,a) pi(a'|s')") {
  const TabularMdp mdp = random_mdp(3, 2, 0.9, 5);
  const Policy pi = random_policy(3, 2, 6);
  const InducedTransition induced = build_induced_transition(mdp, pi);
  const Matrix& m = induced.matrix();
  for (Index s = 0; s < 3; ++s) {
    for (Index a = 0; a < 2; ++a) {
      for (Index s2 = 0; s2 < 3; ++s2) {
        for (Index a2 = 0; a2 < 2; ++a2) {
          CHECK(m(flat_index(s, a, 2), flat_index(s2, a2, 2)) ==
                doctest::Approx(mdp.transition(s, a, s2) * pi.probs()(s2, a2))
                    .epsilon(1e-15));
        }
      }
    }
  }
}

TEST_CASE("matrix backup agrees with direct summation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMdp mdp = random_mdp(5, 3, 0.95, seed);
    const Policy pi = random_policy(5, 3, seed + 7);
    const QTable q(5, 3, random_vector(15, seed + 13, 5.0));
    const Vector fast = bellman_backup(EvaluationModel(mdp, pi), q).values();
    const Vector slow = bellman_backup(mdp, pi, q).values();
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Bellman backup is a gamma-contraction in sup norm") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double gamma = 0.01 * static_cast<double>(seed % 99);
    const TabularMdp mdp = random_mdp(6, 2, gamma, seed);
    const EvaluationModel model(mdp, random_policy(6, 2, seed));
    const QTable a(6, 2, random_vector(12, 2 * seed, 3.0));
    const QTable b(6, 2, random_vector(12, 2 * seed + 1, 3.0));
    const double lhs =
        (bellman_backup(model, a).values() - bellman_backup(model, b).values()).cwiseAbs().maxCoeff();
    const double rhs = gamma * (a.values() - b.values()).cwiseAbs().maxCoeff();
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("Q* is the fixed point of the backup and matches value iteration") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TabularMdp mdp = random_mdp(1 + static_cast<Index>(seed % 10), 2, 0.9, seed);
    const Policy pi = random_policy(mdp.n_states(), 2, seed);
    const EvaluationModel model(mdp, pi);
    const QTable q = solve_q_star(model);
    CHECK((bellman_backup(model, q).values() - q.values()).cwiseAbs().maxCoeff() < 1e-12);
    const QTable vi = value_iteration_oracle(mdp, pi, 1e-13).q;
    CHECK((vi.values() - q.values()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("incompatible policy is rejected") {
  const TabularMdp mdp = random_mdp(3, 2, 0.9, 1);
  CHECK_THROWS_AS(check_compatible(mdp, Policy::uniform(3, 3)), DimensionError);
  CHECK_THROWS_AS(EvaluationModel(mdp, Policy::uniform(2, 2)), DimensionError);
}

TEST_CASE("JSON round trip is bit-identical") {
  const auto dir = std::filesystem::temp_directory_path() / "eigenpath_mdp_io";
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TabularMdp mdp = random_mdp(4, 3, 0.87, seed);
    save_mdp(mdp, dir / "m.json");
    const TabularMdp back = load_mdp(dir / "m.json");
    CHECK(back.gamma() == mdp.gamma());
    CHECK(back.transition_matrix() == mdp.transition_matrix());
    CHECK(back.reward_vector() == mdp.reward_vector());
    CHECK(back.rho0() == mdp.rho0());
    CHECK(mdp_to_json(back).dump() == mdp_to_json(mdp).dump());

    const Policy pi = random_policy(4, 3, seed);
    save_policy(pi, dir / "p.json");
    CHECK(load_policy(dir / "p.json").probs() == pi.probs());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed JSON documents are rejected") {
  nlohmann::json doc = mdp_to_json(random_mdp(2, 2, 0.9, 3));
  doc["n_states"] = 3;
  CHECK_THROWS(mdp_from_json(doc));
  CHECK_THROWS(load_mdp("/nonexistent/eigenpath.json"));
}
