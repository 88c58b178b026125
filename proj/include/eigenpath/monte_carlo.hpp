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

// First-visit Monte-Carlo estimation of Q^pi with exploring starts.
//
// Each episode starts from a uniformly drawn non-terminal (s, a) pair and
// contributes the discounted return following the first visit of every pair
// it touches within `horizon` steps. The episode is simulated for another
// minimal horizon beyond that, so no recorded return is cut short by more
// than gamma^h <= 1e-10 of its tail.
// Episode k draws from its own generator seeded by (seed, k), so estimates do
// not depend on how episodes are scheduled across threads.

#ifndef EIGENPATH_MONTE_CARLO_HPP_
#define EIGENPATH_MONTE_CARLO_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "eigenpath/dynamics.hpp"
#include "eigenpath/mdp.hpp"

namespace eigenpath {

inline constexpr double kMcTruncationTol = 1e-10;

// Smallest h with gamma^h <= tolerance (1 when gamma == 0).
std::size_t minimal_horizon(double gamma, double tolerance = kMcTruncationTol);

struct McEstimate {
  // Average first-visit return; entries never visited hold 0 and are
  // reported as undefined by value().
  QTable q_hat;
  std::vector<std::uint64_t> counts;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;

  bool defined(Index pair) const { return counts[static_cast<std::size_t>(pair)] > 0; }
  std::optional<double> value(Index state, Index action) const;
  // Sup-norm distance to reference over defined entries only.
  double max_abs_error(const QTable& reference) const;
};

// Throws InvariantError if episodes == 0 or gamma^horizon > 1e-10 (the
// message names the minimal admissible horizon).
McEstimate monte_carlo_q(const TabularMdp& mdp, const Policy& policy,
                         std::size_t episodes, std::size_t horizon, std::uint64_t seed);

// Error of the running estimate after every `checkpoint` episodes. Entries
// not yet visited take their value from q0. times[k] is the episode count.
PathTrace monte_carlo_path(const TabularMdp& mdp, const Policy& policy,
                           const QTable& q_star, const QTable& q0, std::size_t episodes,
                           std::size_t checkpoint, std::size_t horizon, std::uint64_t seed);

}  // namespace eigenpath

#endif  // EIGENPATH_MONTE_CARLO_HPP_
