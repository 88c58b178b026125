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

#include "eigenpath/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "eigenpath/envs.hpp"
#include "eigenpath/errors.hpp"
#include "eigenpath/parallel.hpp"

namespace eigenpath {
namespace {

constexpr std::size_t kEpisodesPerChunk = 1024;

// Inverse-CDF sampler over a fixed discrete distribution.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      total += weights[i];
      cumulative_.push_back(total);
      if (weights[i] > 0.0) last_positive_ = i;
    }
  }

  template <typename Rng>
  Index operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto i = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<Index>(std::min(i, last_positive_));
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

// Sampling tables shared read-only by all episodes.
class EpisodeSampler {
 public:
  EpisodeSampler(const TabularMdp& mdp, const Policy& policy, std::size_t horizon)
      : mdp_(mdp), horizon_(horizon), length_(horizon + minimal_horizon(mdp.gamma())) {
    for (Index pair = 0; pair < mdp.size(); ++pair) {
      std::vector<double> weights(static_cast<std::size_t>(mdp.n_states()));
      for (Index s = 0; s < mdp.n_states(); ++s) {
        weights[static_cast<std::size_t>(s)] = mdp.transition_matrix()(pair, s);
      }
      next_state_.emplace_back(weights);
    }
    for (Index s = 0; s < mdp.n_states(); ++s) {
      std::vector<double> weights(static_cast<std::size_t>(mdp.n_actions()));
      for (Index a = 0; a < mdp.n_actions(); ++a) {
        weights[static_cast<std::size_t>(a)] = policy.probability(s, a);
      }
      action_.emplace_back(weights);
    }
    const auto terminal = terminal_pairs(mdp);
    for (Index pair = 0; pair < mdp.size(); ++pair) {
      if (!terminal[static_cast<std::size_t>(pair)]) starts_.push_back(pair);
    }
    if (starts_.empty()) {
      for (Index pair = 0; pair < mdp.size(); ++pair) starts_.push_back(pair);
    }
  }

  // Fills first-visit returns of one episode into `returns` (indexed by pair;
  // NaN where the pair was not visited). First visits are taken from the first
  // `horizon` steps; the episode runs a further minimal horizon so each
  // recorded return is truncated at most at the 1e-10 level. Works on
  // caller-owned scratch space.
  void run(std::uint64_t seed, std::uint64_t episode, std::vector<Index>& pairs,
           std::vector<double>& rewards, std::vector<double>& returns) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(episode),
                      static_cast<std::uint32_t>(episode >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> start(0, starts_.size() - 1);

    const Index n_actions = mdp_.n_actions();
    pairs.resize(length_);
    rewards.resize(length_);
    Index pair = starts_[start(rng)];
    for (std::size_t t = 0; t < length_; ++t) {
      pairs[t] = pair;
      rewards[t] = mdp_.reward_vector()(pair);
      const Index s = next_state_[static_cast<std::size_t>(pair)](rng);
      const Index a = action_[static_cast<std::size_t>(s)](rng);
      pair = flat_index(s, a, n_actions);
    }
    returns.assign(static_cast<std::size_t>(mdp_.size()), std::nan(""));
    double g = 0.0;
    // Walking backwards, the last write per pair is its first visit.
    for (std::size_t t = length_; t-- > 0;) {
      g = rewards[t] + mdp_.gamma() * g;
      if (t < horizon_) returns[static_cast<std::size_t>(pairs[t])] = g;
    }
  }

  Index size() const { return mdp_.size(); }

 private:
  const TabularMdp& mdp_;
  std::size_t horizon_;
  std::size_t length_;
  std::vector<Categorical> next_state_;
  std::vector<Categorical> action_;
  std::vector<Index> starts_;
};

void check_horizon(double gamma, std::size_t horizon) {
  const std::size_t needed = minimal_horizon(gamma);
  if (horizon < needed) {
    throw InvariantError("horizon " + std::to_string(horizon) +
                         " leaves truncation bias above 1e-10; minimal admissible horizon is " +
                         std::to_string(needed));
  }
}

}  // namespace

std::size_t minimal_horizon(double gamma, double tolerance) {
  if (gamma <= 0.0) return 1;
  const double h = std::ceil(std::log(tolerance) / std::log(gamma));
  std::size_t out = static_cast<std::size_t>(std::max(1.0, h));
  // Guard the ceil against rounding on exact powers.
  while (std::pow(gamma, static_cast<double>(out)) > tolerance) ++out;
  return out;
}

std::optional<double> McEstimate::value(Index state, Index action) const {
  const Index pair = flat_index(state, action, q_hat.n_actions());
  if (!defined(pair)) return std::nullopt;
  return q_hat.values()(pair);
}

double McEstimate::max_abs_error(const QTable& reference) const {
  double worst = 0.0;
  for (Index pair = 0; pair < q_hat.size(); ++pair) {
    if (!defined(pair)) continue;
    worst = std::max(worst, std::abs(q_hat.values()(pair) - reference.values()(pair)));
  }
  return worst;
}

McEstimate monte_carlo_q(const TabularMdp& mdp, const Policy& policy, std::size_t episodes,
                         std::size_t horizon, std::uint64_t seed) {
  check_compatible(mdp, policy);
  if (episodes == 0) throw InvariantError("Monte-Carlo estimation needs at least one episode");
  check_horizon(mdp.gamma(), horizon);
  const EpisodeSampler sampler(mdp, policy, horizon);
  const std::size_t n = static_cast<std::size_t>(mdp.size());
  const std::size_t chunks = (episodes + kEpisodesPerChunk - 1) / kEpisodesPerChunk;
  std::vector<std::vector<double>> chunk_sums(chunks, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::uint64_t>> chunk_counts(chunks, std::vector<std::uint64_t>(n, 0));

  parallel_for(chunks, [&](std::size_t c) {
    std::vector<Index> pairs;
    std::vector<double> rewards, returns;
    const std::size_t first = c * kEpisodesPerChunk;
    const std::size_t last = std::min(episodes, first + kEpisodesPerChunk);
    for (std::size_t e = first; e < last; ++e) {
      sampler.run(seed, e, pairs, rewards, returns);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(returns[i])) continue;
        chunk_sums[c][i] += returns[i];
        ++chunk_counts[c][i];
      }
    }
  });

  std::vector<double> sums(n, 0.0);
  std::vector<std::uint64_t> counts(n, 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      sums[i] += chunk_sums[c][i];
      counts[i] += chunk_counts[c][i];
    }
  }
  Vector q = Vector::Zero(mdp.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > 0) q(static_cast<Index>(i)) = sums[i] / static_cast<double>(counts[i]);
  }
  return McEstimate{QTable(mdp.n_states(), mdp.n_actions(), std::move(q)), std::move(counts),
                    horizon, seed};
}

PathTrace monte_carlo_path(const TabularMdp& mdp, const Policy& policy, const QTable& q_star,
                           const QTable& q0, std::size_t episodes, std::size_t checkpoint,
                           std::size_t horizon, std::uint64_t seed) {
  check_compatible(mdp, policy);
  if (checkpoint == 0) throw InvariantError("checkpoint interval must be positive");
  check_horizon(mdp.gamma(), horizon);
  const EpisodeSampler sampler(mdp, policy, horizon);
  const std::size_t n = static_cast<std::size_t>(mdp.size());
  std::vector<double> sums(n, 0.0);
  std::vector<std::uint64_t> counts(n, 0);
  std::vector<Index> pairs;
  std::vector<double> rewards, returns;

  auto estimate = [&] {
    Vector q = q0.values();
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[i] > 0) q(static_cast<Index>(i)) = sums[i] / static_cast<double>(counts[i]);
    }
    return q;
  };

  PathTrace trace;
  trace.push(0.0, estimate() - q_star.values());
  for (std::size_t e = 0; e < episodes; ++e) {
    sampler.run(seed, e, pairs, rewards, returns);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(returns[i])) continue;
      sums[i] += returns[i];
      ++counts[i];
    }
    if ((e + 1) % checkpoint == 0 || e + 1 == episodes) {
      trace.push(static_cast<double>(e + 1), estimate() - q_star.values());
    }
  }
  return trace;
}

}  // namespace eigenpath
