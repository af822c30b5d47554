#pragma once

#include <cstdint>
#include <vector>

namespace lpo {

struct DatasetConfig {
  double C_mult = 1.0;
  double delta = 0.05;
  int N_budget = 1;
  double W = 1.0;
};

// Weighted multiset of state-action pairs built by sensitivity sampling.
// Copies are stored as integer weights; the version counter moves exactly
// when the contents do, which is what the outer loop's switch check reads.
struct SensitivityDataset {
  int n_states = 0;
  int n_actions = 0;
  std::vector<std::uint64_t> counts;  // dense, indexed s * n_actions + a
  std::uint64_t version = 0;
  std::uint64_t total_admissions = 0;
  DatasetConfig config;

  SensitivityDataset() = default;
  SensitivityDataset(int states, int actions, DatasetConfig cfg)
      : n_states(states),
        n_actions(actions),
        counts(static_cast<std::size_t>(states) * actions, 0),
        config(cfg) {}

  int n_pairs() const { return n_states * n_actions; }

  std::uint64_t count(int s, int a) const {
    return counts[static_cast<std::size_t>(s) * n_actions + a];
  }

  std::uint64_t total_weight() const {
    std::uint64_t w = 0;
    for (std::uint64_t c : counts) w += c;
    return w;
  }

  int distinct() const {
    int d = 0;
    for (std::uint64_t c : counts) d += (c > 0);
    return d;
  }
};

}  // namespace lpo
