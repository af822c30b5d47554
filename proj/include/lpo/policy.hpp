#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "lpo/rng.hpp"

namespace lpo {

// Anything the DP oracles and the samplers can follow. probs(s) returns the
// action distribution at s over the policy's own action space; an MDP with
// more actions (the absorbing extension) treats the missing tail as zero.
struct Policy {
  virtual ~Policy() = default;
  virtual int num_actions() const = 0;
  virtual std::vector<double> probs(int s) const = 0;
  virtual bool is_mixture() const { return false; }
};

// Plain probability-table policy. Tests and diagnostic comparators use it,
// including policies that put mass on the absorbing action of an augmented
// MDP (table width n_actions+1 there).
struct TablePolicy final : Policy {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> table;  // [s*n_actions + a]

  TablePolicy() = default;
  TablePolicy(int S, int A) : n_states(S), n_actions(A), table(static_cast<std::size_t>(S) * A, 0.0) {}

  double& at(int s, int a) { return table[static_cast<std::size_t>(s) * n_actions + a]; }
  int num_actions() const override { return n_actions; }
  std::vector<double> probs(int s) const override {
    auto it = table.begin() + static_cast<std::size_t>(s) * n_actions;
    return std::vector<double>(it, it + n_actions);
  }
};

// Exponential-weights policy over an eta-weighted critic sum, with the known
// set frozen at birth. At states outside the birth known set the distribution
// never moves off the base rule, uniform over the actions that were unknown
// pairs when the policy was born. Storing the critic sum instead of the
// product chain keeps probability queries O(A), which the importance-sampling
// ratios rely on.
struct SoftmaxPolicy final : Policy {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> critic_sum;          // [s*A]
  std::vector<std::uint8_t> state_known;   // [S], birth snapshot
  std::vector<std::uint8_t> base_support;  // [s*A]; all ones at known states
  // set when some unknown-flagged state had no unknown action and the base
  // rule fell back to all of A (unreachable through the normal pipeline)
  bool support_fallback = false;

  int num_actions() const override { return n_actions; }
  std::vector<double> probs(int s) const override;
};

// Base policy for an inner loop: uniform at known states, uniform over the
// unknown actions elsewhere. Passing empty bitmaps (no known information)
// yields the everywhere-uniform initial policy.
SoftmaxPolicy make_base_policy(int n_states, int n_actions,
                               const std::vector<std::uint8_t>& state_known,
                               const std::vector<std::uint8_t>& pair_known);

// One NPG step: critic_sum += eta * q_hat at known states only.
SoftmaxPolicy npg_step(const SoftmaxPolicy& policy, const std::function<double(int, int)>& q_hat,
                       double eta);

int sample_action(const Policy& policy, int s, Rng& rng);

// Uniform mixture. Sampling fixes a component for a whole trajectory; the
// probability query is the component average.
struct MixturePolicy final : Policy {
  std::vector<std::shared_ptr<const Policy>> components;

  int num_actions() const override;
  std::vector<double> probs(int s) const override;
  bool is_mixture() const override { return true; }
};

// Resolves nested mixtures to a leaf, uniformly at random per call.
const Policy& mixture_sample_component(const Policy& policy, Rng& rng);

// Enumerates leaves with their mixture weights (weights sum to 1).
void for_each_leaf(const Policy& policy, const std::function<void(const Policy&, double)>& fn);

}  // namespace lpo
