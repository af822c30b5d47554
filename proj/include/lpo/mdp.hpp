#pragma once

#include <cstdint>
#include <vector>

#include "lpo/rng.hpp"

namespace lpo {

// Finite discounted MDP with dense tables. Desk scale means at most a few
// hundred state-action pairs, so everything lives in row-major vectors and is
// validated eagerly at construction time.
struct Mdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  int initial_state = 0;
  std::vector<double> transition;  // [(s*n_actions + a)*n_states + s2]
  std::vector<double> reward;      // [s*n_actions + a], each in [0,1]

  // Every sampled transition passes through step(), giving the run one place
  // to meter sample complexity. Mutable so exploration code can hold const
  // references to the environment.
  mutable std::uint64_t transitions_used = 0;

  int n_pairs() const { return n_states * n_actions; }
  int pair_index(int s, int a) const { return s * n_actions + a; }
  double r(int s, int a) const { return reward[pair_index(s, a)]; }
  const double* row(int s, int a) const {
    return transition.data() + static_cast<std::size_t>(pair_index(s, a)) * n_states;
  }

  // throws std::invalid_argument on malformed tables
  void validate() const;

  int step(int s, int a, Rng& rng) const {
    ++transitions_used;
    return rng.discrete(row(s, a), n_states);
  }
};

// Reward of the absorbing escape action and its fixed semantics: available
// only at states flagged unknown, self-loop with probability 1.
inline constexpr double kDaggerReward = 3.0;

// Bonus-added MDP, optionally extended with the absorbing action at unknown
// states. The extra action has index base->n_actions. Holds a pointer to the
// base MDP so sampled steps hit the shared transition meter; the base must
// outlive the augmentation.
struct AugmentedMdp {
  const Mdp* base = nullptr;
  std::vector<double> extra_reward;        // per base pair, nonnegative bonus
  std::vector<std::uint8_t> dagger_state;  // empty means no absorbing extension

  bool has_dagger() const { return !dagger_state.empty(); }
  int n_states() const { return base->n_states; }
  int n_actions() const { return base->n_actions + (has_dagger() ? 1 : 0); }
  int n_pairs() const { return n_states() * n_actions(); }
  double gamma() const { return base->gamma; }
  int initial_state() const { return base->initial_state; }
  int pair_index(int s, int a) const { return s * n_actions() + a; }

  bool is_dagger(int a) const { return has_dagger() && a == base->n_actions; }
  bool available(int s, int a) const {
    if (is_dagger(a)) return dagger_state[s] != 0;
    return a >= 0 && a < base->n_actions;
  }
  double reward(int s, int a) const {
    if (is_dagger(a)) return kDaggerReward;
    return base->r(s, a) + extra_reward[base->pair_index(s, a)];
  }
  double base_reward(int s, int a) const { return is_dagger(a) ? kDaggerReward : base->r(s, a); }
  double bonus(int s, int a) const { return is_dagger(a) ? 0.0 : extra_reward[base->pair_index(s, a)]; }

  void validate() const;

  int step(int s, int a, Rng& rng) const {
    if (is_dagger(a)) {
      ++base->transitions_used;
      return s;
    }
    return base->step(s, a, rng);
  }
};

// Truncation horizon for geometric stopping: tail mass below 1e-6.
int default_horizon_cap(double gamma);

}  // namespace lpo
