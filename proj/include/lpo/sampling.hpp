#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lpo/mdp.hpp"
#include "lpo/policy.hpp"

namespace lpo {

// One draw from the discounted occupancy of a policy: stop time tau with
// P(tau) = gamma^(tau-1)(1-gamma), a nu draw, then tau-1 policy steps.
// env_steps reports the transitions consumed (tau-1, before capping).
struct OccupancyDraw {
  int s = 0;
  int a = 0;
  std::uint64_t env_steps = 0;
  bool capped = false;
};

// Mixture policies are resolved to a leaf first and the leaf drives the whole
// walk, matching per-trajectory component semantics.
OccupancyDraw d_sampler(const Mdp& mdp, const Policy& policy, const std::vector<double>& nu,
                        Rng& rng, int horizon_cap);

struct TrajectoryStep {
  int s = 0;
  int a = 0;
  double reward = 0.0;  // base reward observed at the pair
  double bonus = 0.0;   // bonus component when rolling on a bonus-added MDP
};

struct Trajectory {
  enum class End { geometric, cap };
  std::vector<TrajectoryStep> steps;
  End terminated_by = End::geometric;
  std::uint64_t env_steps = 0;  // transitions consumed producing it
};

// Geometric-stopping rollout: length h with P(h) = gamma^(h-1)(1-gamma)
// truncated at horizon_cap, first pair fixed to start, later actions from the
// policy. The augmented overload records the reward and bonus components
// separately; dynamics always come from the base MDP.
Trajectory rollout_geometric(const Mdp& mdp, std::pair<int, int> start, const Policy& policy,
                             Rng& rng, int horizon_cap);
Trajectory rollout_geometric(const AugmentedMdp& mdp, std::pair<int, int> start,
                             const Policy& policy, Rng& rng, int horizon_cap);

}  // namespace lpo
