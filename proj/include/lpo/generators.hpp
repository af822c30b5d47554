#pragma once

#include <cstdint>

#include "lpo/mdp.hpp"

namespace lpo {

// Chain of `length` states, two actions (0 moves left, 1 moves right), slips
// stay in place. Sparse mode pays 1 only for the right action at the far end;
// dense mode pays (s+1)/length for the right action everywhere, a gradient a
// bonus-free learner can follow.
Mdp make_chain(int length, double slip_prob, bool sparse_goal_reward, double gamma);

// width x height grid, four actions (up, down, left, right) clamped at walls,
// slips stay in place. Reward 1 for every action at the far corner; start at
// the origin.
Mdp make_grid(int width, int height, double slip_prob, double gamma);

// Random dense-support MDP: each pair transitions to `branching` distinct
// states with random probabilities, rewards uniform in [0,1].
Mdp make_random_mdp(int n_states, int n_actions, std::uint64_t seed, int branching, double gamma);

}  // namespace lpo
