#pragma once

#include <vector>

#include "lpo/mdp.hpp"
#include "lpo/policy.hpp"

namespace lpo {

// Q is laid out [s*A + a] over the (possibly augmented) action space. For an
// augmented MDP the escape-action column is filled with its formula value
// 3 + gamma*V(s) at every state for uniformity; V maxes or averages over the
// available actions only.
struct DpResult {
  std::vector<double> q;
  std::vector<double> v;
  int n_actions = 0;
};

// Bellman-optimality fixed point, iterated until the sup-norm residual of the
// returned tables is at most tol. Fixed-point iteration rather than a linear
// solve so behavior is uniform in gamma.
DpResult value_iteration(const Mdp& mdp, double tol = 1e-10);
DpResult value_iteration(const AugmentedMdp& mdp, double tol = 1e-10);

// Exact policy evaluation through the linear Bellman system. Mixture policies
// are evaluated as the component-weighted average of leaf results, matching
// per-trajectory component draws. Throws "action unavailable" if the policy
// puts mass on an action the MDP does not offer at that state.
DpResult policy_evaluation_exact(const Mdp& mdp, const Policy& policy, double tol = 1e-10);
DpResult policy_evaluation_exact(const AugmentedMdp& mdp, const Policy& policy, double tol = 1e-10);

// Discounted state-action occupancy d^pi_nu, (1-gamma)-normalized, over the
// MDP's pair space. nu is a distribution over pairs of the same layout.
// Mixtures average leaf occupancies.
std::vector<double> occupancy_exact(const Mdp& mdp, const Policy& policy,
                                    const std::vector<double>& nu);
std::vector<double> occupancy_exact(const AugmentedMdp& mdp, const Policy& policy,
                                    const std::vector<double>& nu);

// The default restart distribution: point mass on the initial state, uniform
// over the base actions.
std::vector<double> nu_default(const Mdp& mdp);
std::vector<double> nu_default(const AugmentedMdp& mdp);

}  // namespace lpo
