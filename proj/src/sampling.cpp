#include "lpo/sampling.hpp"

#include <stdexcept>

namespace lpo {
namespace {

int policy_action(const Policy& policy, int s, Rng& rng, int limit) {
  const int a = sample_action(policy, s, rng);
  if (a >= limit) throw std::invalid_argument("action unavailable");
  return a;
}

double gamma_of(const Mdp& m) { return m.gamma; }
double gamma_of(const AugmentedMdp& m) { return m.gamma(); }
double base_reward_of(const Mdp& m, int s, int a) { return m.r(s, a); }
double base_reward_of(const AugmentedMdp& m, int s, int a) { return m.base_reward(s, a); }
double bonus_of(const Mdp&, int, int) { return 0.0; }
double bonus_of(const AugmentedMdp& m, int s, int a) { return m.bonus(s, a); }
int action_count_of(const Mdp& m) { return m.n_actions; }
int action_count_of(const AugmentedMdp& m) { return m.n_actions(); }

template <class M>
Trajectory rollout_impl(const M& mdp, std::pair<int, int> start, const Policy& policy, Rng& rng,
                        int horizon_cap) {
  if (horizon_cap < 1) throw std::invalid_argument("horizon_cap must be at least 1");
  const Policy& leaf = mixture_sample_component(policy, rng);

  Trajectory out;
  const int h = rng.geometric(gamma_of(mdp), horizon_cap);
  out.terminated_by = h == horizon_cap ? Trajectory::End::cap : Trajectory::End::geometric;

  int s = start.first;
  int a = start.second;
  out.steps.push_back({s, a, base_reward_of(mdp, s, a), bonus_of(mdp, s, a)});
  for (int t = 1; t < h; ++t) {
    s = mdp.step(s, a, rng);
    a = policy_action(leaf, s, rng, action_count_of(mdp));
    out.steps.push_back({s, a, base_reward_of(mdp, s, a), bonus_of(mdp, s, a)});
    ++out.env_steps;
  }
  return out;
}

}  // namespace

OccupancyDraw d_sampler(const Mdp& mdp, const Policy& policy, const std::vector<double>& nu,
                        Rng& rng, int horizon_cap) {
  if (horizon_cap < 1) throw std::invalid_argument("horizon_cap must be at least 1");
  if (nu.size() != static_cast<std::size_t>(mdp.n_pairs()))
    throw std::invalid_argument("nu size mismatch");
  const Policy& leaf = mixture_sample_component(policy, rng);

  OccupancyDraw out;
  const int tau = rng.geometric(mdp.gamma, horizon_cap);
  out.capped = tau == horizon_cap;
  const int z = rng.discrete(nu.data(), mdp.n_pairs());
  out.s = z / mdp.n_actions;
  out.a = z % mdp.n_actions;
  for (int t = 1; t < tau; ++t) {
    out.s = mdp.step(out.s, out.a, rng);
    out.a = policy_action(leaf, out.s, rng, mdp.n_actions);
    ++out.env_steps;
  }
  return out;
}

Trajectory rollout_geometric(const Mdp& mdp, std::pair<int, int> start, const Policy& policy,
                             Rng& rng, int horizon_cap) {
  return rollout_impl(mdp, start, policy, rng, horizon_cap);
}

Trajectory rollout_geometric(const AugmentedMdp& mdp, std::pair<int, int> start,
                             const Policy& policy, Rng& rng, int horizon_cap) {
  return rollout_impl(mdp, start, policy, rng, horizon_cap);
}

}  // namespace lpo
