#include "lpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpo {

std::vector<double> SoftmaxPolicy::probs(int s) const {
  std::vector<double> out(n_actions, 0.0);
  const std::size_t base = static_cast<std::size_t>(s) * n_actions;
  if (state_known[s]) {
    // uniform base times exp(critic_sum) reduces to a plain softmax;
    // max subtraction keeps exponents bounded for any critic magnitude
    double m = critic_sum[base];
    for (int a = 1; a < n_actions; ++a) m = std::max(m, critic_sum[base + a]);
    double z = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      out[a] = std::exp(critic_sum[base + a] - m);
      z += out[a];
    }
    for (int a = 0; a < n_actions; ++a) out[a] /= z;
    return out;
  }
  int support = 0;
  for (int a = 0; a < n_actions; ++a) support += base_support[base + a] ? 1 : 0;
  if (support == 0) {
    for (int a = 0; a < n_actions; ++a) out[a] = 1.0 / n_actions;
    return out;
  }
  for (int a = 0; a < n_actions; ++a)
    if (base_support[base + a]) out[a] = 1.0 / support;
  return out;
}

SoftmaxPolicy make_base_policy(int n_states, int n_actions,
                               const std::vector<std::uint8_t>& state_known,
                               const std::vector<std::uint8_t>& pair_known) {
  SoftmaxPolicy p;
  p.n_states = n_states;
  p.n_actions = n_actions;
  p.critic_sum.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  p.state_known.assign(n_states, 0);
  p.base_support.assign(static_cast<std::size_t>(n_states) * n_actions, 1);
  if (!state_known.empty()) {
    if (state_known.size() != static_cast<std::size_t>(n_states) ||
        pair_known.size() != static_cast<std::size_t>(n_states) * n_actions)
      throw std::invalid_argument("known-set bitmap size mismatch");
    p.state_known = state_known;
    for (int s = 0; s < n_states; ++s) {
      if (state_known[s]) continue;
      int unknown = 0;
      for (int a = 0; a < n_actions; ++a) {
        const std::size_t i = static_cast<std::size_t>(s) * n_actions + a;
        p.base_support[i] = pair_known[i] ? 0 : 1;
        unknown += p.base_support[i];
      }
      if (unknown == 0) {
        // an unknown state whose actions are all known pairs cannot arise
        // from the state-level predicate; fall back to uniform and flag it
        p.support_fallback = true;
        for (int a = 0; a < n_actions; ++a) p.base_support[static_cast<std::size_t>(s) * n_actions + a] = 1;
      }
    }
  }
  return p;
}

SoftmaxPolicy npg_step(const SoftmaxPolicy& policy, const std::function<double(int, int)>& q_hat,
                       double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  SoftmaxPolicy next = policy;
  for (int s = 0; s < policy.n_states; ++s) {
    if (!policy.state_known[s]) continue;
    for (int a = 0; a < policy.n_actions; ++a)
      next.critic_sum[static_cast<std::size_t>(s) * policy.n_actions + a] += eta * q_hat(s, a);
  }
  return next;
}

int sample_action(const Policy& policy, int s, Rng& rng) {
  const std::vector<double> p = policy.probs(s);
  return rng.discrete(p.data(), static_cast<int>(p.size()));
}

int MixturePolicy::num_actions() const {
  if (components.empty()) throw std::logic_error("empty mixture");
  return components.front()->num_actions();
}

std::vector<double> MixturePolicy::probs(int s) const {
  if (components.empty()) throw std::logic_error("empty mixture");
  std::vector<double> out(num_actions(), 0.0);
  for (const auto& c : components) {
    const std::vector<double> p = c->probs(s);
    for (std::size_t a = 0; a < p.size(); ++a) out[a] += p[a];
  }
  for (double& v : out) v /= static_cast<double>(components.size());
  return out;
}

const Policy& mixture_sample_component(const Policy& policy, Rng& rng) {
  const Policy* cur = &policy;
  while (cur->is_mixture()) {
    const auto& mix = static_cast<const MixturePolicy&>(*cur);
    if (mix.components.empty()) throw std::logic_error("empty mixture");
    const std::uint64_t j = rng.next_u64() % mix.components.size();
    cur = mix.components[j].get();
  }
  return *cur;
}

void for_each_leaf(const Policy& policy, const std::function<void(const Policy&, double)>& fn) {
  struct Walker {
    static void walk(const Policy& p, double w, const std::function<void(const Policy&, double)>& f) {
      if (!p.is_mixture()) {
        f(p, w);
        return;
      }
      const auto& mix = static_cast<const MixturePolicy&>(p);
      const double cw = w / static_cast<double>(mix.components.size());
      for (const auto& c : mix.components) walk(*c, cw, f);
    }
  };
  Walker::walk(policy, 1.0, fn);
}

}  // namespace lpo
