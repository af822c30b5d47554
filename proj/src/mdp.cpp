#include "lpo/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpo {

void Mdp::validate() const {
  if (n_states < 1) throw std::invalid_argument("n_states must be positive");
  if (n_actions < 1) throw std::invalid_argument("n_actions must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie strictly inside (0,1)");
  if (initial_state < 0 || initial_state >= n_states) throw std::invalid_argument("initial_state out of range");
  if (reward.size() != static_cast<std::size_t>(n_pairs()))
    throw std::invalid_argument("reward table size mismatch");
  if (transition.size() != static_cast<std::size_t>(n_pairs()) * n_states)
    throw std::invalid_argument("transition table size mismatch");

  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const double rv = r(s, a);
      if (!(rv >= 0.0 && rv <= 1.0))
        throw std::invalid_argument("reward out of [0,1] at pair (" + std::to_string(s) + "," +
                                    std::to_string(a) + ")");
      const double* p = row(s, a);
      double sum = 0.0;
      for (int s2 = 0; s2 < n_states; ++s2) {
        if (p[s2] < 0.0)
          throw std::invalid_argument("negative transition probability at pair (" + std::to_string(s) +
                                      "," + std::to_string(a) + ")");
        sum += p[s2];
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("transition row does not sum to 1 at pair (" + std::to_string(s) +
                                    "," + std::to_string(a) + ")");
    }
  }
}

void AugmentedMdp::validate() const {
  if (base == nullptr) throw std::invalid_argument("augmented MDP without a base");
  base->validate();
  if (extra_reward.size() != static_cast<std::size_t>(base->n_pairs()))
    throw std::invalid_argument("extra_reward size mismatch");
  for (double b : extra_reward)
    if (!(b >= 0.0)) throw std::invalid_argument("bonus must be nonnegative");
  if (has_dagger() && dagger_state.size() != static_cast<std::size_t>(base->n_states))
    throw std::invalid_argument("dagger flag size mismatch");
}

int default_horizon_cap(double gamma) {
  return static_cast<int>(std::ceil(std::log(1e6) / (1.0 - gamma)));
}

}  // namespace lpo
