#include "lpo/generators.hpp"

#include <algorithm>
#include <stdexcept>

#include "lpo/rng.hpp"

namespace lpo {
namespace {

Mdp blank(int n_states, int n_actions, double gamma) {
  Mdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.initial_state = 0;
  m.reward.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
  return m;
}

double* row_of(Mdp& m, int s, int a) {
  return m.transition.data() + static_cast<std::size_t>(m.pair_index(s, a)) * m.n_states;
}

}  // namespace

Mdp make_chain(int length, double slip_prob, bool sparse_goal_reward, double gamma) {
  if (length < 2) throw std::invalid_argument("chain length must be at least 2");
  if (!(slip_prob >= 0.0 && slip_prob < 1.0)) throw std::invalid_argument("slip_prob out of range");
  Mdp m = blank(length, 2, gamma);
  for (int s = 0; s < length; ++s) {
    const int left = std::max(s - 1, 0);
    const int right = std::min(s + 1, length - 1);
    row_of(m, s, 0)[left] += 1.0 - slip_prob;
    row_of(m, s, 0)[s] += slip_prob;
    row_of(m, s, 1)[right] += 1.0 - slip_prob;
    row_of(m, s, 1)[s] += slip_prob;
    if (!sparse_goal_reward) m.reward[m.pair_index(s, 1)] = static_cast<double>(s + 1) / length;
  }
  if (sparse_goal_reward) m.reward[m.pair_index(length - 1, 1)] = 1.0;
  m.validate();
  return m;
}

Mdp make_grid(int width, int height, double slip_prob, double gamma) {
  if (width < 1 || height < 1 || width * height < 2)
    throw std::invalid_argument("grid must have at least 2 cells");
  if (!(slip_prob >= 0.0 && slip_prob < 1.0)) throw std::invalid_argument("slip_prob out of range");
  const int S = width * height;
  Mdp m = blank(S, 4, gamma);
  const int goal = S - 1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int s = y * width + x;
      const int to[4] = {
          (y > 0 ? s - width : s),           // up
          (y + 1 < height ? s + width : s),  // down
          (x > 0 ? s - 1 : s),               // left
          (x + 1 < width ? s + 1 : s),       // right
      };
      for (int a = 0; a < 4; ++a) {
        row_of(m, s, a)[to[a]] += 1.0 - slip_prob;
        row_of(m, s, a)[s] += slip_prob;
        if (s == goal) m.reward[m.pair_index(s, a)] = 1.0;
      }
    }
  }
  m.validate();
  return m;
}

Mdp make_random_mdp(int n_states, int n_actions, std::uint64_t seed, int branching, double gamma) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty state or action space");
  if (branching < 1 || branching > n_states) throw std::invalid_argument("branching out of range");
  Mdp m = blank(n_states, n_actions, gamma);
  Rng rng(seed);
  std::vector<int> order(n_states);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      for (int i = 0; i < n_states; ++i) order[i] = i;
      // partial Fisher-Yates picks `branching` distinct successors
      for (int i = 0; i < branching; ++i) {
        const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n_states - i));
        std::swap(order[i], order[j]);
      }
      double total = 0.0;
      std::vector<double> w(branching);
      for (int i = 0; i < branching; ++i) {
        w[i] = 0.05 + rng.uniform01();  // bounded away from zero
        total += w[i];
      }
      double* row = row_of(m, s, a);
      double acc = 0.0;
      for (int i = 0; i < branching - 1; ++i) {
        row[order[i]] = w[i] / total;
        acc += row[order[i]];
      }
      row[order[branching - 1]] = 1.0 - acc;  // exact unit row sum
      m.reward[m.pair_index(s, a)] = rng.uniform01();
    }
  }
  m.validate();
  return m;
}

}  // namespace lpo
