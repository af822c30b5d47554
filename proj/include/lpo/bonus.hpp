#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpo/dataset.hpp"
#include "lpo/function_class.hpp"
#include "lpo/mdp.hpp"

namespace lpo {

enum class BonusVariant { lpo, indicator_only, no_bonus };

// Width table, known set, and the two-part bonus, all frozen against one
// dataset version. A pair is known when its width is strictly below beta;
// the bonus is 3/(1-gamma) on unknown pairs and (2/beta)*width on known
// ones, i.e. b = b_indicator + 2 * b_width.
struct BonusOracle {
  std::uint64_t dataset_version = 0;
  double beta = 0.3;
  double epsilon_width = 1.0;
  double gamma = 0.9;
  double W = 1.0;
  BonusVariant variant = BonusVariant::lpo;
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> width_table;      // per pair
  std::vector<std::uint8_t> pair_known; // width < beta, strict
  std::vector<std::uint8_t> state_known;

  int pair_index(int s, int a) const { return s * n_actions + a; }
  double width_at(int s, int a) const { return width_table[pair_index(s, a)]; }
  bool known(int s, int a) const { return pair_known[pair_index(s, a)] != 0; }
  bool known_state(int s) const { return state_known[s] != 0; }

  // b_width: (width/beta) on known pairs, 0 on unknown; zero for variants
  // whose bonus has no width part.
  double bonus_width_part(int s, int a) const;
  // b_indicator: 3/(1-gamma) on unknown pairs, 0 on known; zero when the
  // variant carries no bonus at all.
  double bonus_indicator_part(int s, int a) const;
  double bonus(int s, int a) const {
    return bonus_indicator_part(s, a) + 2.0 * bonus_width_part(s, a);
  }
  double known_pair_fraction() const;
};

BonusOracle rebuild(const SensitivityDataset& dataset, const FunctionClassHandle& cls,
                    double beta, double epsilon_width, double gamma,
                    BonusVariant variant = BonusVariant::lpo);

// The true MDP with reward r + b; no extra action.
AugmentedMdp build_bonus_mdp(const Mdp& mdp, const BonusOracle& oracle);

// The bonus MDP plus the absorbing escape action at states that are not
// fully known; used by the diagnostics checkers.
AugmentedMdp build_auxiliary_mdp(const Mdp& mdp, const BonusOracle& oracle);

// CSV rows "n,s,a,width,bonus,known", appended per switch.
void dump_bonus_csv(const std::string& path, int n, const BonusOracle& oracle, bool append);

}  // namespace lpo
