#include "lpo/bonus.hpp"

#include <fstream>
#include <stdexcept>

namespace lpo {

double BonusOracle::bonus_width_part(int s, int a) const {
  if (variant != BonusVariant::lpo) return 0.0;
  if (!known(s, a)) return 0.0;
  return width_at(s, a) / beta;
}

double BonusOracle::bonus_indicator_part(int s, int a) const {
  if (variant == BonusVariant::no_bonus) return 0.0;
  if (known(s, a)) return 0.0;
  return kDaggerReward / (1.0 - gamma);
}

double BonusOracle::known_pair_fraction() const {
  if (pair_known.empty()) return 0.0;
  double acc = 0.0;
  for (std::uint8_t k : pair_known) acc += k;
  return acc / static_cast<double>(pair_known.size());
}

BonusOracle rebuild(const SensitivityDataset& dataset, const FunctionClassHandle& cls,
                    double beta, double epsilon_width, double gamma, BonusVariant variant) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (!(epsilon_width > 0.0)) throw std::invalid_argument("epsilon_width must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (cls.n_states != dataset.n_states || cls.n_actions != dataset.n_actions)
    throw std::invalid_argument("dataset and class domains disagree");

  BonusOracle o;
  o.dataset_version = dataset.version;
  o.beta = beta;
  o.epsilon_width = epsilon_width;
  o.gamma = gamma;
  o.W = cls.W;
  o.variant = variant;
  o.n_states = cls.n_states;
  o.n_actions = cls.n_actions;
  o.width_table.resize(cls.n_pairs());
  o.pair_known.assign(cls.n_pairs(), 0);
  o.state_known.assign(cls.n_states, 0);

  for (int s = 0; s < cls.n_states; ++s) {
    bool all_known = true;
    for (int a = 0; a < cls.n_actions; ++a) {
      const double w = width(cls, dataset, epsilon_width, s, a);
      o.width_table[o.pair_index(s, a)] = w;
      const bool k = w < beta;  // width exactly at beta counts as unknown
      o.pair_known[o.pair_index(s, a)] = k;
      all_known = all_known && k;
    }
    o.state_known[s] = all_known;
  }
  return o;
}

AugmentedMdp build_bonus_mdp(const Mdp& mdp, const BonusOracle& oracle) {
  if (mdp.n_states != oracle.n_states || mdp.n_actions != oracle.n_actions)
    throw std::invalid_argument("oracle and MDP domains disagree");
  AugmentedMdp aug;
  aug.base = &mdp;
  aug.extra_reward.resize(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      aug.extra_reward[mdp.pair_index(s, a)] = oracle.bonus(s, a);
  aug.validate();
  return aug;
}

AugmentedMdp build_auxiliary_mdp(const Mdp& mdp, const BonusOracle& oracle) {
  AugmentedMdp aug = build_bonus_mdp(mdp, oracle);
  bool any_unknown = false;
  std::vector<std::uint8_t> flags(mdp.n_states, 0);
  for (int s = 0; s < mdp.n_states; ++s) {
    flags[s] = !oracle.known_state(s);
    any_unknown = any_unknown || flags[s];
  }
  // with every state known the auxiliary MDP coincides with the bonus MDP
  if (any_unknown) aug.dagger_state = std::move(flags);
  aug.validate();
  return aug;
}

void dump_bonus_csv(const std::string& path, int n, const BonusOracle& oracle, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (!append) out << "n,s,a,width,bonus,known\n";
  out.precision(17);
  for (int s = 0; s < oracle.n_states; ++s) {
    for (int a = 0; a < oracle.n_actions; ++a) {
      out << n << ',' << s << ',' << a << ',' << oracle.width_at(s, a) << ','
          << oracle.bonus(s, a) << ',' << (oracle.known(s, a) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace lpo
