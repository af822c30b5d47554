#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lpo/bonus.hpp"
#include "lpo/function_class.hpp"
#include "lpo/mdp.hpp"
#include "lpo/policy.hpp"
#include "lpo/sampling.hpp"

namespace lpo {

// Rollouts collected under one behaviour policy, reusable for nearby target
// policies for up to kappa inner steps after created_at_inner_step.
struct EvalDataset {
  std::vector<Trajectory> rollouts;
  std::shared_ptr<const Policy> behaviour;
  std::uint64_t oracle_version = 0;
  int created_at_inner_step = 0;
  std::uint64_t env_steps = 0;
};

struct ISEstimate {
  double lambda = 1.0;
  double G = 0.0;
  double target = 0.0;
  bool clipped = false;
  int s_first = 0;
  int a_first = 0;
};

struct EvalOptions {
  // true: the geometric-stopping return always includes the bonus at the
  // final pair and the first-pair bonus is subtracted from the target.
  // false: the bonus is dropped from length-1 returns and nothing is
  // subtracted. Both estimate Q_bonus - bonus; they differ in variance.
  bool first_step_bonus_include = true;
  bool clip_is_ratio = false;
};

// Per-trajectory bonus cap B and return cap G_max.
inline double bonus_cap(double gamma) { return kDaggerReward / (1.0 - gamma); }
inline double return_cap(double gamma) { return (2.0 + bonus_cap(gamma)) / (1.0 - gamma); }

// One collection pass: M rollouts whose first pair comes from the cover's
// occupancy sampler and whose continuation follows the behaviour policy on
// the bonus MDP. Each rollout gets its own derived RNG stream.
EvalDataset behaviour_sample(const Policy& cover, std::shared_ptr<const Policy> behaviour,
                             const AugmentedMdp& bonus_mdp, const BonusOracle& oracle, int M,
                             const std::vector<double>& nu, Rng& rng, int horizon_cap,
                             int created_at_inner_step);

// Importance-sampling regression target for one rollout: the action ratio
// product runs from the second step onward, the return is read at the last
// pair. Unbiased for Q_bonus - bonus at the first pair.
ISEstimate is_target(const Trajectory& rollout, const Policy& evaluate, const Policy& behaviour,
                     const BonusOracle& oracle, double gamma, const EvalOptions& options = {});

// Fitted critic plus the pessimistic bonus assembly: half the bonus on
// known pairs, the full bonus on unknown ones.
struct Critic {
  FunctionHandle f;
  std::shared_ptr<const BonusOracle> oracle;
  double at(int s, int a) const {
    const double b = oracle->bonus(s, a);
    return evaluate(f, s, a) + (oracle->known(s, a) ? 0.5 : 1.0) * b;
  }
};

Critic evaluate_policy(const EvalDataset& dataset, const Policy& eval_policy,
                       const FunctionClassHandle& cls, std::shared_ptr<const BonusOracle> oracle,
                       double gamma, const EvalOptions& options = {}, double lambda_reg = 1e-8);

// Test-oracle mode: the regression target is the exact Q_bonus - bonus from
// dynamic programming, one point per pair, then the same assembly.
Critic evaluate_policy_exact(const Mdp& mdp, const Policy& eval_policy,
                             const FunctionClassHandle& cls,
                             std::shared_ptr<const BonusOracle> oracle, double lambda_reg = 1e-8);

// Data-reuse window: (1-gamma) ln2 / (2 ln(1/delta1) eta (B+W)), floored and
// clamped below by 1. The driver additionally clamps it to K.
int kappa_window(double gamma, double delta1, double eta, double B, double W);

// JSON lines, one per rollout: visited pairs, lambda, G, target.
void dump_eval_dataset(const std::string& path, const EvalDataset& dataset,
                       const Policy& eval_policy, const BonusOracle& oracle, double gamma,
                       const EvalOptions& options = {});

}  // namespace lpo
