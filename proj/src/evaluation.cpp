#include "lpo/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lpo/dp.hpp"

namespace lpo {

EvalDataset behaviour_sample(const Policy& cover, std::shared_ptr<const Policy> behaviour,
                             const AugmentedMdp& bonus_mdp, const BonusOracle& oracle, int M,
                             const std::vector<double>& nu, Rng& rng, int horizon_cap,
                             int created_at_inner_step) {
  if (M < 1) throw std::invalid_argument("behaviour_sample requires M >= 1");
  if (bonus_mdp.has_dagger())
    throw std::invalid_argument("rollouts run on the bonus MDP, not the auxiliary one");

  EvalDataset ds;
  ds.rollouts.reserve(M);
  ds.behaviour = std::move(behaviour);
  ds.oracle_version = oracle.dataset_version;
  ds.created_at_inner_step = created_at_inner_step;

  const Mdp& base = *bonus_mdp.base;
  const std::uint64_t salt = rng.next_u64();
  (void)salt;  // advances the parent so later collections use fresh streams
  for (int i = 0; i < M; ++i) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(i));
    const OccupancyDraw first = d_sampler(base, cover, nu, stream, horizon_cap);
    ds.env_steps += first.env_steps;
    Trajectory t =
        rollout_geometric(bonus_mdp, {first.s, first.a}, *ds.behaviour, stream, horizon_cap);
    ds.env_steps += t.env_steps;
    ds.rollouts.push_back(std::move(t));
  }
  return ds;
}

ISEstimate is_target(const Trajectory& rollout, const Policy& evaluate, const Policy& behaviour,
                     const BonusOracle& oracle, double gamma, const EvalOptions& options) {
  if (rollout.steps.empty()) throw std::invalid_argument("empty rollout");

  ISEstimate e;
  e.s_first = rollout.steps.front().s;
  e.a_first = rollout.steps.front().a;

  // ratio product from the second step onward; the first pair is fixed by
  // the occupancy draw, not chosen by either policy
  for (std::size_t i = 1; i < rollout.steps.size(); ++i) {
    const TrajectoryStep& st = rollout.steps[i];
    const double pb = behaviour.probs(st.s)[st.a];
    if (!(pb > 0.0)) throw std::runtime_error("unsupported behaviour");
    e.lambda *= evaluate.probs(st.s)[st.a] / pb;
  }

  const TrajectoryStep& last = rollout.steps.back();
  const double b_last = oracle.bonus(last.s, last.a);
  const double b_first = oracle.bonus(e.s_first, e.a_first);
  const bool length_one = rollout.steps.size() == 1;

  if (options.first_step_bonus_include) {
    e.G = (last.reward + b_last) / (1.0 - gamma);
  } else {
    e.G = (last.reward + (length_one ? 0.0 : b_last)) / (1.0 - gamma);
  }

  if (options.clip_is_ratio) {
    const double cap = 2.0 * return_cap(gamma) / (std::abs(e.G) + 1e-12);
    if (e.lambda > cap) {
      e.lambda = cap;
      e.clipped = true;
    }
  }

  e.target = options.first_step_bonus_include ? e.lambda * e.G - b_first : e.lambda * e.G;
  return e;
}

Critic evaluate_policy(const EvalDataset& dataset, const Policy& eval_policy,
                       const FunctionClassHandle& cls, std::shared_ptr<const BonusOracle> oracle,
                       double gamma, const EvalOptions& options, double lambda_reg) {
  if (dataset.rollouts.empty()) throw std::invalid_argument("no regression data");
  std::vector<RegressionPoint> points;
  points.reserve(dataset.rollouts.size());
  for (const Trajectory& t : dataset.rollouts) {
    const ISEstimate e = is_target(t, eval_policy, *dataset.behaviour, *oracle, gamma, options);
    points.push_back({e.s_first, e.a_first, e.target});
  }
  return Critic{fit_least_squares(cls, points, lambda_reg), std::move(oracle)};
}

Critic evaluate_policy_exact(const Mdp& mdp, const Policy& eval_policy,
                             const FunctionClassHandle& cls,
                             std::shared_ptr<const BonusOracle> oracle, double lambda_reg) {
  const AugmentedMdp bonus_mdp = build_bonus_mdp(mdp, *oracle);
  const DpResult dp = policy_evaluation_exact(bonus_mdp, eval_policy);
  std::vector<RegressionPoint> points;
  points.reserve(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      points.push_back({s, a, dp.q[s * mdp.n_actions + a] - oracle->bonus(s, a)});
  return Critic{fit_least_squares(cls, points, lambda_reg), std::move(oracle)};
}

int kappa_window(double gamma, double delta1, double eta, double B, double W) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw std::invalid_argument("delta1 must lie in (0,1)");
  if (!(eta > 0.0) || !(B > 0.0) || !(W > 0.0))
    throw std::invalid_argument("kappa_window arguments must be positive");
  const double raw =
      (1.0 - gamma) * std::log(2.0) / (2.0 * std::log(1.0 / delta1) * eta * (B + W));
  if (raw >= 1e9) return 1000000000;
  return std::max(1, static_cast<int>(std::floor(raw)));
}

void dump_eval_dataset(const std::string& path, const EvalDataset& dataset,
                       const Policy& eval_policy, const BonusOracle& oracle, double gamma,
                       const EvalOptions& options) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  for (const Trajectory& t : dataset.rollouts) {
    const ISEstimate e = is_target(t, eval_policy, *dataset.behaviour, oracle, gamma, options);
    out << "{\"pairs\":[";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      if (i) out << ',';
      out << '[' << t.steps[i].s << ',' << t.steps[i].a << ']';
    }
    out << "],\"lambda\":" << e.lambda << ",\"G\":" << e.G << ",\"target\":" << e.target
        << "}\n";
  }
}

}  // namespace lpo
