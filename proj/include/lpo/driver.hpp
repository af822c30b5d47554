#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpo/admission.hpp"
#include "lpo/bonus.hpp"
#include "lpo/config.hpp"
#include "lpo/evaluation.hpp"
#include "lpo/mdp.hpp"
#include "lpo/policy.hpp"

namespace lpo {

struct RunMetricsRow {
  int n = 0;
  bool switched = false;
  std::uint64_t dataset_distinct = 0;
  std::uint64_t dataset_weight = 0;
  double known_pair_fraction = 0.0;
  double value_exact_of_mixture = 0.0;
  double suboptimality = 0.0;
  std::uint64_t transitions_used = 0;
};

// Everything one policy-update episode produced, kept for the checkers.
struct SwitchArtifact {
  int n = 0;
  std::shared_ptr<const BonusOracle> oracle;
  std::vector<std::shared_ptr<const SoftmaxPolicy>> inner_policies;
  std::vector<Critic> critics;
  double eta = 0.0;
};

struct RunArtifacts {
  EvalMode mode = EvalMode::monte_carlo;
  std::vector<SwitchArtifact> switches;
  std::vector<std::shared_ptr<const Policy>> per_iteration_policy;
  std::vector<std::shared_ptr<const BonusOracle>> per_iteration_oracle;
  std::vector<AdmissionDecision> admissions;  // one per outer iteration
};

struct RunSummary {
  double final_value = 0.0;  // exact value of the last iteration's policy
  double value_uniform_over_iterations = 0.0;
  double v_star = 0.0;
  int switches = 0;
  std::uint64_t total_transitions = 0;
  double cumulative_raw_sensitivity = 0.0;
  double wall_clock_sec = 0.0;
  double eta_used = 0.0;
  double epsilon_used = 0.0;
  int kappa_used = 1;
};

struct LpoState {
  SensitivityDataset dataset;
  std::shared_ptr<const BonusOracle> oracle;
  std::vector<std::shared_ptr<const Policy>> cover;  // grows by one per iteration
  std::shared_ptr<const Policy> current;
  std::uint64_t last_seen_version = 0;
  int n = 0;  // completed outer iterations
  int switch_count = 0;
  int inner_invocations = 0;
  bool last_iteration_admitted = false;
  double cumulative_raw_sensitivity = 0.0;
  std::uint64_t sample_ledger = 0;
  std::vector<RunMetricsRow> metrics;
  Rng rng{1};
  std::unordered_map<const Policy*, double> leaf_value_cache;
};

struct RunContext {
  const LpoConfig* config;
  const Mdp* mdp;
  const FunctionClassHandle* cls;
  std::vector<double> nu;
  double v_star_at_start = 0.0;
  std::uint64_t transitions_at_start = 0;  // meter reading when the run began
  RunArtifacts* artifacts = nullptr;       // optional
};

struct LpoResult {
  std::vector<RunMetricsRow> metrics;
  RunSummary summary;
  LpoState state;
};

// Lemma-derived stepsize sqrt(ln|A| / (16 W^2 K)).
double derive_eta(int K, int n_actions, double W);

// The composed theory-mode width budget: 100 * (1.5 C1 N eps_stat +
// 20 N W eps1 + 0.5 C2 (ln(N/delta) + ln-cover of the difference class)).
double derive_epsilon_theory(int N, double W, const FunctionClassHandle& cls, double delta,
                             double C1, double C2, int M, double eps1, double eps2,
                             double delta3);

LpoState init_state(const RunContext& ctx);

// One outer iteration: rebuild-and-update on a dataset switch (always at
// n=1), otherwise carry the policy; extend the cover; draw one occupancy
// sample and run one admission attempt; append the metrics row.
void outer_step(LpoState& state, const RunContext& ctx);

// Full policy-update episode: K inner steps of evaluate-then-exponentiate,
// returning the uniform mixture over the K iterates.
std::shared_ptr<const MixturePolicy> inner_policy_update(const Policy& cover_mixture,
                                                         std::shared_ptr<const BonusOracle> oracle,
                                                         LpoState& state, const RunContext& ctx,
                                                         SwitchArtifact* artifact);

LpoResult run_lpo(const LpoConfig& config, const Mdp& mdp, const FunctionClassHandle& cls,
                  RunArtifacts* artifacts = nullptr);

void write_metrics_csv(const std::string& path, const std::vector<RunMetricsRow>& rows);
std::vector<RunMetricsRow> read_metrics_csv(const std::string& path);
void write_summary_json(const std::string& path, const LpoConfig& config,
                        const RunSummary& summary);

}  // namespace lpo
