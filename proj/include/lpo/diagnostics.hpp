#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpo/driver.hpp"

namespace lpo {

struct EluderQuery {
  const FunctionClassHandle* cls = nullptr;
  std::vector<std::pair<int, int>> candidate_points;
  double epsilon = 0.0;
};

// Longest sequence drawn from the candidate points in which every element is
// eps'-independent of its predecessors, maximized over eps' on the doubling
// grid {epsilon * 2^j <= 2W}. Exhaustive over orderings via a subset DP;
// independence of a point from a prefix is a constrained-sup query answered
// by width_bruteforce.
int eluder_dimension_bruteforce(const EluderQuery& query, double grid_step = 1e-3);

struct LemmaReport {
  std::string lemma_id;
  int instances_checked = 0;
  double max_violation = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};

// Deterministic argmax policy from the value-iteration Q table, lowest index
// winning ties.
std::vector<int> greedy_actions(const Mdp& mdp);

// One-sided critic error at known pairs of every stored inner iteration:
// 0 <= Q_bonus^{pi_k} - Q_hat_k <= 2 b_width, tolerance 1e-8. Requires
// exact-eval artifacts. critic_shift_bw adds shift * b_width(s,a) to the
// critic before comparing; +3 is the must-fail control.
LemmaReport check_optimism(const RunArtifacts& artifacts, const Mdp& mdp,
                           double critic_shift_bw = 0.0, double tolerance = 1e-8);

// Inner-loop regret against a deterministic comparator: for every stored
// switch, the sum over k of the comparator advantage under the comparator's
// occupancy on that switch's auxiliary MDP, restricted to known states, is
// at most 8 W sqrt(ln|A| K). Holds when the run used the lemma stepsize.
// corrupt_critics replaces each critic by +4W at the comparator action and
// -4W elsewhere (must-fail control).
LemmaReport check_npg_regret(const RunArtifacts& artifacts, const Mdp& mdp,
                             const std::vector<int>& comparator, double W,
                             bool corrupt_critics = false, double tolerance = 1e-8);

struct BonusSums {
  double width_sum = 0.0;      // sum over n of E_{d^n}[width_n]
  double indicator_sum = 0.0;  // sum over n of E_{d^n}[b_indicator_n]
  int iterations = 0;
};

// Exact per-iteration occupancies dotted with the iteration's width and
// indicator tables. The scaling acceptance compares these sums across run
// sizes; the absolute check below compares them against slack * sqrt(N d^2
// eps) bounds.
BonusSums bonus_concentration_sums(const RunArtifacts& artifacts, const Mdp& mdp);

LemmaReport check_bonus_concentration(const RunArtifacts& artifacts, const Mdp& mdp,
                                      double epsilon_width, double beta, double gamma,
                                      double d_eluder, double slack = 10.0);

// Structure lemmas on freshly generated random small instances (random MDP,
// random dataset, random comparator): occupancy dominance at known states,
// partial optimism of the auxiliary value, and nonpositive advantage of the
// absorbing action at unknown states.
LemmaReport check_distribution_dominance(int n_instances, std::uint64_t seed,
                                         double tolerance = 1e-10);
LemmaReport check_partial_optimism(int n_instances, std::uint64_t seed,
                                   double tolerance = 1e-8);
LemmaReport check_negative_advantage(int n_instances, std::uint64_t seed,
                                     double tolerance = 1e-8);

// Same driver, bonus formula swapped.
LpoResult run_baseline(BonusVariant variant, const LpoConfig& config, const Mdp& mdp,
                       const FunctionClassHandle& cls, RunArtifacts* artifacts = nullptr);

void write_lemma_report_json(const std::string& path, const std::vector<LemmaReport>& reports);

}  // namespace lpo
