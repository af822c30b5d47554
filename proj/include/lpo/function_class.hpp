#pragma once

#include <string>
#include <vector>

#include "lpo/dataset.hpp"
#include "lpo/rng.hpp"

namespace lpo {

enum class ClassKind { tabular, linear };

// The function class F: either one free value per state-action pair, or
// linear in a fixed feature map. Every representable f obeys |f| <= W
// pointwise; linear features are rescaled at construction so |phi|_2 <= 1,
// and the parameter ball |theta|_2 <= W then implies the sup-norm bound.
struct FunctionClassHandle {
  ClassKind kind = ClassKind::tabular;
  double W = 1.0;
  int n_states = 0;
  int n_actions = 0;
  int d_feat = 0;                 // linear only
  std::vector<double> features;   // [pair * d_feat + j], linear only

  int n_pairs() const { return n_states * n_actions; }
  int pair_index(int s, int a) const { return s * n_actions + a; }
  const double* phi(int s, int a) const {
    return features.data() + static_cast<std::size_t>(pair_index(s, a)) * d_feat;
  }

  static FunctionClassHandle make_tabular(int n_states, int n_actions, double W);
  static FunctionClassHandle make_linear(int n_states, int n_actions, double W, int d_feat,
                                         std::vector<double> features);
};

struct FunctionHandle {
  const FunctionClassHandle* cls = nullptr;
  // tabular: one value per pair; linear: the coefficient vector theta
  std::vector<double> values;
};

struct RegressionPoint {
  int s;
  int a;
  double target;
};

double evaluate(const FunctionHandle& f, int s, int a);

// Squared-loss fit within the class followed by the sup-norm projection:
// per-pair target mean for tabular (unobserved pairs default to 0), ridge
// least squares then a theta-norm projection for linear.
FunctionHandle fit_least_squares(const FunctionClassHandle& cls,
                                 const std::vector<RegressionPoint>& data,
                                 double lambda_reg = 1e-8);

// sup |f1(s,a) - f2(s,a)| over f1, f2 in F with the squared dataset norm of
// the difference at most epsilon. Closed forms; see width_bruteforce for the
// search oracle the closed forms are tested against.
double width(const FunctionClassHandle& cls, const SensitivityDataset& dataset, double epsilon,
             int s, int a);

// Online sensitivity score of a candidate pair relative to the dataset:
// sup over differences of value-at-z squared over (capped dataset norm + 1).
double sensitivity(const FunctionClassHandle& cls, const SensitivityDataset& dataset, int s,
                   int a, int N);

// Analytic upper bound on log N(F, radius); 0 once a single ball suffices.
double log_cover_size(const FunctionClassHandle& cls, double radius);

// Discretized exhaustive search for the width definition. Only for small
// classes (tabular <= 8 pairs, linear d_feat <= 3).
double width_bruteforce(const FunctionClassHandle& cls, const SensitivityDataset& dataset,
                        double epsilon, int s, int a, double grid_step);

// Grid search for the tabular sensitivity sup. Off-query mass only inflates
// the dataset norm, so the search runs over the query value alone.
double sensitivity_bruteforce(const FunctionClassHandle& cls, const SensitivityDataset& dataset,
                              int s, int a, int N, double grid_step);

// Sampled lower bound on the linear sensitivity sup: random feasible
// parameter differences. The closed form must dominate it.
double sensitivity_bruteforce_sampled(const FunctionClassHandle& cls,
                                      const SensitivityDataset& dataset, int s, int a, int N,
                                      int n_samples, Rng& rng);

}  // namespace lpo
