#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "lpo/bonus.hpp"
#include "lpo/function_class.hpp"
#include "lpo/mdp.hpp"

namespace lpo {

// Raised for malformed or inconsistent configuration; carries the offending
// key so the CLI can name it (exit code 2).
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string k, const std::string& message)
      : std::runtime_error(message), key(std::move(k)) {}
};

// Raised when a run violates one of the asserted algorithm invariants; the
// CLI names the invariant and exits with code 3.
struct InvariantViolation : std::runtime_error {
  std::string name;
  InvariantViolation(std::string n, const std::string& message)
      : std::runtime_error(message), name(std::move(n)) {}
};

enum class EvalMode { monte_carlo, exact_eval };
enum class EnvKind { chain, grid, random_mdp, file };

struct LpoConfig {
  // environment
  EnvKind env = EnvKind::chain;
  double gamma = 0.9;
  int chain_length = 10;
  double chain_slip = 0.0;
  bool chain_sparse = true;
  int grid_width = 4;
  int grid_height = 4;
  double grid_slip = 0.1;
  int rand_states = 8;
  int rand_actions = 2;
  int rand_branching = 3;
  std::uint64_t rand_seed = 0;
  std::string mdp_file;

  // function class
  ClassKind class_kind = ClassKind::tabular;
  double W = 10.0;

  // algorithm
  int N = 500;
  int K = 16;
  int M = 50;
  double eta = 0.5;
  int kappa = 1;
  double beta = 0.3;
  double epsilon_width = -1.0;  // <= 0 means auto: c_epsilon * ln(max(N,2))
  double delta = 0.05;
  double delta1 = -1.0;  // <= 0 means auto: delta
  double C_mult = 1.0;
  double C_budget = 1.0;
  double c_epsilon = 1.0;
  EvalMode mode = EvalMode::monte_carlo;
  BonusVariant variant = BonusVariant::lpo;
  std::uint64_t seed = 1;
  bool theory_mode = false;
  bool first_step_bonus_include = true;
  bool clip_is_ratio = false;
  int horizon_cap = -1;  // <= 0 means auto from gamma

  // filled by resolve()
  double eta_used = 0.0;
  int kappa_used = 1;
  double epsilon_used = 0.0;
  double delta1_used = 0.0;
  int horizon_cap_used = 1;
};

// Parse "key = value" lines; '#' starts a comment. Unknown keys and
// malformed values raise ConfigError naming the key.
LpoConfig parse_config_file(const std::string& path);
LpoConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

// Instantiate the environment the config describes. For file environments
// the file's discount takes over the config's gamma field.
Mdp build_env(LpoConfig& config);

// The function class over the environment's state-action space. A linear
// class needs feature vectors, which only the file environment carries.
FunctionClassHandle build_class(const LpoConfig& config, const Mdp& mdp);

// Validate ranges, fill the auto defaults, and in theory mode derive eta,
// kappa, and epsilon from their closed forms (which includes rejecting W
// below the 2*G_max return-cap requirement).
void resolve(LpoConfig& config, const Mdp& mdp, const FunctionClassHandle& cls);

std::string config_echo_json(const LpoConfig& config);

}  // namespace lpo
