#include "lpo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lpo/driver.hpp"
#include "lpo/evaluation.hpp"
#include "lpo/generators.hpp"
#include "lpo/mdp_io.hpp"

namespace lpo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "key '" + key + "': cannot parse '" + v + "' as a real number");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError(key, "key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "key '" + key + "': expected true or false, got '" + v + "'");
}

// "auto" keeps the sentinel that resolve() later replaces
double parse_auto_double(const std::string& key, const std::string& v) {
  if (v == "auto") return -1.0;
  return parse_double(key, v);
}

int parse_auto_int(const std::string& key, const std::string& v) {
  if (v == "auto") return -1;
  return parse_int(key, v);
}

void apply_key(LpoConfig& c, const std::string& key, const std::string& value) {
  if (key == "env") {
    if (value == "chain") c.env = EnvKind::chain;
    else if (value == "grid") c.env = EnvKind::grid;
    else if (value == "random_mdp") c.env = EnvKind::random_mdp;
    else if (value == "file") c.env = EnvKind::file;
    else throw ConfigError(key, "key 'env': unknown environment '" + value + "'");
  } else if (key == "gamma") c.gamma = parse_double(key, value);
  else if (key == "chain_length") c.chain_length = parse_int(key, value);
  else if (key == "chain_slip") c.chain_slip = parse_double(key, value);
  else if (key == "chain_sparse") c.chain_sparse = parse_bool(key, value);
  else if (key == "grid_width") c.grid_width = parse_int(key, value);
  else if (key == "grid_height") c.grid_height = parse_int(key, value);
  else if (key == "grid_slip") c.grid_slip = parse_double(key, value);
  else if (key == "rand_states") c.rand_states = parse_int(key, value);
  else if (key == "rand_actions") c.rand_actions = parse_int(key, value);
  else if (key == "rand_branching") c.rand_branching = parse_int(key, value);
  else if (key == "rand_seed") c.rand_seed = parse_u64(key, value);
  else if (key == "mdp_file") c.mdp_file = value;
  else if (key == "class") {
    if (value == "tabular") c.class_kind = ClassKind::tabular;
    else if (value == "linear") c.class_kind = ClassKind::linear;
    else throw ConfigError(key, "key 'class': unknown class kind '" + value + "'");
  } else if (key == "W") c.W = parse_double(key, value);
  else if (key == "N") c.N = parse_int(key, value);
  else if (key == "K") c.K = parse_int(key, value);
  else if (key == "M") c.M = parse_int(key, value);
  else if (key == "eta") c.eta = parse_double(key, value);
  else if (key == "kappa") c.kappa = parse_int(key, value);
  else if (key == "beta") c.beta = parse_double(key, value);
  else if (key == "epsilon_width") c.epsilon_width = parse_auto_double(key, value);
  else if (key == "delta") c.delta = parse_double(key, value);
  else if (key == "delta1") c.delta1 = parse_auto_double(key, value);
  else if (key == "C_mult") c.C_mult = parse_double(key, value);
  else if (key == "C_budget") c.C_budget = parse_double(key, value);
  else if (key == "c_epsilon") c.c_epsilon = parse_double(key, value);
  else if (key == "mode") {
    if (value == "mc") c.mode = EvalMode::monte_carlo;
    else if (value == "exact") c.mode = EvalMode::exact_eval;
    else throw ConfigError(key, "key 'mode': expected mc or exact, got '" + value + "'");
  } else if (key == "variant") {
    if (value == "lpo") c.variant = BonusVariant::lpo;
    else if (value == "indicator_only") c.variant = BonusVariant::indicator_only;
    else if (value == "no_bonus") c.variant = BonusVariant::no_bonus;
    else throw ConfigError(key, "key 'variant': unknown variant '" + value + "'");
  } else if (key == "seed") c.seed = parse_u64(key, value);
  else if (key == "theory_mode") c.theory_mode = parse_bool(key, value);
  else if (key == "first_step_bonus") {
    if (value == "include") c.first_step_bonus_include = true;
    else if (value == "exclude") c.first_step_bonus_include = false;
    else throw ConfigError(key, "key 'first_step_bonus': expected include or exclude");
  } else if (key == "clip_is_ratio") c.clip_is_ratio = parse_bool(key, value);
  else if (key == "horizon_cap") c.horizon_cap = parse_auto_int(key, value);
  else throw ConfigError(key, "unknown config key '" + key + "'");
}

}  // namespace

LpoConfig parse_config_text(const std::string& text, const std::string& origin) {
  LpoConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(key, origin + ":" + std::to_string(line_no) + ": empty key");
    apply_key(c, key, value);
  }
  return c;
}

LpoConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

Mdp build_env(LpoConfig& c) {
  switch (c.env) {
    case EnvKind::chain:
      return make_chain(c.chain_length, c.chain_slip, c.chain_sparse, c.gamma);
    case EnvKind::grid:
      return make_grid(c.grid_width, c.grid_height, c.grid_slip, c.gamma);
    case EnvKind::random_mdp:
      return make_random_mdp(c.rand_states, c.rand_actions, c.rand_seed, c.rand_branching,
                             c.gamma);
    case EnvKind::file: {
      if (c.mdp_file.empty()) throw ConfigError("mdp_file", "env=file requires mdp_file");
      Mdp m = load_mdp(c.mdp_file).mdp;
      c.gamma = m.gamma;  // the file's discount is part of the MDP definition
      return m;
    }
  }
  throw ConfigError("env", "unreachable environment kind");
}

FunctionClassHandle build_class(const LpoConfig& c, const Mdp& mdp) {
  if (c.class_kind == ClassKind::tabular)
    return FunctionClassHandle::make_tabular(mdp.n_states, mdp.n_actions, c.W);
  if (c.env != EnvKind::file)
    throw ConfigError("class", "the linear class needs feature vectors from an mdp file");
  const MdpFile f = load_mdp(c.mdp_file);
  if (f.d_feat == 0)
    throw ConfigError("class", "mdp file " + c.mdp_file + " carries no feature section");
  return FunctionClassHandle::make_linear(mdp.n_states, mdp.n_actions, c.W, f.d_feat, f.features);
}

void resolve(LpoConfig& c, const Mdp& mdp, const FunctionClassHandle& cls) {
  if (c.N < 1) throw ConfigError("N", "N must be at least 1");
  if (c.K < 1) throw ConfigError("K", "K must be at least 1");
  if (c.M < 1) throw ConfigError("M", "M must be at least 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma", "gamma must lie in (0,1)");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw ConfigError("beta", "beta must lie in (0,1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "delta must lie in (0,1)");
  if (!(c.W > 0.0)) throw ConfigError("W", "W must be positive");
  if (!(c.eta > 0.0)) throw ConfigError("eta", "eta must be positive");
  if (c.kappa < 1) throw ConfigError("kappa", "kappa must be at least 1");
  if (!(c.C_mult > 0.0)) throw ConfigError("C_mult", "C_mult must be positive");
  if (!(c.C_budget > 0.0)) throw ConfigError("C_budget", "C_budget must be positive");
  if (!(c.c_epsilon > 0.0)) throw ConfigError("c_epsilon", "c_epsilon must be positive");

  c.epsilon_used = c.epsilon_width > 0.0
                       ? c.epsilon_width
                       : c.c_epsilon * std::log(std::max(static_cast<double>(c.N), 2.0));
  c.delta1_used = c.delta1 > 0.0 ? c.delta1 : c.delta;
  if (!(c.delta1_used < 1.0)) throw ConfigError("delta1", "delta1 must lie in (0,1)");
  c.horizon_cap_used = c.horizon_cap > 0 ? c.horizon_cap : default_horizon_cap(c.gamma);
  c.eta_used = c.eta;
  c.kappa_used = std::clamp(c.kappa, 1, c.K);

  if (c.theory_mode) {
    // the return-cap requirement 2 G_max <= W from the IS analysis
    if (2.0 * return_cap(c.gamma) > c.W)
      throw ConfigError("W", "theory mode requires W >= 2 (2 + 3/(1-gamma)) / (1-gamma)");
    c.eta_used = derive_eta(c.K, mdp.n_actions, c.W);
    c.kappa_used = std::clamp(
        kappa_window(c.gamma, c.delta1_used, c.eta_used, bonus_cap(c.gamma), c.W), 1, c.K);
    c.epsilon_used =
        derive_epsilon_theory(c.N, c.W, cls, c.delta, 1.0, 1.0, c.M, 1e-3, 1e-3, c.delta);
  }
}

std::string config_echo_json(const LpoConfig& c) {
  nlohmann::json j;
  j["env"] = c.env == EnvKind::chain    ? "chain"
             : c.env == EnvKind::grid   ? "grid"
             : c.env == EnvKind::random_mdp ? "random_mdp"
                                         : "file";
  j["gamma"] = c.gamma;
  j["chain_length"] = c.chain_length;
  j["chain_slip"] = c.chain_slip;
  j["chain_sparse"] = c.chain_sparse;
  j["grid_width"] = c.grid_width;
  j["grid_height"] = c.grid_height;
  j["grid_slip"] = c.grid_slip;
  j["rand_states"] = c.rand_states;
  j["rand_actions"] = c.rand_actions;
  j["rand_branching"] = c.rand_branching;
  j["rand_seed"] = c.rand_seed;
  j["mdp_file"] = c.mdp_file;
  j["class"] = c.class_kind == ClassKind::tabular ? "tabular" : "linear";
  j["W"] = c.W;
  j["N"] = c.N;
  j["K"] = c.K;
  j["M"] = c.M;
  j["eta"] = c.eta;
  j["kappa"] = c.kappa;
  j["beta"] = c.beta;
  j["epsilon_width"] = c.epsilon_width;
  j["delta"] = c.delta;
  j["delta1"] = c.delta1;
  j["C_mult"] = c.C_mult;
  j["C_budget"] = c.C_budget;
  j["c_epsilon"] = c.c_epsilon;
  j["mode"] = c.mode == EvalMode::monte_carlo ? "mc" : "exact";
  j["variant"] = c.variant == BonusVariant::lpo              ? "lpo"
                 : c.variant == BonusVariant::indicator_only ? "indicator_only"
                                                             : "no_bonus";
  j["seed"] = c.seed;
  j["theory_mode"] = c.theory_mode;
  j["first_step_bonus"] = c.first_step_bonus_include ? "include" : "exclude";
  j["clip_is_ratio"] = c.clip_is_ratio;
  j["horizon_cap"] = c.horizon_cap;
  j["eta_used"] = c.eta_used;
  j["kappa_used"] = c.kappa_used;
  j["epsilon_used"] = c.epsilon_used;
  j["delta1_used"] = c.delta1_used;
  j["horizon_cap_used"] = c.horizon_cap_used;
  return j.dump(2);
}

}  // namespace lpo
