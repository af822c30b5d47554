#include "lpo/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lpo/dp.hpp"

namespace lpo {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double policy_value_cached(LpoState& state, const Mdp& mdp, const Policy& p) {
  double acc = 0.0;
  for_each_leaf(p, [&](const Policy& leaf, double w) {
    auto it = state.leaf_value_cache.find(&leaf);
    double v;
    if (it != state.leaf_value_cache.end()) {
      v = it->second;
    } else {
      v = policy_evaluation_exact(mdp, leaf).v[mdp.initial_state];
      state.leaf_value_cache.emplace(&leaf, v);
    }
    acc += w * v;
  });
  return acc;
}

}  // namespace

double derive_eta(int K, int n_actions, double W) {
  if (K < 1) throw std::invalid_argument("derive_eta requires K >= 1");
  if (n_actions < 2) throw std::invalid_argument("derive_eta requires at least 2 actions");
  if (!(W > 0.0)) throw std::invalid_argument("derive_eta requires W > 0");
  return std::sqrt(std::log(static_cast<double>(n_actions)) / (16.0 * W * W * K));
}

double derive_epsilon_theory(int N, double W, const FunctionClassHandle& cls, double delta,
                             double C1, double C2, int M, double eps1, double eps2,
                             double delta3) {
  if (N < 1 || M < 1) throw std::invalid_argument("derive_epsilon_theory requires N, M >= 1");
  if (!(W > 0.0) || !(eps1 > 0.0) || !(eps2 > 0.0))
    throw std::invalid_argument("derive_epsilon_theory requires positive W, eps1, eps2");
  if (!(delta > 0.0 && delta < 1.0) || !(delta3 > 0.0 && delta3 < 1.0))
    throw std::invalid_argument("derive_epsilon_theory requires deltas in (0,1)");
  if (C1 < 0.0 || C2 < 0.0)
    throw std::invalid_argument("derive_epsilon_theory requires nonnegative C1, C2");

  const double w2 = W * W;
  const double eps_stat =
      500.0 * w2 * w2 * (log_cover_size(cls, eps2) + std::log(1.0 / delta3)) / M +
      13.0 * w2 * eps2;
  // the difference class is covered by pairing covers of the class itself,
  // so its log covering number at radius 2*eps1 is at most twice the class's
  const double ln_term =
      std::log(static_cast<double>(N)) + 2.0 * log_cover_size(cls, eps1) + std::log(1.0 / delta);
  return 100.0 * (1.5 * C1 * N * eps_stat + 20.0 * N * W * eps1 + 0.5 * C2 * ln_term);
}

LpoState init_state(const RunContext& ctx) {
  const LpoConfig& cfg = *ctx.config;
  const Mdp& mdp = *ctx.mdp;
  LpoState st;
  st.dataset = SensitivityDataset(mdp.n_states, mdp.n_actions,
                                  DatasetConfig{cfg.C_mult, cfg.delta, cfg.N, cfg.W});
  auto pi0 = std::make_shared<SoftmaxPolicy>(make_base_policy(mdp.n_states, mdp.n_actions, {}, {}));
  st.cover = {pi0};
  st.current = pi0;
  st.rng = Rng(cfg.seed);
  return st;
}

std::shared_ptr<const MixturePolicy> inner_policy_update(const Policy& cover_mixture,
                                                         std::shared_ptr<const BonusOracle> oracle,
                                                         LpoState& state, const RunContext& ctx,
                                                         SwitchArtifact* artifact) {
  const LpoConfig& cfg = *ctx.config;
  const Mdp& mdp = *ctx.mdp;
  const AugmentedMdp bonus_mdp = build_bonus_mdp(mdp, *oracle);
  const EvalOptions opts{cfg.first_step_bonus_include, cfg.clip_is_ratio};

  auto pi = std::make_shared<SoftmaxPolicy>(
      make_base_policy(mdp.n_states, mdp.n_actions, oracle->state_known, oracle->pair_known));
  auto mixture = std::make_shared<MixturePolicy>();
  mixture->components.reserve(cfg.K);

  EvalDataset data;
  int k_collected = 0;
  for (int k = 0; k < cfg.K; ++k) {
    mixture->components.push_back(pi);
    if (cfg.mode == EvalMode::monte_carlo && (k == 0 || k - k_collected >= cfg.kappa_used)) {
      data = behaviour_sample(cover_mixture, pi, bonus_mdp, *oracle, cfg.M, ctx.nu, state.rng,
                              cfg.horizon_cap_used, k);
      state.sample_ledger += data.env_steps;
      k_collected = k;
    }
    const Critic q_k =
        cfg.mode == EvalMode::exact_eval
            ? evaluate_policy_exact(mdp, *pi, *ctx.cls, oracle)
            : evaluate_policy(data, *pi, *ctx.cls, oracle, cfg.gamma, opts);
    if (artifact) {
      artifact->inner_policies.push_back(pi);
      artifact->critics.push_back(q_k);
    }
    if (k < cfg.K - 1) {
      pi = std::make_shared<SoftmaxPolicy>(npg_step(
          *pi, [&q_k](int s, int a) { return q_k.at(s, a); }, cfg.eta_used));
    }
  }
  return mixture;
}

void outer_step(LpoState& state, const RunContext& ctx) {
  const LpoConfig& cfg = *ctx.config;
  state.n += 1;

  const bool switched = state.n == 1 || switch_occurred(state.dataset, state.last_seen_version);
  if (switched) {
    auto oracle = std::make_shared<BonusOracle>(
        rebuild(state.dataset, *ctx.cls, cfg.beta, cfg.epsilon_used, cfg.gamma, cfg.variant));
    state.oracle = oracle;
    state.last_seen_version = state.dataset.version;
    state.switch_count += 1;

    MixturePolicy cover_mixture;
    cover_mixture.components = state.cover;
    SwitchArtifact art;
    art.n = state.n;
    art.oracle = oracle;
    art.eta = cfg.eta_used;
    state.current =
        inner_policy_update(cover_mixture, oracle, state, ctx, ctx.artifacts ? &art : nullptr);
    state.inner_invocations += 1;
    if (ctx.artifacts) ctx.artifacts->switches.push_back(std::move(art));
  }
  state.cover.push_back(state.current);

  const OccupancyDraw z = d_sampler(*ctx.mdp, *state.current, ctx.nu, state.rng,
                                    cfg.horizon_cap_used);
  state.sample_ledger += z.env_steps;
  const AdmissionDecision dec = admit(state.dataset, *ctx.cls, z.s, z.a, state.rng);
  state.cumulative_raw_sensitivity += dec.sensitivity_raw;
  state.last_iteration_admitted = dec.admitted;
  if (ctx.artifacts) {
    ctx.artifacts->admissions.push_back(dec);
    ctx.artifacts->per_iteration_policy.push_back(state.current);
    ctx.artifacts->per_iteration_oracle.push_back(state.oracle);
  }

  RunMetricsRow row;
  row.n = state.n;
  row.switched = switched;
  row.dataset_distinct = state.dataset.distinct();
  row.dataset_weight = state.dataset.total_weight();
  row.known_pair_fraction = state.oracle->known_pair_fraction();
  row.value_exact_of_mixture = policy_value_cached(state, *ctx.mdp, *state.current);
  row.suboptimality = ctx.v_star_at_start - row.value_exact_of_mixture;
  row.transitions_used = ctx.mdp->transitions_used - ctx.transitions_at_start;
  if (row.transitions_used != state.sample_ledger)
    throw InvariantViolation("sample_ledger",
                             "sample ledger " + std::to_string(state.sample_ledger) +
                                 " disagrees with the transition meter " +
                                 std::to_string(row.transitions_used) + " at iteration " +
                                 std::to_string(state.n));
  state.metrics.push_back(row);
}

LpoResult run_lpo(const LpoConfig& config, const Mdp& mdp, const FunctionClassHandle& cls,
                  RunArtifacts* artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx;
  ctx.config = &config;
  ctx.mdp = &mdp;
  ctx.cls = &cls;
  ctx.nu = nu_default(mdp);
  ctx.v_star_at_start = value_iteration(mdp).v[mdp.initial_state];
  ctx.transitions_at_start = mdp.transitions_used;
  ctx.artifacts = artifacts;
  if (artifacts) artifacts->mode = config.mode;

  LpoState state = init_state(ctx);
  for (int n = 1; n <= config.N; ++n) outer_step(state, ctx);

  const std::uint64_t triggering =
      state.dataset.total_admissions - (state.last_iteration_admitted ? 1 : 0);
  if (static_cast<std::uint64_t>(state.inner_invocations) != 1 + triggering)
    throw InvariantViolation("low_switching",
                             "inner updates " + std::to_string(state.inner_invocations) +
                                 " != 1 + " + std::to_string(triggering) +
                                 " dataset changes before the last iteration");
  if (state.metrics.size() != static_cast<std::size_t>(config.N))
    throw InvariantViolation("metrics_rows", "metrics row count != N");

  LpoResult out;
  out.summary.final_value = state.metrics.back().value_exact_of_mixture;
  double mean = 0.0;
  for (const RunMetricsRow& r : state.metrics) mean += r.value_exact_of_mixture;
  out.summary.value_uniform_over_iterations = mean / config.N;
  out.summary.v_star = ctx.v_star_at_start;
  out.summary.switches = state.switch_count;
  out.summary.total_transitions = state.sample_ledger;
  out.summary.cumulative_raw_sensitivity = state.cumulative_raw_sensitivity;
  out.summary.eta_used = config.eta_used;
  out.summary.epsilon_used = config.epsilon_used;
  out.summary.kappa_used = config.kappa_used;
  out.summary.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.metrics = state.metrics;
  out.state = std::move(state);
  return out;
}

void write_metrics_csv(const std::string& path, const std::vector<RunMetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "n,switched,dataset_distinct,dataset_weight,known_pair_fraction,"
         "value_exact_of_mixture,suboptimality,transitions_used\n";
  for (const RunMetricsRow& r : rows) {
    out << r.n << ',' << (r.switched ? 1 : 0) << ',' << r.dataset_distinct << ','
        << r.dataset_weight << ',' << fmt_double(r.known_pair_fraction) << ','
        << fmt_double(r.value_exact_of_mixture) << ',' << fmt_double(r.suboptimality) << ','
        << r.transitions_used << '\n';
  }
}

std::vector<RunMetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty metrics file");
  std::vector<RunMetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    RunMetricsRow r;
    char c;
    int switched = 0;
    if (!(ss >> r.n >> c >> switched >> c >> r.dataset_distinct >> c >> r.dataset_weight >> c >>
          r.known_pair_fraction >> c >> r.value_exact_of_mixture >> c >> r.suboptimality >> c >>
          r.transitions_used))
      throw std::runtime_error(path + ": malformed metrics row '" + line + "'");
    r.switched = switched != 0;
    rows.push_back(r);
  }
  return rows;
}

void write_summary_json(const std::string& path, const LpoConfig& config,
                        const RunSummary& summary) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_echo_json(config));
  j["final_value"] = summary.final_value;
  j["value_uniform_over_iterations"] = summary.value_uniform_over_iterations;
  j["v_star"] = summary.v_star;
  j["switches"] = summary.switches;
  j["total_transitions"] = summary.total_transitions;
  j["cumulative_raw_sensitivity"] = summary.cumulative_raw_sensitivity;
  j["wall_clock_sec"] = summary.wall_clock_sec;
  j["eta_used"] = summary.eta_used;
  j["epsilon_used"] = summary.epsilon_used;
  j["kappa_used"] = summary.kappa_used;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace lpo
