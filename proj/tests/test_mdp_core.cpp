#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lpo/dp.hpp"
#include "lpo/generators.hpp"
#include "lpo/mdp.hpp"
#include "lpo/mdp_io.hpp"
#include "lpo/policy.hpp"
#include "lpo/sampling.hpp"

using namespace lpo;

namespace {

Mdp single_state(double r, double gamma, int n_actions = 1) {
  Mdp m;
  m.n_states = 1;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.reward.assign(n_actions, r);
  m.transition.assign(n_actions, 1.0);
  m.validate();
  return m;
}

// s0 -> s1 deterministic, s1 self-loop paying 1, one action each plus a stay
// action so the chain is 2-state 2-action
Mdp two_state_goal_chain(double gamma) {
  Mdp m;
  m.n_states = 2;
  m.n_actions = 2;
  m.gamma = gamma;
  m.reward = {0.0, 0.0, 1.0, 0.0};  // (s1, a0) is the rewarded goal self-loop
  m.transition.assign(8, 0.0);
  auto set = [&](int s, int a, int s2) { m.transition[(s * 2 + a) * 2 + s2] = 1.0; };
  set(0, 0, 1);  // advance
  set(0, 1, 0);  // stay
  set(1, 0, 1);  // goal self-loop
  set(1, 1, 0);  // walk back
  m.validate();
  return m;
}

Mdp two_state_cycle(double gamma) {
  Mdp m;
  m.n_states = 2;
  m.n_actions = 1;
  m.gamma = gamma;
  m.reward = {0.0, 0.0};
  m.transition = {0.0, 1.0, 1.0, 0.0};
  m.validate();
  return m;
}

TablePolicy deterministic_policy(int n_states, int n_actions, int action) {
  TablePolicy p(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) p.at(s, action) = 1.0;
  return p;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double bellman_residual(const Mdp& m, const DpResult& r) {
  double worst = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      double exp_v = 0.0;
      const double* p = m.row(s, a);
      for (int s2 = 0; s2 < m.n_states; ++s2) exp_v += p[s2] * r.v[s2];
      worst = std::max(worst, std::abs(r.q[s * m.n_actions + a] - (m.r(s, a) + m.gamma * exp_v)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("value iteration solves the geometric-series single state") {
  const Mdp m = single_state(1.0, 0.9);
  const DpResult r = value_iteration(m, 1e-10);
  CHECK(r.v[0] == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("value iteration on the 2-state goal chain") {
  // hand-solved Bellman system: V(goal) = 1/(1-0.5) = 2, V(start) = 0.5*2 = 1
  const Mdp m = two_state_goal_chain(0.5);
  const DpResult r = value_iteration(m, 1e-12);
  CHECK(r.v[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.v[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("zero reward forces zero optimal value") {
  Mdp m = make_random_mdp(7, 3, 17, 3, 0.95);
  m.reward.assign(m.reward.size(), 0.0);
  const DpResult r = value_iteration(m, 1e-10);
  for (double v : r.v) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("value iteration residual stays below tol on random MDPs") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Mdp m = make_random_mdp(25, 3, seed, 4, 0.9);
    const DpResult r = value_iteration(m, 1e-10);
    CHECK(bellman_residual(m, r) <= 1e-10);
  }
}

TEST_CASE("policy evaluation on the symmetric single state") {
  const Mdp m = single_state(0.5, 0.5, 2);
  TablePolicy uniform(1, 2);
  uniform.at(0, 0) = uniform.at(0, 1) = 0.5;
  const DpResult r = policy_evaluation_exact(m, uniform);
  CHECK(r.q[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.q[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("right-moving policy on the 3-chain") {
  const Mdp m = make_chain(3, 0.0, true, 0.9);
  const TablePolicy right = deterministic_policy(3, 2, 1);
  const DpResult r = policy_evaluation_exact(m, right);
  CHECK(r.v[0] == doctest::Approx(8.1).epsilon(1e-12));
}

TEST_CASE("escape action self-loop pays 3/(1-gamma)") {
  const Mdp base = make_chain(3, 0.0, true, 0.9);
  AugmentedMdp aug;
  aug.base = &base;
  aug.extra_reward.assign(base.n_pairs(), 0.0);
  aug.dagger_state.assign(3, 1);
  aug.validate();
  TablePolicy p(3, 3);
  for (int s = 0; s < 3; ++s) p.at(s, 2) = 1.0;
  const DpResult r = policy_evaluation_exact(aug, p);
  for (int s = 0; s < 3; ++s) CHECK(r.v[s] == doctest::Approx(30.0).epsilon(1e-10));
}

TEST_CASE("escape action mass at an unflagged state is rejected") {
  const Mdp base = make_chain(3, 0.0, true, 0.9);
  AugmentedMdp aug;
  aug.base = &base;
  aug.extra_reward.assign(base.n_pairs(), 0.0);
  aug.dagger_state = {0, 1, 0};  // only state 1 offers the escape
  TablePolicy p(3, 3);
  p.at(0, 2) = 1.0;
  p.at(1, 2) = 1.0;
  p.at(2, 0) = 1.0;
  CHECK_THROWS_WITH_AS(policy_evaluation_exact(aug, p), "action unavailable", std::invalid_argument);
}

TEST_CASE("greedy policy recovers the optimal value") {
  for (std::uint64_t seed = 3; seed <= 7; ++seed) {
    const Mdp m = make_random_mdp(12, 3, seed, 3, 0.85);
    const DpResult star = value_iteration(m, 1e-12);
    TablePolicy greedy(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
      int best = 0;
      for (int a = 1; a < m.n_actions; ++a)
        if (star.q[s * m.n_actions + a] > star.q[s * m.n_actions + best]) best = a;
      greedy.at(s, best) = 1.0;
    }
    const DpResult pe = policy_evaluation_exact(m, greedy, 1e-12);
    for (int s = 0; s < m.n_states; ++s) CHECK(std::abs(pe.v[s] - star.v[s]) <= 1e-11);
  }
}

TEST_CASE("occupancy of an absorbing pair is a point mass") {
  const Mdp m = single_state(0.3, 0.7);
  const TablePolicy p = deterministic_policy(1, 1, 0);
  const auto d = occupancy_exact(m, p, nu_default(m));
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("occupancy of the 2-state cycle") {
  const Mdp m = two_state_cycle(0.5);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  std::vector<double> nu = {1.0, 0.0};
  const auto d = occupancy_exact(m, p, nu);
  CHECK(d[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("occupancy is a probability distribution") {
  const Mdp m = make_random_mdp(9, 2, 5, 3, 0.92);
  TablePolicy p(9, 2);
  Rng rng(44);
  for (int s = 0; s < 9; ++s) {
    const double u = 0.2 + 0.6 * rng.uniform01();
    p.at(s, 0) = u;
    p.at(s, 1) = 1.0 - u;
  }
  const auto d = occupancy_exact(m, p, nu_default(m));
  double total = 0.0;
  for (double x : d) {
    CHECK(x >= -1e-12);
    total += x;
  }
  CHECK(std::abs(total - 1.0) <= 1e-10);
}

TEST_CASE("mixture occupancy and value average over components") {
  const Mdp m = make_random_mdp(6, 2, 9, 3, 0.8);
  auto a = std::make_shared<TablePolicy>(deterministic_policy(6, 2, 0));
  auto b = std::make_shared<TablePolicy>(deterministic_policy(6, 2, 1));
  MixturePolicy mix;
  mix.components = {a, b};

  const auto da = occupancy_exact(m, *a, nu_default(m));
  const auto db = occupancy_exact(m, *b, nu_default(m));
  const auto dm = occupancy_exact(m, mix, nu_default(m));
  for (std::size_t i = 0; i < dm.size(); ++i)
    CHECK(dm[i] == doctest::Approx(0.5 * (da[i] + db[i])).epsilon(1e-12));

  const DpResult va = policy_evaluation_exact(m, *a);
  const DpResult vb = policy_evaluation_exact(m, *b);
  const DpResult vm = policy_evaluation_exact(m, mix);
  for (int s = 0; s < 6; ++s)
    CHECK(vm.v[s] == doctest::Approx(0.5 * (va.v[s] + vb.v[s])).epsilon(1e-12));
}

TEST_CASE("near-degenerate discount makes the occupancy sampler return nu draws") {
  const Mdp m = two_state_cycle(1e-12);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  std::vector<double> nu = {1.0, 0.0};
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const OccupancyDraw d = d_sampler(m, p, nu, rng, default_horizon_cap(m.gamma));
    CHECK(d.s == 0);
    CHECK(d.a == 0);
    CHECK(d.env_steps == 0);
  }
}

TEST_CASE("occupancy sampler frequencies match the exact occupancy") {
  const Mdp m = two_state_cycle(0.5);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  std::vector<double> nu = {1.0, 0.0};
  Rng rng(123);
  std::vector<double> freq(2, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const OccupancyDraw d = d_sampler(m, p, nu, rng, default_horizon_cap(m.gamma));
    freq[d.s] += 1.0 / n;
  }
  const auto exact = occupancy_exact(m, p, nu);
  CHECK(tv_distance(freq, exact) <= 0.01);
}

TEST_CASE("occupancy sampler follows the exact occupancy on a random MDP") {
  const Mdp m = make_random_mdp(5, 2, 21, 2, 0.8);
  TablePolicy p(5, 2);
  for (int s = 0; s < 5; ++s) {
    p.at(s, 0) = 0.3;
    p.at(s, 1) = 0.7;
  }
  const auto nu = nu_default(m);
  const auto exact = occupancy_exact(m, p, nu);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Rng rng(seed);
    std::vector<double> freq(m.n_pairs(), 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const OccupancyDraw d = d_sampler(m, p, nu, rng, default_horizon_cap(m.gamma));
      freq[m.pair_index(d.s, d.a)] += 1.0 / n;
    }
    CHECK(tv_distance(freq, exact) <= 0.02);
  }
}

TEST_CASE("horizon cap 1 forces a nu draw regardless of gamma") {
  const Mdp m = two_state_cycle(0.99);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  std::vector<double> nu = {0.0, 1.0};
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const OccupancyDraw d = d_sampler(m, p, nu, rng, 1);
    CHECK(d.s == 1);
    CHECK(d.env_steps == 0);
  }
}

TEST_CASE("rollout of cap 1 is the start pair alone") {
  const Mdp m = two_state_cycle(0.9);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  Rng rng(2);
  const Trajectory t = rollout_geometric(m, {1, 0}, p, rng, 1);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].s == 1);
  CHECK(t.steps[0].a == 0);
  CHECK(t.env_steps == 0);
}

TEST_CASE("mean rollout length approaches 1/(1-gamma)") {
  const Mdp m = two_state_cycle(0.9);
  const TablePolicy p = deterministic_policy(2, 1, 0);
  Rng rng(31);
  double total = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Trajectory t = rollout_geometric(m, {0, 0}, p, rng, 10000);
    total += static_cast<double>(t.steps.size());
  }
  CHECK(total / n == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("deterministic dynamics give the unique path prefix") {
  const Mdp m = make_chain(5, 0.0, true, 0.9);
  const TablePolicy right = deterministic_policy(5, 2, 1);
  Rng rng(11);
  const Trajectory t = rollout_geometric(m, {0, 1}, right, rng, 4);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    CHECK(t.steps[i].s == static_cast<int>(std::min<std::size_t>(i, 4)));
    CHECK(t.steps[i].a == 1);
  }
}

TEST_CASE("rollouts on a bonus MDP record reward and bonus separately") {
  const Mdp base = make_chain(3, 0.0, true, 0.5);
  AugmentedMdp aug;
  aug.base = &base;
  aug.extra_reward.assign(base.n_pairs(), 0.25);
  aug.validate();
  const TablePolicy right = deterministic_policy(3, 2, 1);
  Rng rng(3);
  const Trajectory t = rollout_geometric(aug, {2, 1}, right, rng, 64);
  for (const auto& step : t.steps) {
    CHECK(step.bonus == 0.25);
    CHECK(step.reward == base.r(step.s, step.a));
  }
}

TEST_CASE("transition meter counts every sampled step") {
  const Mdp m = make_chain(6, 0.1, true, 0.9);
  const TablePolicy right = deterministic_policy(6, 2, 1);
  m.transitions_used = 0;
  Rng rng(77);
  std::uint64_t ledger = 0;
  for (int i = 0; i < 500; ++i) {
    const OccupancyDraw d = d_sampler(m, right, nu_default(m), rng, 200);
    ledger += d.env_steps;
    const Trajectory t = rollout_geometric(m, {d.s, d.a}, right, rng, 200);
    ledger += t.env_steps;
  }
  CHECK(m.transitions_used == ledger);
}

TEST_CASE("all-unknown augmentation with the always-escape policy") {
  const Mdp base = make_random_mdp(4, 2, 13, 2, 0.8);
  AugmentedMdp aug;
  aug.base = &base;
  aug.extra_reward.assign(base.n_pairs(), 0.0);
  aug.dagger_state.assign(4, 1);
  TablePolicy p(4, 3);
  for (int s = 0; s < 4; ++s) p.at(s, 2) = 1.0;
  const DpResult r = policy_evaluation_exact(aug, p);
  for (double v : r.v) CHECK(v == doctest::Approx(15.0).epsilon(1e-10));
}

TEST_CASE("malformed MDPs are rejected at construction") {
  Mdp m = single_state(1.0, 0.9);
  m.reward[0] = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.reward[0] = 1.0;
  m.transition[0] = 0.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.transition[0] = 1.0;
  m.gamma = 1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("horizon cap default keeps tail mass below 1e-6") {
  CHECK(default_horizon_cap(0.9) == 139);  // ceil(ln 1e6 / 0.1)
  const double gamma = 0.99;
  const int cap = default_horizon_cap(gamma);
  CHECK(std::pow(gamma, cap) <= 1e-6);
  CHECK(std::pow(gamma, cap) > 1e-7);  // not wildly larger than needed
}

TEST_CASE("generators produce valid MDPs and fixed seeds reproduce") {
  const Mdp g = make_grid(4, 3, 0.2, 0.9);
  CHECK(g.n_states == 12);
  for (int a = 0; a < 4; ++a) CHECK(g.r(11, a) == 1.0);
  CHECK(g.r(0, 0) == 0.0);

  const Mdp r1 = make_random_mdp(8, 3, 99, 3, 0.9);
  const Mdp r2 = make_random_mdp(8, 3, 99, 3, 0.9);
  CHECK(r1.transition == r2.transition);
  CHECK(r1.reward == r2.reward);

  const Mdp sparse = make_chain(10, 0.0, true, 0.9);
  double reward_total = 0.0;
  for (double x : sparse.reward) reward_total += x;
  CHECK(reward_total == 1.0);
  CHECK(sparse.r(9, 1) == 1.0);
}

TEST_CASE("MDP files round-trip through save and load") {
  const Mdp m = make_random_mdp(6, 2, 31, 3, 0.85);
  std::vector<double> feats(static_cast<std::size_t>(m.n_pairs()) * 2);
  for (std::size_t i = 0; i < feats.size(); ++i) feats[i] = 0.01 * static_cast<double>(i);
  const std::string path = (std::filesystem::temp_directory_path() / "lpo_roundtrip.mdp").string();
  save_mdp(path, m, 2, feats);
  const MdpFile loaded = load_mdp(path);
  CHECK(loaded.mdp.n_states == m.n_states);
  CHECK(loaded.mdp.gamma == m.gamma);
  CHECK(loaded.mdp.reward == m.reward);
  CHECK(loaded.mdp.transition == m.transition);
  CHECK(loaded.d_feat == 2);
  CHECK(loaded.features == feats);
  std::remove(path.c_str());
}

TEST_CASE("MDP file errors carry the offending location") {
  const std::string path = (std::filesystem::temp_directory_path() / "lpo_bad.mdp").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("[meta]\nn_states = 2\nn_actions = 1\ngamma = 0.5\n[transition]\n0 0 1 1.0\n", f);
    std::fclose(f);
  }
  // state 1's transition row is missing entirely
  CHECK_THROWS_AS(load_mdp(path), std::runtime_error);
  std::remove(path.c_str());
}
