#include "lpo/dp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace lpo {
namespace {

// Uniform access to a plain or augmented MDP. aug stays null for the plain
// case; the escape action is the extra index A-1 of the augmented space.
struct View {
  const Mdp* base = nullptr;
  const AugmentedMdp* aug = nullptr;
  int S = 0;
  int A = 0;
  double gamma = 0.0;

  static View of(const Mdp& m) { return View{&m, nullptr, m.n_states, m.n_actions, m.gamma}; }
  static View of(const AugmentedMdp& m) {
    return View{m.base, &m, m.n_states(), m.n_actions(), m.gamma()};
  }

  bool is_dagger(int a) const { return aug != nullptr && aug->is_dagger(a); }
  bool available(int s, int a) const {
    if (aug != nullptr) return aug->available(s, a);
    return a >= 0 && a < A;
  }
  double reward(int s, int a) const {
    if (aug != nullptr) return aug->reward(s, a);
    return base->r(s, a);
  }
  // transition row over states; only valid for non-escape actions
  const double* row(int s, int a) const { return base->row(s, a); }
};

// Policy distribution at s, padded to the view's action count. Throws if the
// policy puts mass on an action the view does not offer there.
std::vector<double> dist_at(const View& v, const Policy& policy, int s) {
  std::vector<double> p = policy.probs(s);
  p.resize(static_cast<std::size_t>(v.A), 0.0);
  for (int a = 0; a < static_cast<int>(p.size()); ++a) {
    if (p[a] > 0.0 && (a >= v.A || !v.available(s, a)))
      throw std::invalid_argument("action unavailable");
  }
  return p;
}

DpResult value_iteration_view(const View& v, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  std::vector<double> value(v.S, 0.0), next(v.S, 0.0);
  const long max_sweeps = 50'000'000;
  long sweeps = 0;
  double diff;
  do {
    diff = 0.0;
    for (int s = 0; s < v.S; ++s) {
      double best = -1e300;
      for (int a = 0; a < v.A; ++a) {
        if (!v.available(s, a)) continue;
        double q;
        if (v.is_dagger(a)) {
          q = kDaggerReward + v.gamma * value[s];
        } else {
          const double* p = v.row(s, a);
          double exp_v = 0.0;
          for (int s2 = 0; s2 < v.S; ++s2) exp_v += p[s2] * value[s2];
          q = v.reward(s, a) + v.gamma * exp_v;
        }
        best = std::max(best, q);
      }
      next[s] = best;
      diff = std::max(diff, std::abs(next[s] - value[s]));
    }
    value.swap(next);
    if (++sweeps > max_sweeps) throw std::logic_error("value iteration failed to converge");
  } while (diff > tol);

  // one more backup to build Q from the converged value; the residual of the
  // returned tables is then at most gamma^2 * tol
  DpResult out;
  out.n_actions = v.A;
  out.q.assign(static_cast<std::size_t>(v.S) * v.A, 0.0);
  out.v.assign(v.S, 0.0);
  for (int s = 0; s < v.S; ++s) {
    for (int a = 0; a < v.A; ++a) {
      double q;
      if (v.is_dagger(a)) {
        q = kDaggerReward + v.gamma * value[s];
      } else {
        const double* p = v.row(s, a);
        double exp_v = 0.0;
        for (int s2 = 0; s2 < v.S; ++s2) exp_v += p[s2] * value[s2];
        q = v.reward(s, a) + v.gamma * exp_v;
      }
      out.q[static_cast<std::size_t>(s) * v.A + a] = q;
    }
    double best = -1e300;
    for (int a = 0; a < v.A; ++a)
      if (v.available(s, a)) best = std::max(best, out.q[static_cast<std::size_t>(s) * v.A + a]);
    out.v[s] = best;
  }
  return out;
}

DpResult policy_evaluation_leaf(const View& v, const Policy& policy, double tol) {
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(v.S, v.S);
  Eigen::VectorXd rpi(v.S);
  std::vector<std::vector<double>> dists(v.S);
  for (int s = 0; s < v.S; ++s) dists[s] = dist_at(v, policy, s);

  for (int s = 0; s < v.S; ++s) {
    double rsum = 0.0;
    for (int a = 0; a < v.A; ++a) {
      const double pa = dists[s][a];
      if (pa == 0.0) continue;
      rsum += pa * v.reward(s, a);
      if (v.is_dagger(a)) {
        lhs(s, s) -= v.gamma * pa;
      } else {
        const double* p = v.row(s, a);
        for (int s2 = 0; s2 < v.S; ++s2) lhs(s, s2) -= v.gamma * pa * p[s2];
      }
    }
    rpi(s) = rsum;
  }
  const Eigen::VectorXd value = lhs.partialPivLu().solve(rpi);

  DpResult out;
  out.n_actions = v.A;
  out.q.assign(static_cast<std::size_t>(v.S) * v.A, 0.0);
  out.v.assign(v.S, 0.0);
  for (int s = 0; s < v.S; ++s) {
    for (int a = 0; a < v.A; ++a) {
      double q;
      if (v.is_dagger(a)) {
        q = kDaggerReward + v.gamma * value(s);
      } else {
        const double* p = v.row(s, a);
        double exp_v = 0.0;
        for (int s2 = 0; s2 < v.S; ++s2) exp_v += p[s2] * value(s2);
        q = v.reward(s, a) + v.gamma * exp_v;
      }
      out.q[static_cast<std::size_t>(s) * v.A + a] = q;
    }
    double vsum = 0.0;
    for (int a = 0; a < v.A; ++a) vsum += dists[s][a] * out.q[static_cast<std::size_t>(s) * v.A + a];
    out.v[s] = vsum;
  }
  // the solve is exact up to conditioning; verify the Bellman residual anyway
  for (int s = 0; s < v.S; ++s)
    if (std::abs(out.v[s] - value(s)) > 10.0 * tol + 1e-9 * std::abs(value(s)))
      throw std::logic_error("policy evaluation solve failed");
  return out;
}

DpResult policy_evaluation_view(const View& v, const Policy& policy, double tol) {
  if (!policy.is_mixture()) return policy_evaluation_leaf(v, policy, tol);
  DpResult out;
  out.n_actions = v.A;
  out.q.assign(static_cast<std::size_t>(v.S) * v.A, 0.0);
  out.v.assign(v.S, 0.0);
  for_each_leaf(policy, [&](const Policy& leaf, double w) {
    const DpResult r = policy_evaluation_leaf(v, leaf, tol);
    for (std::size_t i = 0; i < out.q.size(); ++i) out.q[i] += w * r.q[i];
    for (int s = 0; s < v.S; ++s) out.v[s] += w * r.v[s];
  });
  return out;
}

std::vector<double> occupancy_leaf(const View& v, const Policy& policy,
                                   const std::vector<double>& nu) {
  const int P = v.S * v.A;
  std::vector<std::vector<double>> dists(v.S);
  for (int s = 0; s < v.S; ++s) dists[s] = dist_at(v, policy, s);
  for (int s = 0; s < v.S; ++s)
    for (int a = 0; a < v.A; ++a)
      if (nu[static_cast<std::size_t>(s) * v.A + a] > 0.0 && !v.available(s, a))
        throw std::invalid_argument("nu puts mass on an unavailable action");

  // d = (1-gamma) nu + gamma M^T d over pairs, M(z'->z) = P(s|z') pi(a|s)
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(P, P);
  for (int s = 0; s < v.S; ++s) {
    for (int a = 0; a < v.A; ++a) {
      if (!v.available(s, a)) continue;
      const int from = s * v.A + a;
      if (v.is_dagger(a)) {
        for (int a2 = 0; a2 < v.A; ++a2)
          lhs(s * v.A + a2, from) -= v.gamma * dists[s][a2];
      } else {
        const double* p = v.row(s, a);
        for (int s2 = 0; s2 < v.S; ++s2) {
          if (p[s2] == 0.0) continue;
          for (int a2 = 0; a2 < v.A; ++a2)
            lhs(s2 * v.A + a2, from) -= v.gamma * p[s2] * dists[s2][a2];
        }
      }
    }
  }
  Eigen::VectorXd rhs(P);
  for (int i = 0; i < P; ++i) rhs(i) = (1.0 - v.gamma) * nu[i];
  const Eigen::VectorXd d = lhs.partialPivLu().solve(rhs);
  std::vector<double> out(P);
  for (int i = 0; i < P; ++i) out[i] = d(i);
  return out;
}

std::vector<double> occupancy_view(const View& v, const Policy& policy,
                                   const std::vector<double>& nu) {
  if (nu.size() != static_cast<std::size_t>(v.S) * v.A)
    throw std::invalid_argument("nu size mismatch");
  double mass = 0.0;
  for (double x : nu) {
    if (x < 0.0) throw std::invalid_argument("nu has a negative entry");
    mass += x;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("nu must sum to 1");

  if (!policy.is_mixture()) return occupancy_leaf(v, policy, nu);
  std::vector<double> out(nu.size(), 0.0);
  for_each_leaf(policy, [&](const Policy& leaf, double w) {
    const std::vector<double> d = occupancy_leaf(v, leaf, nu);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * d[i];
  });
  return out;
}

}  // namespace

DpResult value_iteration(const Mdp& mdp, double tol) { return value_iteration_view(View::of(mdp), tol); }
DpResult value_iteration(const AugmentedMdp& mdp, double tol) {
  return value_iteration_view(View::of(mdp), tol);
}

DpResult policy_evaluation_exact(const Mdp& mdp, const Policy& policy, double tol) {
  return policy_evaluation_view(View::of(mdp), policy, tol);
}
DpResult policy_evaluation_exact(const AugmentedMdp& mdp, const Policy& policy, double tol) {
  return policy_evaluation_view(View::of(mdp), policy, tol);
}

std::vector<double> occupancy_exact(const Mdp& mdp, const Policy& policy,
                                    const std::vector<double>& nu) {
  return occupancy_view(View::of(mdp), policy, nu);
}
std::vector<double> occupancy_exact(const AugmentedMdp& mdp, const Policy& policy,
                                    const std::vector<double>& nu) {
  return occupancy_view(View::of(mdp), policy, nu);
}

std::vector<double> nu_default(const Mdp& mdp) {
  std::vector<double> nu(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0);
  for (int a = 0; a < mdp.n_actions; ++a)
    nu[static_cast<std::size_t>(mdp.initial_state) * mdp.n_actions + a] = 1.0 / mdp.n_actions;
  return nu;
}

std::vector<double> nu_default(const AugmentedMdp& mdp) {
  // mass on the base actions only; the escape action never starts a rollout
  std::vector<double> nu(static_cast<std::size_t>(mdp.n_states()) * mdp.n_actions(), 0.0);
  const int ab = mdp.base->n_actions;
  for (int a = 0; a < ab; ++a)
    nu[static_cast<std::size_t>(mdp.initial_state()) * mdp.n_actions() + a] = 1.0 / ab;
  return nu;
}

}  // namespace lpo
