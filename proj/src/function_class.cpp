#include "lpo/function_class.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace lpo {

namespace {

void check_domain(const FunctionClassHandle& cls, int s, int a) {
  if (s < 0 || s >= cls.n_states || a < 0 || a >= cls.n_actions)
    throw std::out_of_range("state-action index outside the class domain");
}

Eigen::Map<const Eigen::VectorXd> phi_vec(const FunctionClassHandle& cls, int s, int a) {
  return {cls.phi(s, a), cls.d_feat};
}

Eigen::MatrixXd second_moment(const FunctionClassHandle& cls, const SensitivityDataset& ds) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(cls.d_feat, cls.d_feat);
  for (int s = 0; s < cls.n_states; ++s) {
    for (int a = 0; a < cls.n_actions; ++a) {
      const std::uint64_t c = ds.count(s, a);
      if (c == 0) continue;
      const auto p = phi_vec(cls, s, a);
      sigma.noalias() += static_cast<double>(c) * (p * p.transpose());
    }
  }
  return sigma;
}

// Grid with an even step count so that 0 and +-2W land exactly on-grid;
// the tabular maximizers sit at those points, which keeps the brute-force
// comparison tolerance at 2 * grid_step.
std::vector<double> grid_values(double W, double grid_step) {
  int steps = std::max(1, static_cast<int>(std::llround(4.0 * W / grid_step)));
  steps += steps % 2;
  std::vector<double> v(steps + 1);
  const double h = 4.0 * W / steps;
  for (int i = 0; i <= steps; ++i) v[i] = -2.0 * W + i * h;
  v[0] = -2.0 * W;
  v[steps / 2] = 0.0;
  v[steps] = 2.0 * W;
  return v;
}

constexpr double kFeasSlack = 1e-12;

}  // namespace

FunctionClassHandle FunctionClassHandle::make_tabular(int n_states, int n_actions, double W) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty class domain");
  if (!(W > 0.0)) throw std::invalid_argument("W must be positive");
  FunctionClassHandle cls;
  cls.kind = ClassKind::tabular;
  cls.W = W;
  cls.n_states = n_states;
  cls.n_actions = n_actions;
  return cls;
}

FunctionClassHandle FunctionClassHandle::make_linear(int n_states, int n_actions, double W,
                                                     int d_feat, std::vector<double> features) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("empty class domain");
  if (!(W > 0.0)) throw std::invalid_argument("W must be positive");
  if (d_feat < 1) throw std::invalid_argument("d_feat must be positive");
  const std::size_t want = static_cast<std::size_t>(n_states) * n_actions * d_feat;
  if (features.size() != want) throw std::invalid_argument("feature table size mismatch");

  // rescale globally so every feature vector has norm at most 1
  double max_sq = 0.0;
  for (std::size_t p = 0; p < want / d_feat; ++p) {
    double sq = 0.0;
    for (int j = 0; j < d_feat; ++j) {
      const double x = features[p * d_feat + j];
      sq += x * x;
    }
    max_sq = std::max(max_sq, sq);
  }
  if (max_sq > 1.0) {
    const double inv = 1.0 / std::sqrt(max_sq);
    for (double& x : features) x *= inv;
  }

  FunctionClassHandle cls;
  cls.kind = ClassKind::linear;
  cls.W = W;
  cls.n_states = n_states;
  cls.n_actions = n_actions;
  cls.d_feat = d_feat;
  cls.features = std::move(features);
  return cls;
}

double evaluate(const FunctionHandle& f, int s, int a) {
  const FunctionClassHandle& cls = *f.cls;
  check_domain(cls, s, a);
  if (cls.kind == ClassKind::tabular) return f.values[cls.pair_index(s, a)];
  double acc = 0.0;
  const double* p = cls.phi(s, a);
  for (int j = 0; j < cls.d_feat; ++j) acc += f.values[j] * p[j];
  return acc;
}

FunctionHandle fit_least_squares(const FunctionClassHandle& cls,
                                 const std::vector<RegressionPoint>& data, double lambda_reg) {
  if (data.empty()) throw std::invalid_argument("no regression data");
  if (lambda_reg < 0.0) throw std::invalid_argument("negative ridge regularizer");

  FunctionHandle f;
  f.cls = &cls;

  if (cls.kind == ClassKind::tabular) {
    f.values.assign(cls.n_pairs(), 0.0);
    std::vector<double> sums(cls.n_pairs(), 0.0);
    std::vector<std::uint64_t> hits(cls.n_pairs(), 0);
    for (const RegressionPoint& pt : data) {
      check_domain(cls, pt.s, pt.a);
      const int z = cls.pair_index(pt.s, pt.a);
      sums[z] += pt.target;
      hits[z] += 1;
    }
    for (int z = 0; z < cls.n_pairs(); ++z) {
      if (hits[z] == 0) continue;
      f.values[z] = std::clamp(sums[z] / static_cast<double>(hits[z]), -cls.W, cls.W);
    }
    return f;
  }

  Eigen::MatrixXd gram = lambda_reg * Eigen::MatrixXd::Identity(cls.d_feat, cls.d_feat);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cls.d_feat);
  for (const RegressionPoint& pt : data) {
    check_domain(cls, pt.s, pt.a);
    const auto p = phi_vec(cls, pt.s, pt.a);
    gram.noalias() += p * p.transpose();
    rhs.noalias() += pt.target * p;
  }
  Eigen::VectorXd theta = gram.colPivHouseholderQr().solve(rhs);
  const double norm = theta.norm();
  if (norm > cls.W) theta *= cls.W / norm;
  f.values.assign(theta.data(), theta.data() + cls.d_feat);
  return f;
}

double width(const FunctionClassHandle& cls, const SensitivityDataset& dataset, double epsilon,
             int s, int a) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("width requires epsilon > 0");
  check_domain(cls, s, a);
  const double cap = 2.0 * cls.W;

  if (cls.kind == ClassKind::tabular) {
    const std::uint64_t c = dataset.count(s, a);
    if (c == 0) return cap;
    return std::min(cap, std::sqrt(epsilon / static_cast<double>(c)));
  }

  // The norm constraint |dtheta| <= 2W folds into the dataset constraint as
  // a ridge term: |dtheta|^2_{Sigma + lam I} <= 2 epsilon with
  // lam = epsilon / (4 W^2), giving a conservative closed form.
  const double lam = epsilon / (4.0 * cls.W * cls.W);
  Eigen::MatrixXd m = second_moment(cls, dataset);
  m.diagonal().array() += lam;
  const auto p = phi_vec(cls, s, a);
  const double quad = p.dot(m.ldlt().solve(p));
  return std::min(cap, std::sqrt(2.0 * epsilon * std::max(0.0, quad)));
}

double sensitivity(const FunctionClassHandle& cls, const SensitivityDataset& dataset, int s,
                   int a, int N) {
  if (N < 1) throw std::invalid_argument("sensitivity requires N >= 1");
  check_domain(cls, s, a);
  const double w4 = 4.0 * cls.W * cls.W;

  if (cls.kind == ClassKind::tabular) {
    const double c = static_cast<double>(dataset.count(s, a));
    return w4 / (std::min(w4 * c, w4 * N) + 1.0);
  }

  // Exact sup over |dtheta| <= 2W of (phi.dtheta)^2 / (dtheta'Sigma dtheta + 1)
  // is the regularized leverage score; the floor covers the regime where the
  // norm cap in the denominator is active, keeping this an upper bound.
  Eigen::MatrixXd m = second_moment(cls, dataset);
  m.diagonal().array() += 1.0 / w4;
  const auto p = phi_vec(cls, s, a);
  const double leverage = p.dot(m.ldlt().solve(p));
  const double floor = w4 / (w4 * N + 1.0);
  return std::min(w4, std::max(leverage, floor));
}

double log_cover_size(const FunctionClassHandle& cls, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("cover radius must be positive");
  if (radius >= 2.0 * cls.W) return 0.0;
  if (cls.kind == ClassKind::tabular)
    return cls.n_pairs() * std::log(2.0 * cls.W / radius + 1.0);
  return cls.d_feat * std::log(1.0 + 4.0 * cls.W / radius);
}

double width_bruteforce(const FunctionClassHandle& cls, const SensitivityDataset& dataset,
                        double epsilon, int s, int a, double grid_step) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("width requires epsilon > 0");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  check_domain(cls, s, a);
  const double budget = epsilon * (1.0 + kFeasSlack);

  if (cls.kind == ClassKind::tabular) {
    if (cls.n_pairs() > 8) throw std::runtime_error("oracle scale exceeded");
    const int query = cls.pair_index(s, a);
    std::vector<int> dims = {query};
    std::vector<double> weight = {static_cast<double>(dataset.count(s, a))};
    for (int z = 0; z < cls.n_pairs(); ++z) {
      if (z != query && dataset.count(z / cls.n_actions, z % cls.n_actions) > 0) {
        dims.push_back(z);
        weight.push_back(static_cast<double>(dataset.counts[z]));
      }
    }

    std::vector<double> grid = grid_values(cls.W, grid_step);
    std::vector<double> by_small = grid;  // zero first for the non-query dims
    std::sort(by_small.begin(), by_small.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });

    // Depth-first over the weighted dims with budget pruning; dims the
    // dataset never saw contribute nothing to the norm and stay at 0.
    std::function<bool(std::size_t, double)> feasible = [&](std::size_t dim,
                                                            double used) -> bool {
      if (used > budget) return false;
      if (dim == dims.size()) return true;
      for (double v : by_small) {
        if (feasible(dim + 1, used + weight[dim] * v * v)) return true;
      }
      return false;
    };

    std::vector<double> by_large = grid;  // most extreme query values first
    std::sort(by_large.begin(), by_large.end(),
              [](double x, double y) { return std::abs(x) > std::abs(y); });
    for (double v : by_large) {
      if (feasible(1, weight[0] * v * v)) return std::abs(v);
    }
    return 0.0;
  }

  if (cls.d_feat > 3) throw std::runtime_error("oracle scale exceeded");
  const Eigen::MatrixXd sigma = second_moment(cls, dataset);
  const auto p = phi_vec(cls, s, a);
  const std::vector<double> grid = grid_values(cls.W, grid_step);
  const double norm_cap = 4.0 * cls.W * cls.W * (1.0 + kFeasSlack);

  double best = 0.0;
  Eigen::VectorXd theta(cls.d_feat);
  std::function<void(int, double)> walk = [&](int dim, double norm_sq) {
    if (norm_sq > norm_cap) return;
    if (dim == cls.d_feat) {
      if (theta.dot(sigma * theta) > budget) return;
      best = std::max(best, std::abs(theta.dot(p)));
      return;
    }
    for (double v : grid) {
      theta[dim] = v;
      walk(dim + 1, norm_sq + v * v);
    }
  };
  walk(0, 0.0);
  return best;
}

double sensitivity_bruteforce(const FunctionClassHandle& cls, const SensitivityDataset& dataset,
                              int s, int a, int N, double grid_step) {
  if (cls.kind != ClassKind::tabular)
    throw std::invalid_argument("sensitivity_bruteforce handles tabular classes only");
  if (N < 1) throw std::invalid_argument("sensitivity requires N >= 1");
  check_domain(cls, s, a);
  // Any mass placed off the query pair only inflates the dataset norm in the
  // denominator, so the sup concentrates on the query value alone.
  const double c = static_cast<double>(dataset.count(s, a));
  const double cap = 4.0 * cls.W * cls.W * N;
  double best = 0.0;
  for (double v : grid_values(cls.W, grid_step)) {
    best = std::max(best, v * v / (std::min(c * v * v, cap) + 1.0));
  }
  return best;
}

double sensitivity_bruteforce_sampled(const FunctionClassHandle& cls,
                                      const SensitivityDataset& dataset, int s, int a, int N,
                                      int n_samples, Rng& rng) {
  if (cls.kind != ClassKind::linear)
    throw std::invalid_argument("sampled sensitivity oracle handles linear classes only");
  if (N < 1) throw std::invalid_argument("sensitivity requires N >= 1");
  check_domain(cls, s, a);

  const Eigen::MatrixXd sigma = second_moment(cls, dataset);
  const auto p = phi_vec(cls, s, a);
  const double radius = 2.0 * cls.W;
  const double cap = 4.0 * cls.W * cls.W * N;

  auto normal = [&rng]() {
    double u = rng.uniform01();
    while (u <= 0.0) u = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * rng.uniform01());
  };

  double best = 0.0;
  Eigen::VectorXd dtheta(cls.d_feat);
  for (int i = 0; i < n_samples; ++i) {
    for (int j = 0; j < cls.d_feat; ++j) dtheta[j] = normal();
    const double n = dtheta.norm();
    if (n == 0.0) continue;
    dtheta *= radius * std::pow(rng.uniform01(), 1.0 / cls.d_feat) / n;
    const double num = dtheta.dot(p);
    best = std::max(best, num * num / (std::min(dtheta.dot(sigma * dtheta), cap) + 1.0));
  }
  return best;
}

}  // namespace lpo
