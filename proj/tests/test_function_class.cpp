#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpo/function_class.hpp"

using namespace lpo;

namespace {

SensitivityDataset empty_dataset(int S, int A, double W = 1.0) {
  return SensitivityDataset(S, A, DatasetConfig{1.0, 0.05, 100, W});
}

FunctionClassHandle one_hot_linear(int S, int A, double W) {
  const int d = S * A;
  std::vector<double> phi(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) phi[static_cast<std::size_t>(i) * d + i] = 1.0;
  return FunctionClassHandle::make_linear(S, A, W, d, std::move(phi));
}

}  // namespace

TEST_CASE("tabular width closed form") {
  FunctionClassHandle cls = FunctionClassHandle::make_tabular(2, 2, 1.0);
  SensitivityDataset ds = empty_dataset(2, 2);

  CHECK(width(cls, ds, 1.0, 0, 0) == doctest::Approx(2.0));  // no data: full diameter

  ds.counts[cls.pair_index(0, 0)] = 4;
  CHECK(width(cls, ds, 1.0, 0, 0) == doctest::Approx(0.5));
  CHECK(width(cls, ds, 1.0, 0, 1) == doctest::Approx(2.0));  // other pairs unconstrained

  // the 2W cap binds when the budget is generous
  ds.counts[cls.pair_index(0, 0)] = 1;
  CHECK(width(cls, ds, 100.0, 0, 0) == doctest::Approx(2.0));

  CHECK_THROWS_WITH_AS(width(cls, ds, 0.0, 0, 0), "width requires epsilon > 0",
                       std::invalid_argument);
}

TEST_CASE("tabular sensitivity closed form") {
  FunctionClassHandle cls = FunctionClassHandle::make_tabular(2, 2, 1.0);
  SensitivityDataset ds = empty_dataset(2, 2);

  CHECK(sensitivity(cls, ds, 0, 0, 100) == doctest::Approx(4.0));

  ds.counts[cls.pair_index(0, 0)] = 1;
  CHECK(sensitivity(cls, ds, 0, 0, 100) == doctest::Approx(0.8));

  ds.counts[cls.pair_index(0, 0)] = 5;
  CHECK(sensitivity(cls, ds, 0, 0, 2) == doctest::Approx(4.0 / 9.0));  // N cap binds

  SUBCASE("strictly decreasing in the count until the N cap") {
    SensitivityDataset d2 = empty_dataset(2, 2);
    double prev = sensitivity(cls, d2, 1, 1, 1000);
    for (std::uint64_t c = 1; c <= 12; ++c) {
      d2.counts[cls.pair_index(1, 1)] = c;
      const double cur = sensitivity(cls, d2, 1, 1, 1000);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("log cover size") {
  FunctionClassHandle tab = FunctionClassHandle::make_tabular(3, 2, 1.0);
  CHECK(log_cover_size(tab, 0.5) == doctest::Approx(6.0 * std::log(5.0)));
  CHECK(log_cover_size(tab, 2.0) == doctest::Approx(0.0));   // radius covers the diameter
  CHECK(log_cover_size(tab, 10.0) == doctest::Approx(0.0));

  FunctionClassHandle lin = one_hot_linear(2, 2, 1.0);
  CHECK(log_cover_size(lin, 1.0) == doctest::Approx(4.0 * std::log(5.0)));

  CHECK_THROWS_AS(log_cover_size(tab, 0.0), std::invalid_argument);
}

TEST_CASE("least squares fit") {
  FunctionClassHandle cls = FunctionClassHandle::make_tabular(2, 2, 1.0);

  SUBCASE("per-pair mean") {
    FunctionClassHandle wide = FunctionClassHandle::make_tabular(2, 2, 10.0);
    FunctionHandle f = fit_least_squares(wide, {{0, 0, 1.0}, {0, 0, 3.0}, {1, 1, -2.0}});
    CHECK(evaluate(f, 0, 0) == doctest::Approx(2.0));
    CHECK(evaluate(f, 1, 1) == doctest::Approx(-2.0));
    CHECK(evaluate(f, 0, 1) == doctest::Approx(0.0));  // unobserved defaults to zero
  }

  SUBCASE("sup-norm projection") {
    FunctionHandle f = fit_least_squares(cls, {{0, 0, 5.0}, {1, 0, -7.0}});
    CHECK(evaluate(f, 0, 0) == doctest::Approx(1.0));
    CHECK(evaluate(f, 1, 0) == doctest::Approx(-1.0));
  }

  SUBCASE("linear one-dimensional") {
    std::vector<double> phi = {1.0, 1.0, 1.0, 1.0};
    FunctionClassHandle lin = FunctionClassHandle::make_linear(2, 2, 10.0, 1, std::move(phi));
    FunctionHandle f = fit_least_squares(lin, {{0, 0, 1.0}, {1, 1, 3.0}}, 0.0);
    CHECK(evaluate(f, 0, 1) == doctest::Approx(2.0));
  }

  SUBCASE("empty data rejected") {
    CHECK_THROWS_WITH_AS(fit_least_squares(cls, {}), "no regression data",
                         std::invalid_argument);
  }

  SUBCASE("realizable tabular targets reproduced") {
    Rng rng(5);
    FunctionClassHandle wide = FunctionClassHandle::make_tabular(3, 2, 4.0);
    std::vector<RegressionPoint> pts;
    std::vector<double> want(6);
    for (int i = 0; i < 6; ++i) {
      want[i] = 8.0 * rng.uniform01() - 4.0;
      pts.push_back({i / 2, i % 2, want[i]});
    }
    FunctionHandle f = fit_least_squares(wide, pts);
    for (int i = 0; i < 6; ++i) CHECK(evaluate(f, i / 2, i % 2) == doctest::Approx(want[i]));
  }
}

TEST_CASE("width is monotone in the dataset and bounded") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int S = 1 + static_cast<int>(rng.next_u64() % 3);
    const int A = 2;
    const double W = 0.5 + 3.0 * rng.uniform01();
    FunctionClassHandle cls = FunctionClassHandle::make_tabular(S, A, W);
    SensitivityDataset ds = empty_dataset(S, A, W);
    const double eps = 0.2 + rng.uniform01();
    const int qs = static_cast<int>(rng.next_u64() % S);
    const int qa = static_cast<int>(rng.next_u64() % A);
    double prev = width(cls, ds, eps, qs, qa);
    for (int add = 0; add < 8; ++add) {
      const int idx = static_cast<int>(rng.next_u64() % (S * A));
      ds.counts[idx] += 1;
      const double cur = width(cls, ds, eps, qs, qa);
      CHECK(cur <= prev + 1e-12);
      CHECK(cur >= 0.0);
      CHECK(cur <= 2.0 * W + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("sensitivity stays in (0, 4W^2]") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double W = 0.5 + 2.0 * rng.uniform01();
    FunctionClassHandle cls = FunctionClassHandle::make_tabular(2, 2, W);
    SensitivityDataset ds = empty_dataset(2, 2, W);
    for (auto& c : ds.counts) c = rng.next_u64() % 10;
    const double s = sensitivity(cls, ds, 0, 1, 1 + static_cast<int>(rng.next_u64() % 50));
    CHECK(s > 0.0);
    CHECK(s <= 4.0 * W * W + 1e-12);
  }
}

TEST_CASE("tabular closed forms match brute force") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int S = 1 + static_cast<int>(rng.next_u64() % 4);
    const int A = 2;
    const double W = 0.5 + 1.5 * rng.uniform01();
    const double grid = 1e-3;
    FunctionClassHandle cls = FunctionClassHandle::make_tabular(S, A, W);
    SensitivityDataset ds = empty_dataset(S, A, W);
    for (auto& c : ds.counts) c = rng.next_u64() % 5;
    const int qs = static_cast<int>(rng.next_u64() % S);
    const int qa = static_cast<int>(rng.next_u64() % A);
    const double eps = 0.1 + rng.uniform01();

    const double w_closed = width(cls, ds, eps, qs, qa);
    const double w_brute = width_bruteforce(cls, ds, eps, qs, qa, grid);
    CHECK(std::abs(w_closed - w_brute) <= 2.0 * grid);

    const int N = 1 + static_cast<int>(rng.next_u64() % 30);
    const double s_closed = sensitivity(cls, ds, qs, qa, N);
    const double s_brute = sensitivity_bruteforce(cls, ds, qs, qa, N, grid);
    CHECK(std::abs(s_closed - s_brute) <= 2.0 * grid * (4.0 * W + 1.0));
  }
}

TEST_CASE("linear closed forms dominate sampled search") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int S = 2;
    const int A = 2;
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const double W = 0.5 + 1.5 * rng.uniform01();
    std::vector<double> phi(static_cast<std::size_t>(S) * A * d);
    for (auto& x : phi) x = 2.0 * rng.uniform01() - 1.0;
    FunctionClassHandle cls = FunctionClassHandle::make_linear(S, A, W, d, std::move(phi));
    SensitivityDataset ds = empty_dataset(S, A, W);
    for (auto& c : ds.counts) c = rng.next_u64() % 4;
    const int qs = static_cast<int>(rng.next_u64() % S);
    const int qa = static_cast<int>(rng.next_u64() % A);

    const double eps = 0.1 + rng.uniform01();
    const double w_closed = width(cls, ds, eps, qs, qa);
    const double w_brute = width_bruteforce(cls, ds, eps, qs, qa, 5e-2);
    CHECK(w_brute <= w_closed + 1e-9);

    const int N = 1 + static_cast<int>(rng.next_u64() % 30);
    const double s_closed = sensitivity(cls, ds, qs, qa, N);
    Rng sub = rng.derive(trial);
    const double s_sampled = sensitivity_bruteforce_sampled(cls, ds, qs, qa, N, 2000, sub);
    CHECK(s_sampled <= s_closed + 1e-9);
  }
}

TEST_CASE("one-hot linear features reduce to the tabular forms") {
  const double W = 1.5;
  FunctionClassHandle tab = FunctionClassHandle::make_tabular(2, 2, W);
  FunctionClassHandle lin = one_hot_linear(2, 2, W);
  SensitivityDataset ds = empty_dataset(2, 2, W);
  ds.counts[0] = 3;
  ds.counts[3] = 1;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) {
      CHECK(sensitivity(lin, ds, s, a, 50) ==
            doctest::Approx(sensitivity(tab, ds, s, a, 50)).epsilon(1e-9));
    }
}

TEST_CASE("scale guards") {
  FunctionClassHandle big = FunctionClassHandle::make_tabular(5, 2, 1.0);  // 10 pairs
  SensitivityDataset ds = empty_dataset(5, 2);
  CHECK_THROWS_WITH_AS(width_bruteforce(big, ds, 1.0, 0, 0, 1e-2), "oracle scale exceeded",
                       std::runtime_error);

  std::vector<double> phi(static_cast<std::size_t>(4) * 4, 0.1);
  FunctionClassHandle wide = FunctionClassHandle::make_linear(2, 2, 1.0, 4, std::move(phi));
  CHECK_THROWS_WITH_AS(width_bruteforce(wide, ds, 1.0, 0, 0, 1e-2), "oracle scale exceeded",
                       std::runtime_error);

  CHECK_THROWS_AS(sensitivity_bruteforce(wide, ds, 0, 0, 10, 1e-2), std::invalid_argument);
}

TEST_CASE("feature rescaling preserves the sup-norm bound") {
  std::vector<double> phi = {3.0, 4.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0};  // norms 5,0,1,1
  FunctionClassHandle cls = FunctionClassHandle::make_linear(2, 2, 2.0, 2, std::move(phi));
  double m = 0.0;
  for (int p = 0; p < cls.n_pairs(); ++p) {
    double n2 = 0.0;
    for (int j = 0; j < cls.d_feat; ++j) n2 += cls.features[p * cls.d_feat + j] *
                                               cls.features[p * cls.d_feat + j];
    m = std::max(m, n2);
  }
  CHECK(m <= 1.0 + 1e-12);
  // all norms shrink by the same factor, so ratios survive
  CHECK(cls.features[0] / cls.features[1] == doctest::Approx(3.0 / 4.0));
}
