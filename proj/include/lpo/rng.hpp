#pragma once

#include <cmath>
#include <cstdint>

namespace lpo {

// Deterministic 64-bit generator (splitmix64 steps). std::* distributions are
// avoided on purpose: their algorithms differ across standard libraries and
// the test fixtures freeze exact sample paths.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // index drawn proportionally to the nonnegative weights p[0..n)
  int discrete(const double* p, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += p[i];
    if (total <= 0.0) return 0;
    const double u = uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
      if (p[i] <= 0.0) continue;
      last_positive = i;
      acc += p[i];
      if (u < acc) return i;
    }
    return last_positive;  // rounding fell off the end
  }

  // geometric stop time, P(t) = gamma^(t-1)(1-gamma), truncated at cap
  int geometric(double gamma, int cap) {
    const double u = uniform01();
    // inverse CDF: smallest t with 1 - gamma^t > u
    double t = 1.0 + std::floor(std::log1p(-u) / std::log(gamma));
    if (!(t >= 1.0)) t = 1.0;
    if (t > static_cast<double>(cap)) return cap;
    return static_cast<int>(t);
  }

  // independent child stream; does not advance the parent
  Rng derive(std::uint64_t stream) const {
    std::uint64_t x = state_ ^ (0xBF58476D1CE4E5B9ull * (stream + 1));
    x ^= x >> 31;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 29;
    return Rng(x);
  }

 private:
  std::uint64_t state_;
};

}  // namespace lpo
