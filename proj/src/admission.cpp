#include "lpo/admission.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lpo {

AdmissionDecision admit(SensitivityDataset& dataset, const FunctionClassHandle& cls, int s,
                        int a, Rng& rng) {
  if (cls.n_states != dataset.n_states || cls.n_actions != dataset.n_actions)
    throw std::invalid_argument("dataset and class domains disagree");

  const int N = dataset.config.N_budget;
  const double delta = dataset.config.delta;

  AdmissionDecision d;
  d.sensitivity_raw = sensitivity(cls, dataset, s, a, N);
  const double radius = std::sqrt(delta / (64.0 * std::pow(static_cast<double>(N), 3)));
  const double log_mult = std::log(static_cast<double>(N) / delta) + log_cover_size(cls, radius);
  d.s_z = dataset.config.C_mult * d.sensitivity_raw * log_mult;
  d.coin = rng.uniform01();

  if (d.s_z >= 1.0) {
    d.copies_if_admitted = 1;
    d.admitted = true;
  } else if (d.s_z > 0.0) {
    const double inv = 1.0 / d.s_z;
    // stay clear of the uint64 range before flooring
    d.copies_if_admitted =
        inv >= 9.0e18 ? static_cast<std::uint64_t>(9.0e18) : static_cast<std::uint64_t>(inv);
    d.admitted = d.coin < 1.0 / static_cast<double>(d.copies_if_admitted);
  } else {
    // a zero score never happens for the implemented classes (sensitivity is
    // strictly positive); treat it defensively as a rejection
    d.copies_if_admitted = 1;
    d.admitted = false;
  }

  if (d.admitted) {
    dataset.counts[static_cast<std::size_t>(s) * dataset.n_actions + a] += d.copies_if_admitted;
    dataset.version += 1;
    dataset.total_admissions += 1;
  }
  return d;
}

double z_norm_sq(const SensitivityDataset& dataset, const FunctionHandle& f1,
                 const FunctionHandle& f2) {
  double acc = 0.0;
  for (int s = 0; s < dataset.n_states; ++s) {
    for (int a = 0; a < dataset.n_actions; ++a) {
      const std::uint64_t c = dataset.count(s, a);
      if (c == 0) continue;
      const double diff = evaluate(f1, s, a) - evaluate(f2, s, a);
      acc += static_cast<double>(c) * diff * diff;
    }
  }
  return acc;
}

bool switch_occurred(const SensitivityDataset& dataset, std::uint64_t last_seen_version) {
  return dataset.version > last_seen_version;
}

double switch_budget(double d_eluder, int N, double W, double delta, double log_cover,
                     double C_budget) {
  if (!(d_eluder > 0.0) || N < 1 || !(W > 0.0) || !(delta > 0.0) || !(log_cover > 0.0) ||
      !(C_budget > 0.0))
    throw std::invalid_argument("switch_budget arguments must be positive");
  const double ln_n = std::log(static_cast<double>(N));
  return C_budget * log_cover * d_eluder * ln_n * ln_n;
}

void save_dataset_snapshot(const std::string& path, const SensitivityDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (int s = 0; s < dataset.n_states; ++s) {
    for (int a = 0; a < dataset.n_actions; ++a) {
      const std::uint64_t c = dataset.count(s, a);
      if (c == 0) continue;
      out << "{\"s\":" << s << ",\"a\":" << a << ",\"count\":" << c << "}\n";
    }
  }
}

}  // namespace lpo
