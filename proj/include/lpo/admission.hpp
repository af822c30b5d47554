#pragma once

#include <cstdint>
#include <string>

#include "lpo/dataset.hpp"
#include "lpo/function_class.hpp"
#include "lpo/rng.hpp"

namespace lpo {

struct AdmissionDecision {
  double sensitivity_raw = 0.0;
  double s_z = 0.0;                       // factored score C * sens * log term
  std::uint64_t copies_if_admitted = 1;
  bool admitted = false;
  double coin = 0.0;
};

// One streaming admission attempt: compute the sensitivity factor of z, then
// either add one copy deterministically (s_z >= 1) or add floor(1/s_z)
// copies with probability 1/floor(1/s_z). The coin is always drawn so the
// consumed randomness per attempt is fixed.
AdmissionDecision admit(SensitivityDataset& dataset, const FunctionClassHandle& cls, int s,
                        int a, Rng& rng);

// Weighted squared dataset norm of f1 - f2.
double z_norm_sq(const SensitivityDataset& dataset, const FunctionHandle& f1,
                 const FunctionHandle& f2);

bool switch_occurred(const SensitivityDataset& dataset, std::uint64_t last_seen_version);

// Upper bound on how often the dataset can change over a horizon of N:
// C_budget * log_cover * d_eluder * ln(N)^2. The log_cover argument is the
// whole covering/log multiplier; W and delta are validated but the caller
// folds them into log_cover.
double switch_budget(double d_eluder, int N, double W, double delta, double log_cover,
                     double C_budget);

// Snapshot as JSON lines {"s":..,"a":..,"count":..} for resume and analysis.
void save_dataset_snapshot(const std::string& path, const SensitivityDataset& dataset);

}  // namespace lpo
