#pragma once

#include "splitsim/types.hpp"

namespace splitsim {

/// Scores one sample for a given splitting layer.
///
/// If the confidence at the splitting layer clears the threshold (ties exit
/// locally), or the splitting layer is the final layer L, the sample is
/// inferred on the edge:
///
///   reward = C_arm - mu * gamma_arm,   raw cost = gamma_arm.
///
/// Otherwise it is offloaded and inferred at the final layer in the cloud:
///
///   reward = C_L - mu * (gamma_arm + o),   raw cost = gamma_arm + o.
///
/// Correctness is taken at the inference point actually used. Pure function;
/// throws ContractViolation for an arm outside the profile and
/// ValidationError for malformed samples.
inline StepOutcome reward(const SampleRecord& sample, int arm,
                          const ExitProfile& profile,
                          const CostParams& params) {
  const std::size_t idx = profile.index_of(arm);
  validate_record(sample, profile);

  const double gamma_arm = profile.lambda() * static_cast<double>(arm);
  const double conf_arm = sample.confidence[idx];

  StepOutcome out;
  out.arm = arm;
  if (conf_arm >= params.alpha || arm == profile.final_layer()) {
    out.exited_locally = true;
    out.reward = conf_arm - params.mu * gamma_arm;
    out.raw_cost = gamma_arm;
    out.correct = sample.correct[idx] != 0;
  } else {
    const std::size_t last = profile.arm_count() - 1;
    out.exited_locally = false;
    out.reward = sample.confidence[last] -
                 params.mu * (gamma_arm + params.offload_cost);
    out.raw_cost = gamma_arm + params.offload_cost;
    out.correct = sample.correct[last] != 0;
  }
  return out;
}

/// Per-sample cost of running the whole backbone on the edge, gamma_L.
/// This is the 100% base for percentage-cost reporting.
inline double raw_cost_final_layer(const ExitProfile& profile) {
  return profile.lambda() * static_cast<double>(profile.final_layer());
}

}  // namespace splitsim
