#pragma once

#include "splitsim/policy.hpp"
#include "splitsim/reward.hpp"
#include "splitsim/types.hpp"

namespace splitsim {

/// Full-information view of a trace: empirical expected reward of every arm,
/// the optimal arm i*, and the per-arm gaps to it.
struct OracleResult {
  std::vector<int> arms;            ///< exit layers, ascending
  std::vector<double> mean_reward;  ///< empirical E[r(i)] over the whole trace
  int best_arm = 0;                 ///< i*, ties broken toward the lowest layer
  std::vector<double> gaps;         ///< Delta_i = mean_reward[i*] - mean_reward[i]

  std::size_t index_of(int arm) const {
    for (std::size_t i = 0; i < arms.size(); ++i)
      if (arms[i] == arm) return i;
    throw ContractViolation("arm " + std::to_string(arm) +
                            " unknown to the oracle");
  }
};

/// Brute-force per-arm empirical mean reward: every sample scored at every
/// arm. Invariant to trace order.
inline OracleResult per_arm_means(const std::vector<SampleRecord>& trace,
                                  const ExitProfile& profile,
                                  const CostParams& params) {
  if (trace.empty()) throw ValidationError("oracle: empty trace");

  OracleResult result;
  result.arms = profile.exit_layers();
  result.mean_reward.assign(profile.arm_count(), 0.0);

  for (const SampleRecord& sample : trace) {
    for (std::size_t i = 0; i < result.arms.size(); ++i)
      result.mean_reward[i] += reward(sample, result.arms[i], profile, params).reward;
  }
  const auto n = static_cast<double>(trace.size());
  for (double& m : result.mean_reward) m /= n;

  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < result.mean_reward.size(); ++i)
    if (result.mean_reward[i] > result.mean_reward[best_idx]) best_idx = i;
  result.best_arm = result.arms[best_idx];

  result.gaps.resize(result.arms.size());
  for (std::size_t i = 0; i < result.arms.size(); ++i)
    result.gaps[i] = result.mean_reward[best_idx] - result.mean_reward[i];
  return result;
}

/// Cumulative pseudo-regret of a run: at each round the gap of the arm the
/// policy actually chose, summed. Non-negative and non-decreasing.
inline std::vector<double> pseudo_regret(const RunReport& report,
                                         const OracleResult& oracle) {
  std::vector<double> series;
  series.reserve(report.outcomes.size());
  double cumulative = 0.0;
  for (const StepOutcome& out : report.outcomes) {
    cumulative += oracle.gaps[oracle.index_of(out.arm)];
    series.push_back(cumulative);
  }
  return series;
}

}  // namespace splitsim
