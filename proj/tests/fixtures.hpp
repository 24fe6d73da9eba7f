#pragma once

// Pinned synthetic-trace configurations shared by the unit and acceptance
// suites. The constants are calibrated against the expectations that cite
// them; change them only together with those tests.

#include <numbers>

#include "splitsim/tracegen.hpp"
#include "splitsim/types.hpp"

namespace splitsim::fixtures {

// Two arms with an oracle reward gap of 0.100 +- 0.002 over 100k samples:
// alpha 0 keeps every sample local, so the deeper arm's confidence edge
// (+0.20035) never pays for its extra compute (+0.3). The low concentration
// gives wide, U-shaped confidence noise.
inline GeneratorConfig two_arm(std::uint64_t seed, std::size_t n_samples) {
  GeneratorConfig cfg;
  cfg.profile = ExitProfile({3, 6}, 0.1);
  cfg.n_samples = n_samples;
  cfg.base_confidence = 0.65;
  cfg.depth_gain = 0.20035;
  cfg.noise_penalty = 0.0;
  cfg.concentration = 0.6;
  cfg.seed = seed;
  return cfg;
}

inline CostParams two_arm_params() {
  return CostParams{0.0, 1.0, 1.0, std::numbers::sqrt2_v<double>};
}

// Monotone fixture: confidence climbs steeply with depth, so the offload
// escape loses value as o grows and the optimal splitting layer moves deeper
// (3 at o <= 0.6, 6 from o = 0.8 on), with runner-up gaps >= 0.04 at every
// grid point.
inline GeneratorConfig monotone(std::uint64_t seed, std::size_t n_samples) {
  GeneratorConfig cfg;
  cfg.profile = ExitProfile({3, 6, 9, 12, 15, 18, 20}, 0.1);
  cfg.n_samples = n_samples;
  cfg.sigma = 1.0;
  cfg.base_confidence = 0.65;
  cfg.depth_gain = 0.12;
  cfg.noise_penalty = 0.1;
  cfg.concentration = 90.0;
  cfg.seed = seed;
  return cfg;
}

inline CostParams monotone_params(double offload_cost) {
  return CostParams{0.6, 1.0, offload_cost, std::numbers::sqrt2_v<double>};
}

// Drift fixture: undistorted halves favour splitting at layer 3, heavily
// distorted halves at layer 9. The expensive offload (o = 2) makes the old
// best arm collapse hard after the switch, which is what lets a lifetime-mean
// UCB recover within the second half.
inline GeneratorConfig drift_half(double sigma, std::uint64_t seed,
                                  std::size_t n_samples) {
  GeneratorConfig cfg;
  cfg.profile = ExitProfile({3, 6, 9, 12, 15, 18, 20}, 0.1);
  cfg.n_samples = n_samples;
  cfg.sigma = sigma;
  cfg.base_confidence = 0.8;
  cfg.depth_gain = 0.26;
  cfg.noise_penalty = 1.0 / 6.0;
  cfg.concentration = 40.0;
  cfg.seed = seed;
  return cfg;
}

inline CostParams drift_params() {
  return CostParams{0.6, 1.0, 2.0, std::numbers::sqrt2_v<double>};
}

}  // namespace splitsim::fixtures
