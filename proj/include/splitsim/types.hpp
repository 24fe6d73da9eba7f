#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitsim {

/// Bad data or parameter values (out-of-range confidence, empty trace, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse: an arm that is not in the profile, selection before the
/// initialization plays are done, mismatched report/oracle pairs.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The arm set: exit layer indices of the backbone, deepest one last.
///
/// The compute cost of splitting at layer i is lambda * i; the deepest entry
/// is the final layer L, which can never offload.
class ExitProfile {
 public:
  /// Default profile: exits {3, 6, 9, 12, 15, 18, 20} at 0.1 cost per layer.
  ExitProfile() : ExitProfile({3, 6, 9, 12, 15, 18, 20}, 0.1) {}

  ExitProfile(std::vector<int> exit_layers, double lambda)
      : exit_layers_(std::move(exit_layers)), lambda_(lambda) {
    if (exit_layers_.empty())
      throw ValidationError("exit profile: no exit layers");
    if (exit_layers_.front() < 1)
      throw ValidationError("exit profile: layer indices must be >= 1");
    for (std::size_t i = 1; i < exit_layers_.size(); ++i) {
      if (exit_layers_[i] <= exit_layers_[i - 1])
        throw ValidationError("exit profile: layers must be strictly increasing");
    }
    if (!std::isfinite(lambda_) || lambda_ < 0.0)
      throw ValidationError("exit profile: lambda must be finite and >= 0");
  }

  const std::vector<int>& exit_layers() const noexcept { return exit_layers_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t arm_count() const noexcept { return exit_layers_.size(); }

  /// The final layer L (deepest exit; a member of the arm set).
  int final_layer() const noexcept { return exit_layers_.back(); }

  bool contains(int layer) const noexcept {
    return std::binary_search(exit_layers_.begin(), exit_layers_.end(), layer);
  }

  /// Position of `layer` in the arm set; throws ContractViolation if absent.
  std::size_t index_of(int layer) const {
    auto it = std::lower_bound(exit_layers_.begin(), exit_layers_.end(), layer);
    if (it == exit_layers_.end() || *it != layer)
      throw ContractViolation("arm " + std::to_string(layer) +
                              " is not in the exit profile");
    return static_cast<std::size_t>(it - exit_layers_.begin());
  }

  /// gamma_i = lambda * i for a layer in the arm set.
  double compute_cost(int layer) const {
    index_of(layer);  // membership check
    return lambda_ * static_cast<double>(layer);
  }

  friend bool operator==(const ExitProfile& a, const ExitProfile& b) {
    return a.exit_layers_ == b.exit_layers_ && a.lambda_ == b.lambda_;
  }

 private:
  std::vector<int> exit_layers_;
  double lambda_;
};

/// Economic knobs of the reward function and the UCB policy.
struct CostParams {
  double alpha = 0.6;                       ///< confidence threshold, >= 0
  double mu = 1.0;                          ///< accuracy-to-cost conversion factor
  double offload_cost = 1.0;                ///< o, edge-to-cloud communication cost
  double beta = std::numbers::sqrt2_v<double>;  ///< exploration weight, >= 1

  void validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0)
      throw ValidationError("params: alpha must be finite and >= 0");
    if (!std::isfinite(mu) || mu < 0.0)
      throw ValidationError("params: mu must be finite and >= 0");
    if (!std::isfinite(offload_cost) || offload_cost < 0.0)
      throw ValidationError("params: offload cost must be finite and >= 0");
    if (!std::isfinite(beta) || beta < 1.0)
      throw ValidationError("params: beta must be finite and >= 1");
  }
};

/// One inference instance: per-exit confidence and correctness, positionally
/// aligned with the companion ExitProfile's exit_layers().
struct SampleRecord {
  std::int64_t id = 0;
  std::vector<double> confidence;
  std::vector<std::uint8_t> correct;
};

/// Checks that a record covers the arm set and has confidences in [0, 1].
inline void validate_record(const SampleRecord& sample,
                            const ExitProfile& profile) {
  if (sample.confidence.size() != profile.arm_count() ||
      sample.correct.size() != profile.arm_count())
    throw ValidationError("sample " + std::to_string(sample.id) +
                          " does not cover the arm set");
  for (double c : sample.confidence) {
    if (!(c >= 0.0 && c <= 1.0))
      throw ValidationError("sample " + std::to_string(sample.id) +
                            ": confidence outside [0, 1]");
  }
}

/// Outcome of one simulated round.
struct StepOutcome {
  std::int64_t round = 0;  ///< 1-based
  int arm = 0;             ///< splitting layer chosen this round
  bool exited_locally = false;
  double reward = 0.0;
  double raw_cost = 0.0;   ///< gamma_arm, plus offload cost when offloaded
  bool correct = false;    ///< at the inference point actually used
};

}  // namespace splitsim
