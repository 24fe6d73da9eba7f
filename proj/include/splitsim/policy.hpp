#pragma once

#include <limits>
#include <memory>
#include <random>
#include <string>
#include <string_view>

#include "splitsim/reward.hpp"
#include "splitsim/types.hpp"

namespace splitsim {

/// Sufficient statistics of the UCB policy: per-arm mean reward Q(i), pull
/// counts N(i), and the round counter t (initialization plays included).
struct UcbState {
  std::vector<int> arms;           ///< exit layers, ascending
  std::vector<double> q;           ///< empirical mean reward per arm
  std::vector<std::int64_t> n;     ///< pull counts per arm
  std::int64_t t = 0;
  double beta = 1.0;

  UcbState(const ExitProfile& profile, double beta_value)
      : arms(profile.exit_layers()),
        q(profile.arm_count(), 0.0),
        n(profile.arm_count(), 0),
        beta(beta_value) {}

  std::size_t index_of(int arm) const {
    for (std::size_t i = 0; i < arms.size(); ++i)
      if (arms[i] == arm) return i;
    throw ContractViolation("arm " + std::to_string(arm) +
                            " unknown to the UCB state");
  }
};

namespace detail {

// Running-mean absorption of one reward; does not advance the round counter.
inline void absorb_reward(UcbState& state, std::size_t idx, double value) {
  if (!std::isfinite(value))
    throw ValidationError("non-finite reward fed to the UCB state");
  state.n[idx] += 1;
  state.q[idx] += (value - state.q[idx]) / static_cast<double>(state.n[idx]);
}

}  // namespace detail

/// The UCB index argmax: arg max_i Q(i) + beta * sqrt(ln(t) / N(i)), with
/// state.t read as the current 1-based round number. Ties break toward the
/// lowest layer index. Requires every arm to have been played at least once.
inline int ucb_select(const UcbState& state) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  const double log_t = std::log(static_cast<double>(state.t));
  for (std::size_t i = 0; i < state.arms.size(); ++i) {
    if (state.n[i] < 1)
      throw ContractViolation("ucb_select before initialization is complete");
    const double bonus =
        state.beta * std::sqrt(log_t / static_cast<double>(state.n[i]));
    const double index = state.q[i] + bonus;
    if (index > best) {
      best = index;
      best_idx = i;
    }
  }
  return state.arms[best_idx];
}

/// Folds one observed reward into Q and N and advances the round counter.
inline void ucb_update(UcbState& state, int arm, double reward_value) {
  detail::absorb_reward(state, state.index_of(arm), reward_value);
  state.t += 1;
}

enum class PolicyKind { ISplitEE, FinalLayer, RandomExit, EarlyExitCascade };

inline std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ISplitEE: return "isplitee";
    case PolicyKind::FinalLayer: return "final";
    case PolicyKind::RandomExit: return "random";
    case PolicyKind::EarlyExitCascade: return "cascade";
  }
  return "unknown";
}

inline PolicyKind policy_kind_from_string(std::string_view name) {
  if (name == "isplitee") return PolicyKind::ISplitEE;
  if (name == "final") return PolicyKind::FinalLayer;
  if (name == "random") return PolicyKind::RandomExit;
  if (name == "cascade") return PolicyKind::EarlyExitCascade;
  throw ValidationError("unknown policy '" + std::string(name) + "'");
}

/// Sequential splitting policy: pick an arm each round, optionally learn from
/// the observed reward.
class SplitPolicy {
 public:
  virtual ~SplitPolicy() = default;
  virtual int choose(const SampleRecord& sample) = 0;
  virtual void observe(int /*arm*/, double /*reward_value*/) {}
  virtual std::string_view name() const = 0;
};

/// The I-SplitEE policy: plays each arm once in arm-set order, then follows
/// the UCB index.
class UcbSplitPolicy final : public SplitPolicy {
 public:
  UcbSplitPolicy(const ExitProfile& profile, const CostParams& params)
      : state_(profile, params.beta) {}

  int choose(const SampleRecord&) override {
    state_.t += 1;  // round begins; t is now the current round number
    const auto arm_count = static_cast<std::int64_t>(state_.arms.size());
    if (state_.t <= arm_count)
      return state_.arms[static_cast<std::size_t>(state_.t - 1)];
    return ucb_select(state_);
  }

  void observe(int arm, double reward_value) override {
    // The round was counted in choose(); only fold the reward in.
    detail::absorb_reward(state_, state_.index_of(arm), reward_value);
  }

  std::string_view name() const override { return "isplitee"; }
  const UcbState& state() const noexcept { return state_; }

 private:
  UcbState state_;
};

/// Plays one arm forever. Covers the final-layer baseline, the random-exit
/// baseline (arm drawn once per run), and pinned-arm diagnostics.
class FixedArmPolicy final : public SplitPolicy {
 public:
  FixedArmPolicy(int arm, std::string name) : arm_(arm), name_(std::move(name)) {}

  int choose(const SampleRecord&) override { return arm_; }
  std::string_view name() const override { return name_; }
  int arm() const noexcept { return arm_; }

 private:
  int arm_;
  std::string name_;
};

/// Draws the fixed arm uniformly from the arm set, then exploits it for the
/// whole run.
inline FixedArmPolicy make_random_exit_policy(const ExitProfile& profile,
                                              std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const auto idx =
      static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(profile.arm_count()));
  return FixedArmPolicy(profile.exit_layers()[idx], "random");
}

/// Classic early-exit cascade: walk the exits in increasing depth and stop at
/// the first one whose confidence clears the threshold, else infer at the
/// final layer. Entirely on-device.
class CascadePolicy final : public SplitPolicy {
 public:
  CascadePolicy(const ExitProfile& profile, const CostParams& params)
      : profile_(profile), alpha_(params.alpha) {}

  int choose(const SampleRecord& sample) override {
    validate_record(sample, profile_);
    for (std::size_t i = 0; i + 1 < profile_.arm_count(); ++i) {
      if (sample.confidence[i] >= alpha_) return profile_.exit_layers()[i];
    }
    return profile_.final_layer();
  }

  std::string_view name() const override { return "cascade"; }

 private:
  ExitProfile profile_;
  double alpha_;
};

inline std::unique_ptr<SplitPolicy> make_policy(PolicyKind kind,
                                                const ExitProfile& profile,
                                                const CostParams& params,
                                                std::uint64_t seed) {
  switch (kind) {
    case PolicyKind::ISplitEE:
      return std::make_unique<UcbSplitPolicy>(profile, params);
    case PolicyKind::FinalLayer:
      return std::make_unique<FixedArmPolicy>(profile.final_layer(), "final");
    case PolicyKind::RandomExit:
      return std::make_unique<FixedArmPolicy>(
          make_random_exit_policy(profile, seed));
    case PolicyKind::EarlyExitCascade:
      return std::make_unique<CascadePolicy>(profile, params);
  }
  throw ContractViolation("unhandled policy kind");
}

/// Everything a run produced: the per-round outcomes plus cumulative tallies.
struct RunReport {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<int> arms;               ///< exit layers of the profile
  std::vector<StepOutcome> outcomes;
  std::vector<std::int64_t> pulls;     ///< per-arm pull counts, arm order
  double cumulative_reward = 0.0;
  double cumulative_raw_cost = 0.0;
  double accuracy = 0.0;               ///< fraction of correct outcomes
};

/// Drives one policy over an ordered trace. Deterministic for a fixed
/// (policy state, trace, params) triple.
inline RunReport run_policy(SplitPolicy& policy,
                            const std::vector<SampleRecord>& trace,
                            const ExitProfile& profile,
                            const CostParams& params,
                            std::uint64_t seed = 0) {
  params.validate();
  if (trace.empty()) throw ValidationError("run: empty trace");

  RunReport report;
  report.policy = std::string(policy.name());
  report.seed = seed;
  report.arms = profile.exit_layers();
  report.pulls.assign(profile.arm_count(), 0);
  report.outcomes.reserve(trace.size());

  std::int64_t correct_count = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const int arm = policy.choose(trace[i]);
    StepOutcome out = reward(trace[i], arm, profile, params);
    out.round = static_cast<std::int64_t>(i) + 1;
    policy.observe(arm, out.reward);

    report.pulls[profile.index_of(arm)] += 1;
    report.cumulative_reward += out.reward;
    report.cumulative_raw_cost += out.raw_cost;
    correct_count += out.correct ? 1 : 0;
    report.outcomes.push_back(out);
  }
  report.accuracy =
      static_cast<double>(correct_count) / static_cast<double>(trace.size());
  return report;
}

inline RunReport run_policy(PolicyKind kind,
                            const std::vector<SampleRecord>& trace,
                            const ExitProfile& profile,
                            const CostParams& params,
                            std::uint64_t seed) {
  if (kind == PolicyKind::ISplitEE && trace.size() < profile.arm_count())
    throw ValidationError("run: trace shorter than the arm set");
  auto policy = make_policy(kind, profile, params, seed);
  return run_policy(*policy, trace, profile, params, seed);
}

}  // namespace splitsim
