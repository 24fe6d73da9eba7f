#pragma once

#include <random>

#include "splitsim/trace.hpp"
#include "splitsim/types.hpp"

namespace splitsim {

/// Maps confidence to the probability the prediction is correct. The default
/// (scale 1, offset 0) is a perfectly calibrated classifier.
struct Calibration {
  double scale = 1.0;
  double offset = 0.0;

  double operator()(double confidence) const {
    return std::clamp(scale * confidence + offset, 0.0, 1.0);
  }
};

/// Parametric confidence model for distorted inputs. Each exit's confidence
/// is Beta-distributed with mean
///
///   m_i(sigma) = clamp(base + depth_gain * rank(i) - noise_penalty * sigma)
///
/// so deeper exits are more confident and distortion depresses every exit.
/// Correctness is Bernoulli(calibration(confidence)).
struct GeneratorConfig {
  ExitProfile profile;
  std::size_t n_samples = 0;
  double sigma = 0.0;            ///< distortion level, >= 0
  double base_confidence = 0.5;  ///< mean confidence of the shallowest exit at sigma 0
  double depth_gain = 0.015;     ///< mean confidence added per exit rank
  double noise_penalty = 0.1;    ///< mean confidence lost per unit of sigma
  double concentration = 50.0;   ///< Beta spread; +inf collapses to a point mass
  Calibration calibration{};
  double difficulty_sd = 0.0;    ///< shared per-sample mean shift; 0 disables
  std::uint64_t seed = 0;

  /// Mean confidence of the exit at `rank`, clamped to [0.01, 0.99].
  /// `clamped`, when given, reports whether the raw value fell outside (0, 1).
  double mean_confidence(std::size_t rank, bool* clamped = nullptr) const {
    const double raw = base_confidence +
                       depth_gain * static_cast<double>(rank) -
                       noise_penalty * sigma;
    if (clamped) *clamped = !(raw > 0.0 && raw < 1.0);
    return std::clamp(raw, 0.01, 0.99);
  }

  void validate() const {
    if (n_samples == 0) throw ValidationError("generator: n_samples must be positive");
    if (!std::isfinite(sigma) || sigma < 0.0)
      throw ValidationError("generator: sigma must be finite and >= 0");
    if (!std::isfinite(base_confidence))
      throw ValidationError("generator: base confidence must be finite");
    if (!std::isfinite(depth_gain) || depth_gain < 0.0)
      throw ValidationError("generator: depth gain must be finite and >= 0");
    if (!std::isfinite(noise_penalty) || noise_penalty < 0.0)
      throw ValidationError("generator: noise penalty must be finite and >= 0");
    if (std::isnan(concentration) || concentration <= 0.0)
      throw ValidationError("generator: concentration must be > 0");
    if (!std::isfinite(difficulty_sd) || difficulty_sd < 0.0)
      throw ValidationError("generator: difficulty sd must be finite and >= 0");
  }

  nlohmann::json fingerprint() const {
    return nlohmann::json{
        {"n_samples", n_samples},
        {"sigma", sigma},
        {"base_confidence", base_confidence},
        {"depth_gain", depth_gain},
        {"noise_penalty", noise_penalty},
        {"concentration", std::isinf(concentration)
                              ? nlohmann::json("inf")
                              : nlohmann::json(concentration)},
        {"calibration", {{"scale", calibration.scale},
                         {"offset", calibration.offset}}},
        {"difficulty_sd", difficulty_sd},
        {"seed", seed}};
  }
};

namespace detail {

inline double draw_beta(std::mt19937_64& gen, double mean, double concentration) {
  std::gamma_distribution<double> ga(mean * concentration, 1.0);
  std::gamma_distribution<double> gb((1.0 - mean) * concentration, 1.0);
  const double x = ga(gen);
  const double y = gb(gen);
  const double sum = x + y;
  return sum > 0.0 ? x / sum : mean;
}

// Appends n_samples records drawn from `config` to `trace`, ids continuing
// from next_id. Draw order per sample: difficulty latent (when enabled), then
// confidence and correctness per exit in depth order.
inline void append_samples(std::vector<SampleRecord>& out,
                           const GeneratorConfig& config,
                           std::size_t n_samples,
                           std::int64_t next_id,
                           std::mt19937_64& gen,
                           bool* clamped_any) {
  const std::size_t arm_count = config.profile.arm_count();
  std::vector<double> means(arm_count);
  for (std::size_t r = 0; r < arm_count; ++r) {
    bool clamped = false;
    means[r] = config.mean_confidence(r, &clamped);
    if (clamped && clamped_any) *clamped_any = true;
  }
  const bool point_mass = std::isinf(config.concentration);
  std::normal_distribution<double> latent(0.0, 1.0);

  for (std::size_t s = 0; s < n_samples; ++s) {
    SampleRecord rec;
    rec.id = next_id + static_cast<std::int64_t>(s);
    rec.confidence.resize(arm_count);
    rec.correct.resize(arm_count);

    double shift = 0.0;
    if (config.difficulty_sd > 0.0)
      shift = config.difficulty_sd * latent(gen);

    for (std::size_t r = 0; r < arm_count; ++r) {
      const double m = std::clamp(means[r] + shift, 0.01, 0.99);
      const double c =
          point_mass ? m : detail::draw_beta(gen, m, config.concentration);
      rec.confidence[r] = c;
      std::bernoulli_distribution correct(config.calibration(c));
      rec.correct[r] = correct(gen) ? 1 : 0;
    }
    out.push_back(std::move(rec));
  }
}

}  // namespace detail

/// Draws a full synthetic trace. Identical config and seed give an identical
/// trace.
inline Trace generate_trace(const GeneratorConfig& config) {
  config.validate();

  Trace trace;
  trace.profile = config.profile;
  trace.meta.generator = config.fingerprint();
  trace.records.reserve(config.n_samples);

  std::mt19937_64 gen(config.seed);
  bool clamped = false;
  detail::append_samples(trace.records, config, config.n_samples, 0, gen, &clamped);
  trace.meta.clamp_warning = clamped;
  return trace;
}

/// Distribution-shift trace: the first `switch_at` records come from
/// `config_a`, the remaining `a.n_samples + b.n_samples - switch_at` from
/// `config_b`. Ids are sequential across the switch; the switch index is
/// recorded in the metadata.
inline Trace drift_trace(const GeneratorConfig& config_a,
                         const GeneratorConfig& config_b,
                         std::size_t switch_at) {
  config_a.validate();
  config_b.validate();
  if (!(config_a.profile == config_b.profile))
    throw ValidationError("drift: generator configs use different profiles");
  const std::size_t total = config_a.n_samples + config_b.n_samples;
  if (switch_at == 0 || switch_at >= total)
    throw ValidationError("drift: switch index must fall strictly inside the trace");

  Trace trace;
  trace.profile = config_a.profile;
  trace.meta.generator = nlohmann::json{{"drift",
                                         {{"a", config_a.fingerprint()},
                                          {"b", config_b.fingerprint()},
                                          {"switch_at", switch_at}}}};
  trace.meta.switch_index = switch_at;
  trace.records.reserve(total);

  bool clamped = false;
  std::mt19937_64 gen_a(config_a.seed);
  detail::append_samples(trace.records, config_a, switch_at, 0, gen_a, &clamped);
  std::mt19937_64 gen_b(config_b.seed);
  detail::append_samples(trace.records, config_b, total - switch_at,
                         static_cast<std::int64_t>(switch_at), gen_b, &clamped);
  trace.meta.clamp_warning = clamped;
  return trace;
}

}  // namespace splitsim
