// splitsim: trace-driven simulator for online splitting-layer selection in
// edge-cloud co-inference.
//
// Subcommands: generate | run | oracle | sweep. All randomness flows from the
// explicit seed flags; identical invocations write identical files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitsim/splitsim.hpp"

namespace fs = std::filesystem;
using namespace splitsim;

namespace {

struct GeneratorFlags {
  std::vector<int> exits = ExitProfile().exit_layers();
  double lambda = ExitProfile().lambda();
  std::size_t samples = 10000;
  double sigma = 0.0;
  double base = GeneratorConfig{}.base_confidence;
  double depth_gain = GeneratorConfig{}.depth_gain;
  double noise_penalty = GeneratorConfig{}.noise_penalty;
  double concentration = GeneratorConfig{}.concentration;
  double calib_scale = 1.0;
  double calib_offset = 0.0;
  double difficulty_sd = 0.0;

  GeneratorConfig config(double sigma_value, std::uint64_t seed) const {
    GeneratorConfig cfg;
    cfg.profile = ExitProfile(exits, lambda);
    cfg.n_samples = samples;
    cfg.sigma = sigma_value;
    cfg.base_confidence = base;
    cfg.depth_gain = depth_gain;
    cfg.noise_penalty = noise_penalty;
    cfg.concentration = concentration;
    cfg.calibration = Calibration{calib_scale, calib_offset};
    cfg.difficulty_sd = difficulty_sd;
    cfg.seed = seed;
    return cfg;
  }
};

void add_generator_flags(CLI::App* cmd, GeneratorFlags& flags) {
  cmd->add_option("--exits", flags.exits, "Exit layers, ascending; last is the final layer")
      ->delimiter(',');
  cmd->add_option("--lambda", flags.lambda, "Compute cost per layer");
  cmd->add_option("--samples", flags.samples, "Samples per trace");
  cmd->add_option("--sigma", flags.sigma, "Distortion level");
  cmd->add_option("--base", flags.base, "Mean confidence of the shallowest exit at sigma 0");
  cmd->add_option("--depth-gain", flags.depth_gain, "Mean confidence gained per exit rank");
  cmd->add_option("--noise-penalty", flags.noise_penalty, "Mean confidence lost per unit sigma");
  cmd->add_option("--concentration", flags.concentration, "Beta concentration (inf = point mass)");
  cmd->add_option("--calib-scale", flags.calib_scale, "Calibration slope: P(correct) = scale*conf + offset");
  cmd->add_option("--calib-offset", flags.calib_offset, "Calibration intercept");
  cmd->add_option("--difficulty-sd", flags.difficulty_sd, "Shared per-sample difficulty latent sd");
}

struct ParamFlags {
  double alpha = CostParams{}.alpha;
  double beta = CostParams{}.beta;
  double mu = CostParams{}.mu;
  double offload = CostParams{}.offload_cost;

  CostParams params() const { return CostParams{alpha, mu, offload, beta}; }
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
  cmd->add_option("--alpha", flags.alpha, "Confidence threshold");
  cmd->add_option("--beta", flags.beta, "UCB exploration weight (>= 1)");
  cmd->add_option("--mu", flags.mu, "Accuracy-to-cost conversion factor");
  cmd->add_option("--offload", flags.offload, "Offloading cost o");
}

struct SeedFlags {
  std::uint64_t seed = 1;
  std::size_t seeds = 10;

  std::vector<std::uint64_t> list() const {
    if (seeds == 0) throw ValidationError("at least one seed is required");
    std::vector<std::uint64_t> out(seeds);
    for (std::size_t i = 0; i < seeds; ++i) out[i] = seed + i;
    return out;
  }
};

void add_seed_flags(CLI::App* cmd, SeedFlags& flags) {
  cmd->add_option("--seed", flags.seed, "First seed");
  cmd->add_option("--seeds", flags.seeds, "Number of seeds (seed, seed+1, ...)");
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// One policy over one trace: report, oracle-backed summary row.
SummaryRow run_one(PolicyKind kind, const Trace& trace, const CostParams& params,
                   std::uint64_t seed, const OracleResult& oracle,
                   const RunReport& final_baseline, RunReport* report_out = nullptr) {
  RunReport report = run_policy(kind, trace.records, trace.profile, params, seed);
  SummaryRow row = make_summary_row(report, oracle, final_baseline);
  if (report_out) *report_out = std::move(report);
  return row;
}

void print_summary_table(const std::vector<SummaryRow>& rows) {
  std::cout << summary_csv_header(rows.front().arms) << '\n';
  std::ostringstream buf;
  write_summary_csv(rows, buf);
  const std::string text = buf.str();
  std::cout << text.substr(text.find('\n') + 1);
}

struct Aggregate {
  std::string policy;
  std::size_t n_seeds = 0;
  std::size_t rounds = 0;
  std::vector<double> accuracy, cost, final_regret, cum_reward, acc_delta, cost_delta;

  void add(const SummaryRow& row) {
    policy = row.policy;
    n_seeds += 1;
    rounds = row.rounds;
    accuracy.push_back(row.accuracy);
    cost.push_back(row.cost);
    final_regret.push_back(row.final_regret);
    cum_reward.push_back(row.cum_reward);
    acc_delta.push_back(row.accuracy_delta_vs_final_pct);
    cost_delta.push_back(row.cost_delta_vs_final_pct);
  }
};

constexpr std::string_view kAggregateHeader =
    "policy,n_seeds,T,accuracy_mean,accuracy_std,cost_mean,cost_std,"
    "final_regret_mean,final_regret_std,cum_reward_mean,cum_reward_std,"
    "accuracy_delta_vs_final_pct_mean,cost_delta_vs_final_pct_mean";

void write_aggregate_fields(std::ostream& out, const Aggregate& agg) {
  out << agg.policy << ',' << agg.n_seeds << ',' << agg.rounds << ','
      << detail::format_double(mean_of(agg.accuracy)) << ','
      << detail::format_double(sample_std(agg.accuracy)) << ','
      << detail::format_double(mean_of(agg.cost)) << ','
      << detail::format_double(sample_std(agg.cost)) << ','
      << detail::format_double(mean_of(agg.final_regret)) << ','
      << detail::format_double(sample_std(agg.final_regret)) << ','
      << detail::format_double(mean_of(agg.cum_reward)) << ','
      << detail::format_double(sample_std(agg.cum_reward)) << ','
      << detail::format_double(mean_of(agg.acc_delta)) << ','
      << detail::format_double(mean_of(agg.cost_delta));
}

// --------------------------------------------------------------------------
// generate
// --------------------------------------------------------------------------

struct GenerateArgs {
  GeneratorFlags gen;
  std::uint64_t seed = 1;
  std::string out;
  // drift
  double sigma_b = -1.0;
  std::size_t samples_b = 0;      // 0: same as --samples
  std::size_t switch_at = 0;      // 0: after the first config's samples
  std::uint64_t seed_b = 0;       // 0: seed + 1
  bool drift_requested = false;
};

int cmd_generate(const GenerateArgs& args) {
  Trace trace;
  if (args.drift_requested) {
    GeneratorConfig a = args.gen.config(args.gen.sigma, args.seed);
    GeneratorConfig b = args.gen.config(args.sigma_b, args.seed_b ? args.seed_b : args.seed + 1);
    if (args.samples_b) b.n_samples = args.samples_b;
    const std::size_t switch_at = args.switch_at ? args.switch_at : a.n_samples;
    trace = drift_trace(a, b, switch_at);
  } else {
    trace = generate_trace(args.gen.config(args.gen.sigma, args.seed));
  }
  write_trace(trace, fs::path(args.out));

  nlohmann::json meta{{"records", trace.records.size()},
                      {"exit_layers", trace.profile.exit_layers()},
                      {"lambda", trace.profile.lambda()},
                      {"generator", trace.meta.generator}};
  if (trace.meta.switch_index) meta["switch_index"] = *trace.meta.switch_index;
  if (trace.meta.clamp_warning) meta["clamp_warning"] = true;
  std::cout << "wrote " << args.out << ' ' << meta.dump() << '\n';
  return 0;
}

// --------------------------------------------------------------------------
// run
// --------------------------------------------------------------------------

struct RunArgs {
  std::string policy = "isplitee";
  std::string trace_path;
  GeneratorFlags gen;
  ParamFlags params;
  SeedFlags seeds;
  std::string out;
  bool rounds_csv = true;
};

int cmd_run(const RunArgs& args) {
  const PolicyKind kind = policy_kind_from_string(args.policy);
  const CostParams params = args.params.params();
  params.validate();

  std::optional<Trace> file_trace;
  if (!args.trace_path.empty()) file_trace = read_trace(fs::path(args.trace_path));

  if (!args.out.empty()) fs::create_directories(args.out);

  std::vector<SummaryRow> rows;
  Aggregate agg;
  for (std::uint64_t seed : args.seeds.list()) {
    Trace generated;
    const Trace* trace = nullptr;
    if (file_trace) {
      trace = &*file_trace;
    } else {
      generated = generate_trace(args.gen.config(args.gen.sigma, seed));
      trace = &generated;
    }
    const OracleResult oracle = per_arm_means(trace->records, trace->profile, params);
    const RunReport final_baseline =
        run_policy(PolicyKind::FinalLayer, trace->records, trace->profile, params, seed);

    RunReport report;
    SummaryRow row = run_one(kind, *trace, params, seed, oracle, final_baseline, &report);
    if (!args.out.empty() && args.rounds_csv) {
      write_rounds_csv(report, oracle,
                       fs::path(args.out) / ("rounds_" + row.policy + "_seed" +
                                             std::to_string(seed) + ".csv"));
    }
    agg.add(row);
    rows.push_back(std::move(row));
  }

  if (!args.out.empty()) {
    write_summary_csv(rows, fs::path(args.out) / "summary.csv");
    std::ofstream out(fs::path(args.out) / "aggregate.csv");
    out << kAggregateHeader << '\n';
    write_aggregate_fields(out, agg);
    out << '\n';
  }

  print_summary_table(rows);
  std::cout << kAggregateHeader << '\n';
  write_aggregate_fields(std::cout, agg);
  std::cout << '\n';
  return 0;
}

// --------------------------------------------------------------------------
// oracle
// --------------------------------------------------------------------------

struct OracleArgs {
  std::string trace_path;
  GeneratorFlags gen;
  ParamFlags params;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_oracle(const OracleArgs& args) {
  const CostParams params = args.params.params();
  params.validate();
  Trace trace = args.trace_path.empty()
                    ? generate_trace(args.gen.config(args.gen.sigma, args.seed))
                    : read_trace(fs::path(args.trace_path));
  const OracleResult oracle = per_arm_means(trace.records, trace.profile, params);

  std::printf("%6s %10s %14s %12s %5s\n", "arm", "gamma", "mean_reward", "gap", "best");
  for (std::size_t i = 0; i < oracle.arms.size(); ++i) {
    std::printf("%6d %10.4f %14.6f %12.6f %5s\n", oracle.arms[i],
                trace.profile.compute_cost(oracle.arms[i]), oracle.mean_reward[i],
                oracle.gaps[i], oracle.arms[i] == oracle.best_arm ? "*" : "");
  }

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw ValidationError("cannot open " + args.out + " for writing");
    out << "arm,gamma,mean_reward,gap,is_best\n";
    for (std::size_t i = 0; i < oracle.arms.size(); ++i) {
      out << oracle.arms[i] << ','
          << detail::format_double(trace.profile.compute_cost(oracle.arms[i])) << ','
          << detail::format_double(oracle.mean_reward[i]) << ','
          << detail::format_double(oracle.gaps[i]) << ','
          << (oracle.arms[i] == oracle.best_arm ? 1 : 0) << '\n';
    }
  }
  return 0;
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

struct SweepArgs {
  GeneratorFlags gen;
  ParamFlags params;
  SeedFlags seeds;
  std::vector<double> sigmas = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> offloads = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::string> policies = {"isplitee", "final", "random", "cascade"};
  std::string out;
};

int cmd_sweep(const SweepArgs& args) {
  if (args.sigmas.empty() || args.offloads.empty() || args.policies.empty())
    throw ValidationError("sweep: empty grid");
  std::vector<PolicyKind> kinds;
  for (const std::string& name : args.policies)
    kinds.push_back(policy_kind_from_string(name));

  std::ofstream out(args.out);
  if (!out) throw ValidationError("cannot open " + args.out + " for writing");
  out << "sigma,offload," << kAggregateHeader << '\n';

  for (double sigma : args.sigmas) {
    // One trace per (sigma, seed), shared across offloads and policies.
    std::vector<Trace> traces;
    for (std::uint64_t seed : args.seeds.list())
      traces.push_back(generate_trace(args.gen.config(sigma, seed)));

    for (double offload : args.offloads) {
      CostParams params = args.params.params();
      params.offload_cost = offload;
      params.validate();
      for (PolicyKind kind : kinds) {
        Aggregate agg;
        const auto seeds = args.seeds.list();
        for (std::size_t s = 0; s < seeds.size(); ++s) {
          const Trace& trace = traces[s];
          const OracleResult oracle = per_arm_means(trace.records, trace.profile, params);
          const RunReport final_baseline = run_policy(
              PolicyKind::FinalLayer, trace.records, trace.profile, params, seeds[s]);
          agg.add(run_one(kind, trace, params, seeds[s], oracle, final_baseline));
        }
        out << detail::format_double(sigma) << ',' << detail::format_double(offload) << ',';
        write_aggregate_fields(out, agg);
        out << '\n';
      }
    }
  }
  std::cout << "wrote " << args.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for online DNN splitting-layer selection"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic confidence trace");
  add_generator_flags(generate, gen_args.gen);
  generate->add_option("--seed", gen_args.seed, "Generator seed");
  generate->add_option("--out", gen_args.out, "Output trace path")->required();
  auto* sigma_b = generate->add_option("--sigma-b", gen_args.sigma_b,
                                       "Second-half sigma (makes a drift trace)");
  generate->add_option("--samples-b", gen_args.samples_b,
                       "Second config's sample count (default: --samples)");
  generate->add_option("--switch-at", gen_args.switch_at,
                       "Drift switch index (default: --samples)");
  generate->add_option("--seed-b", gen_args.seed_b, "Second config's seed (default: seed+1)");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run a policy over a trace");
  run->add_option("--policy", run_args.policy, "isplitee | final | random | cascade");
  run->add_option("--trace", run_args.trace_path, "Trace file (otherwise generate per seed)");
  add_generator_flags(run, run_args.gen);
  add_param_flags(run, run_args.params);
  add_seed_flags(run, run_args.seeds);
  run->add_option("--out", run_args.out, "Output directory for CSVs");
  run->add_flag("!--no-rounds", run_args.rounds_csv, "Skip per-round CSVs");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "Per-arm mean rewards and gaps");
  oracle->add_option("--trace", oracle_args.trace_path, "Trace file");
  add_generator_flags(oracle, oracle_args.gen);
  add_param_flags(oracle, oracle_args.params);
  oracle->add_option("--seed", oracle_args.seed, "Generator seed (generator mode)");
  oracle->add_option("--out", oracle_args.out, "Optional CSV output path");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Cross-product of sigma x offload x policy");
  add_generator_flags(sweep, sweep_args.gen);
  add_param_flags(sweep, sweep_args.params);
  add_seed_flags(sweep, sweep_args.seeds);
  sweep->add_option("--sigmas", sweep_args.sigmas, "Distortion grid")->delimiter(',');
  sweep->add_option("--offloads", sweep_args.offloads, "Offload cost grid")->delimiter(',');
  sweep->add_option("--policies", sweep_args.policies, "Policy grid")->delimiter(',');
  sweep->add_option("--out", sweep_args.out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      gen_args.drift_requested = sigma_b->count() > 0;
      return cmd_generate(gen_args);
    }
    if (run->parsed()) return cmd_run(run_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
