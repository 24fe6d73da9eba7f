#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "splitsim/oracle.hpp"
#include "splitsim/policy.hpp"
#include "splitsim/trace.hpp"

namespace splitsim {

/// Malformed trace or report file; carries the 1-based offending line.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("bad numeric field '" + field + "'", line);
  return value;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trace files: JSON lines, metadata object first, one record per line.
//
//   {"exit_layers":[3,...,20],"generator":...,"lambda":0.1,"schema_version":1}
//   {"conf":{"3":0.91,...},"id":0,"ok":{"3":true,...}}
//   ...
// ---------------------------------------------------------------------------

inline void write_trace(const Trace& trace, std::ostream& out) {
  nlohmann::json meta{
      {"schema_version", trace.meta.schema_version},
      {"exit_layers", trace.profile.exit_layers()},
      {"lambda", trace.profile.lambda()},
      {"generator", trace.meta.generator},
  };
  if (trace.meta.switch_index) meta["switch_index"] = *trace.meta.switch_index;
  if (trace.meta.clamp_warning) meta["clamp_warning"] = true;
  out << meta.dump() << '\n';

  const auto& layers = trace.profile.exit_layers();
  for (const SampleRecord& rec : trace.records) {
    nlohmann::json conf = nlohmann::json::object();
    nlohmann::json ok = nlohmann::json::object();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string key = std::to_string(layers[i]);
      conf[key] = rec.confidence[i];
      ok[key] = rec.correct[i] != 0;
    }
    out << nlohmann::json{{"id", rec.id}, {"conf", conf}, {"ok", ok}}.dump()
        << '\n';
  }
}

inline void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  write_trace(trace, out);
  if (!out) throw ValidationError("failed writing " + path.string());
}

/// Streaming line-by-line reader. The first malformed line aborts the read
/// with its line number; no partial record is emitted.
inline Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("missing metadata line", 1);

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metadata: ") + e.what(), 1);
  }
  if (!meta.is_object() || !meta.contains("schema_version") ||
      !meta["schema_version"].is_number_integer())
    throw ParseError("metadata: missing schema_version", 1);
  if (meta["schema_version"].get<int>() != kTraceSchemaVersion)
    throw ParseError("unsupported schema version " +
                         meta["schema_version"].dump(),
                     1);
  if (!meta.contains("exit_layers") || !meta.contains("lambda"))
    throw ParseError("metadata: missing exit_layers or lambda", 1);

  Trace trace;
  try {
    trace.profile = ExitProfile(meta["exit_layers"].get<std::vector<int>>(),
                                meta["lambda"].get<double>());
  } catch (const std::exception& e) {
    throw ParseError(std::string("metadata: ") + e.what(), 1);
  }
  trace.meta.schema_version = meta["schema_version"].get<int>();
  trace.meta.generator = meta.value("generator", nlohmann::json("external"));
  try {
    if (meta.contains("switch_index"))
      trace.meta.switch_index = meta["switch_index"].get<std::size_t>();
    trace.meta.clamp_warning = meta.value("clamp_warning", false);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metadata: ") + e.what(), 1);
  }

  const auto& layers = trace.profile.exit_layers();
  std::vector<std::string> keys;
  keys.reserve(layers.size());
  for (int layer : layers) keys.push_back(std::to_string(layer));

  std::size_t line_no = 1;
  std::int64_t prev_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("record: ") + e.what(), line_no);
    }
    if (!row.is_object() || !row.contains("id") || !row.contains("conf") ||
        !row.contains("ok") || !row["id"].is_number_integer())
      throw ParseError("record: expected {id, conf, ok}", line_no);

    SampleRecord rec;
    rec.id = row["id"].get<std::int64_t>();
    if (rec.id < 0) throw ParseError("record: negative id", line_no);
    if (rec.id <= prev_id)
      throw ParseError("record: duplicate or non-monotone id " +
                           std::to_string(rec.id),
                       line_no);
    prev_id = rec.id;

    const auto& conf = row["conf"];
    const auto& ok = row["ok"];
    if (!conf.is_object() || conf.size() != keys.size() ||
        !ok.is_object() || ok.size() != keys.size())
      throw ParseError("record: layer set mismatch", line_no);

    rec.confidence.reserve(keys.size());
    rec.correct.reserve(keys.size());
    for (const std::string& key : keys) {
      if (!conf.contains(key) || !ok.contains(key))
        throw ParseError("record: layer set mismatch (missing layer " + key + ")",
                         line_no);
      if (!conf[key].is_number() || !ok[key].is_boolean())
        throw ParseError("record: wrong field type at layer " + key, line_no);
      const double c = conf[key].get<double>();
      if (!(c >= 0.0 && c <= 1.0))
        throw ParseError("record: confidence outside [0, 1] at layer " + key,
                         line_no);
      rec.confidence.push_back(c);
      rec.correct.push_back(ok[key].get<bool>() ? 1 : 0);
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

inline Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_trace(in);
}

// ---------------------------------------------------------------------------
// Report CSVs.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kRoundsCsvHeader =
    "round,arm,exited_locally,reward,raw_cost,correct,cum_regret";

/// Per-round CSV: one row per StepOutcome, with the cumulative pseudo-regret
/// of the run against `oracle`. Booleans are written as 0/1.
inline void write_rounds_csv(const RunReport& report, const OracleResult& oracle,
                             std::ostream& out) {
  const std::vector<double> regret = pseudo_regret(report, oracle);
  out << kRoundsCsvHeader << '\n';
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const StepOutcome& o = report.outcomes[i];
    out << o.round << ',' << o.arm << ',' << (o.exited_locally ? 1 : 0) << ','
        << detail::format_double(o.reward) << ','
        << detail::format_double(o.raw_cost) << ',' << (o.correct ? 1 : 0)
        << ',' << detail::format_double(regret[i]) << '\n';
  }
}

inline void write_rounds_csv(const RunReport& report, const OracleResult& oracle,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  write_rounds_csv(report, oracle, out);
}

/// Parsed-back per-round row; field-for-field a StepOutcome plus cum_regret.
struct RoundRow {
  std::int64_t round = 0;
  int arm = 0;
  bool exited_locally = false;
  double reward = 0.0;
  double raw_cost = 0.0;
  bool correct = false;
  double cum_regret = 0.0;

  friend bool operator==(const RoundRow&, const RoundRow&) = default;
};

inline std::vector<RoundRow> read_rounds_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRoundsCsvHeader)
    throw ParseError("bad rounds CSV header", 1);
  std::vector<RoundRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 7) throw ParseError("expected 7 fields", line_no);
    RoundRow row;
    row.round = static_cast<std::int64_t>(detail::parse_double(fields[0], line_no));
    row.arm = static_cast<int>(detail::parse_double(fields[1], line_no));
    row.exited_locally = fields[2] == "1";
    row.reward = detail::parse_double(fields[3], line_no);
    row.raw_cost = detail::parse_double(fields[4], line_no);
    row.correct = fields[5] == "1";
    row.cum_regret = detail::parse_double(fields[6], line_no);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<RoundRow> read_rounds_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_rounds_csv(in);
}

/// One summary line of a run. Percentage deltas compare against the
/// final-layer baseline on the same trace: cost as a relative change of the
/// cumulative raw cost (final layer = 100%), accuracy as percentage points.
struct SummaryRow {
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  double accuracy = 0.0;
  double accuracy_delta_vs_final_pct = 0.0;
  double cost = 0.0;
  double cost_delta_vs_final_pct = 0.0;
  double final_regret = 0.0;
  double cum_reward = 0.0;
  std::vector<int> arms;
  std::vector<std::int64_t> pulls;
};

inline SummaryRow make_summary_row(const RunReport& report,
                                   const OracleResult& oracle,
                                   const RunReport& final_layer_baseline) {
  if (report.arms != oracle.arms ||
      report.outcomes.size() != final_layer_baseline.outcomes.size())
    throw ContractViolation("summary: report, oracle and baseline disagree");

  SummaryRow row;
  row.policy = report.policy;
  row.seed = report.seed;
  row.rounds = report.outcomes.size();
  row.accuracy = report.accuracy;
  row.accuracy_delta_vs_final_pct =
      (report.accuracy - final_layer_baseline.accuracy) * 100.0;
  row.cost = report.cumulative_raw_cost;
  row.cost_delta_vs_final_pct =
      final_layer_baseline.cumulative_raw_cost > 0.0
          ? (report.cumulative_raw_cost - final_layer_baseline.cumulative_raw_cost) /
                final_layer_baseline.cumulative_raw_cost * 100.0
          : 0.0;
  const std::vector<double> regret = pseudo_regret(report, oracle);
  row.final_regret = regret.empty() ? 0.0 : regret.back();
  row.cum_reward = report.cumulative_reward;
  row.arms = report.arms;
  row.pulls = report.pulls;
  return row;
}

inline std::string summary_csv_header(const std::vector<int>& arms) {
  std::string header =
      "policy,seed,T,accuracy,accuracy_delta_vs_final_pct,cost,"
      "cost_delta_vs_final_pct,final_regret,cum_reward";
  for (int arm : arms) header += ",pulls_" + std::to_string(arm);
  return header;
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows,
                              std::ostream& out) {
  if (rows.empty()) throw ValidationError("summary: no rows");
  out << summary_csv_header(rows.front().arms) << '\n';
  for (const SummaryRow& row : rows) {
    out << row.policy << ',' << row.seed << ',' << row.rounds << ','
        << detail::format_double(row.accuracy) << ','
        << detail::format_double(row.accuracy_delta_vs_final_pct) << ','
        << detail::format_double(row.cost) << ','
        << detail::format_double(row.cost_delta_vs_final_pct) << ','
        << detail::format_double(row.final_regret) << ','
        << detail::format_double(row.cum_reward);
    for (std::int64_t pulls : row.pulls) out << ',' << pulls;
    out << '\n';
  }
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  write_summary_csv(rows, out);
}

}  // namespace splitsim
