#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "splitsim/types.hpp"

namespace splitsim {

inline constexpr int kTraceSchemaVersion = 1;

/// Trace provenance carried in the file header line.
struct TraceMeta {
  int schema_version = kTraceSchemaVersion;
  /// Generator fingerprint (config + seed) or the string "external".
  nlohmann::json generator = "external";
  std::optional<std::size_t> switch_index;  ///< drift point, when present
  bool clamp_warning = false;  ///< a configured mean fell outside (0, 1)
};

/// An ordered confidence trace plus the profile it covers.
struct Trace {
  ExitProfile profile;
  std::vector<SampleRecord> records;
  TraceMeta meta;
};

}  // namespace splitsim
