#pragma once

// Batch orchestration: config ingestion, classify -> theta vector -> quantum
// theta -> verification, and JSON report emission.

#include "nctheta/serialization.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nctheta {

inline constexpr const char* kSchemaVersion = "1.0";

enum class Stage { Classify, Theta, Verify, All };

std::string_view to_string(Stage s) noexcept;

struct Tolerances {
  double inner_rel = 0.0;
  double residual_abs = 0.0;
  double tail_eps = 0.0;
};

struct VerifyOptions {
  std::int64_t g_radius = 2;
  std::optional<TranslationKind> kind;  ///< empty: Manin for q = 0, Modified otherwise
  std::size_t cocycle_samples = 64;
  std::int64_t additivity_search_radius = 3;
  std::size_t nonexistence_trials = 100;
};

struct RunConfig {
  EmbeddingMap embedding;
  ComplexStructure complex_structure;
  std::optional<ComplexStructure> partial_structure;
  std::int64_t truncation_R = 0;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;  ///< empty: every report the stage produces
  VerifyOptions verify;
};

/// Throws Error(ConfigError) on any schema violation.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

struct Failure {
  std::string reason;  ///< machine-readable
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;
  std::map<std::string, Json> reports;  ///< file stem -> report
  std::vector<Failure> failures;
  bool degenerate_translation = false;
};

/// Runs the stage and its prerequisites. Exit code 0 when every assertion
/// holds, 2 otherwise. Never writes files.
RunOutcome run_pipeline(const RunConfig& cfg, Stage stage);

/// Writes <dir>/<name>.json for every report plus summary.json.
void write_reports(const RunOutcome& outcome, Stage stage, const std::filesystem::path& dir);

}  // namespace nctheta
