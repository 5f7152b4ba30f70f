#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairlr/report.hpp"

namespace fairlr {

/// Process exit status of the command-line tool.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  data_error = 3,
  infeasible = 4,
  internal_error = 5,
};

enum class OutputFormat { json, text, both };
[[nodiscard]] OutputFormat output_format_from_string(const std::string& name);

struct CandidateSpec {
  std::string name;
  PenaltySpec penalty = PenaltySpec::none();
  /// Empty for an unconstrained baseline.
  std::vector<FairnessConstraint> constraints;
};

/// Parsed run configuration (see docs/config.md for the JSON layout).
struct RunConfig {
  /// Directory relative paths inside the config are resolved against.
  std::filesystem::path base_dir = ".";
  std::optional<std::uint64_t> seed;
  /// Raw generator section; parsed once the seed is known.
  std::optional<Json> generator;
  std::optional<std::filesystem::path> data_path;
  CsvSchema schema;
  double test_fraction = 0.3;
  bool stratify = true;
  std::vector<CandidateSpec> candidates;
  ThresholdPolicy policy = TopFraction{0.05};
  SolverConfig solver;
  AuditOptions audit;
  double fairness_floor = kEightyPercentRule;
  std::filesystem::path output_dir = "fairlr-out";
  bool parallel = true;
};

/// Validates the whole document before returning; throws ConfigError.
[[nodiscard]] RunConfig parse_run_config(const Json& j,
                                         const std::filesystem::path& base_dir);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  ///< overrides output.dir
  std::optional<std::uint64_t> seed;             ///< overrides config seeds
  OutputFormat format = OutputFormat::both;
  /// Human-readable output goes here when set (stdout for the tool).
  std::ostream* console = nullptr;
};

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

struct GenerateResult {
  std::filesystem::path csv_path;
  std::filesystem::path sidecar_path;
  std::int64_t rows = 0;
};

/// Generates the configured synthetic dataset into <out>/data.csv with the
/// full generator parameters in <out>/data.generator.json. Requires an
/// explicit seed.
GenerateResult cmd_generate(const RunConfig& config,
                            const CommandOptions& options);

struct TrainResult {
  std::vector<ModelArtifact> models;
  std::vector<std::filesystem::path> model_paths;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  ExitCode exit_code = ExitCode::ok;
};

/// Splits the data, fits every candidate on the training part and writes
/// <out>/models/<name>.json per candidate plus <out>/train.csv and
/// <out>/test.csv. An infeasible candidate is recorded in its model file and
/// the batch continues; the exit code then reports infeasibility.
TrainResult cmd_train(const RunConfig& config, const CommandOptions& options);

struct AuditResult {
  FairnessReport report;
  Json json;
  std::string text;
};

/// Audits a persisted model on a CSV dataset. The model's stored threshold
/// policy applies unless `policy` is given.
AuditResult cmd_audit(const std::filesystem::path& model_path,
                      const std::filesystem::path& data_path,
                      const std::optional<ThresholdPolicy>& policy,
                      const CommandOptions& options);

struct CompareResult {
  ComparisonReport report;
  TrainResult training;
  std::filesystem::path report_path;
  ExitCode exit_code = ExitCode::ok;
};

/// Trains all candidates, audits each on the held-out split and ranks them.
/// Besides the training outputs it writes <out>/audits/<name>.{json,txt},
/// <out>/predictions/<name>.csv and <out>/comparison.{json,txt}.
CompareResult cmd_compare(const RunConfig& config, const CommandOptions& options);

/// Per-row contents of a predictions file written by cmd_compare.
struct PredictionRecord {
  std::vector<int> sensitive;
  std::vector<int> labels;
  std::vector<double> scores;
  std::vector<int> predicted;
};

[[nodiscard]] PredictionRecord read_predictions(const std::filesystem::path& path);

/// Maps an exception thrown by a command to the tool's exit status.
[[nodiscard]] ExitCode exit_code_for(const std::exception& e);

}  // namespace fairlr
