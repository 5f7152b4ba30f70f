#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlr/constraints.hpp"
#include "fairlr/data_pipeline.hpp"
#include "fairlr/metrics.hpp"
#include "fairlr/objective.hpp"
#include "fairlr/solver.hpp"

namespace fairlr {

using Json = nlohmann::json;

inline constexpr const char* kModelFormat = "fairlr-model/1";
inline constexpr const char* kAuditFormat = "fairlr-audit/1";
inline constexpr const char* kComparisonFormat = "fairlr-comparison/1";

// Value types <-> JSON. Decoders throw ConfigError on malformed input.
[[nodiscard]] Json to_json(const PenaltySpec& penalty);
[[nodiscard]] PenaltySpec penalty_from_json(const Json& j);
[[nodiscard]] Json to_json(const FairnessConstraint& constraint);
[[nodiscard]] FairnessConstraint constraint_from_json(const Json& j);
[[nodiscard]] Json to_json(const ThresholdPolicy& policy);
[[nodiscard]] ThresholdPolicy policy_from_json(const Json& j);
[[nodiscard]] Json to_json(const SolverConfig& config);
[[nodiscard]] SolverConfig solver_config_from_json(const Json& j);
[[nodiscard]] Json to_json(const AuditOptions& options);
[[nodiscard]] AuditOptions audit_options_from_json(const Json& j);
[[nodiscard]] Json to_json(const CsvSchema& schema);
[[nodiscard]] CsvSchema schema_from_json(const Json& j);
/// `seed` may be absent from the document; the caller supplies it.
[[nodiscard]] Json to_json(const GeneratorSpec& spec);
[[nodiscard]] GeneratorSpec generator_from_json(const Json& j,
                                                std::optional<std::uint64_t> seed);

[[nodiscard]] Json to_json(const MetricValue& metric);
[[nodiscard]] Json to_json(const FitResult& fit);
[[nodiscard]] Json to_json(const FairnessReport& report);

/// A trained (or failed) candidate as persisted by `train`.
struct ModelArtifact {
  std::string name;
  /// "ok", "not_converged" or "infeasible".
  std::string status = "ok";
  std::string error;
  PenaltySpec penalty;
  std::vector<FairnessConstraint> constraints;
  CsvSchema schema;
  ThresholdPolicy policy = TopFraction{};
  AuditOptions audit;
  /// Present unless the fit failed outright.
  std::optional<FitResult> fit;

  [[nodiscard]] bool has_weights() const { return fit.has_value(); }
};

[[nodiscard]] Json to_json(const ModelArtifact& model);
[[nodiscard]] ModelArtifact model_from_json(const Json& j);

/// Scores `dataset` with the model's weights and audits the predictions
/// under `policy`. Throws DataError when feature names differ.
[[nodiscard]] FairnessReport audit_model(const ModelArtifact& model,
                                         const Dataset& dataset,
                                         const ThresholdPolicy& policy,
                                         const AuditOptions& options);

/// Fixed-width table, six significant digits, covering the same fields as
/// to_json(report).
[[nodiscard]] std::string render_text(const FairnessReport& report,
                                      const std::string& title);

/// Outcome of one candidate in a comparison run.
struct CandidateOutcome {
  ModelArtifact model;
  std::optional<FairnessReport> report;  ///< held-out audit, when trained
};

/// The fairness-floor-then-AUC selection rule.
struct Selection {
  double fairness_floor = kEightyPercentRule;
  /// Candidate indices in rank order: qualifying candidates by descending
  /// AUC, then the rest by descending minimum fairness ratio; ties keep the
  /// candidate order. Candidates without a report are left out.
  std::vector<std::size_t> ranking;
  std::vector<bool> qualifies;
  std::optional<std::size_t> chosen;
  /// No candidate met the floor; `chosen` maximizes the minimum ratio.
  bool fallback = false;

  [[nodiscard]] static std::string rule_text(double floor);
};

/// min(statistical parity, equal opportunity class 1, class 0) ratios;
/// empty if any of them is undefined.
[[nodiscard]] std::optional<double> min_fairness_ratio(const FairnessReport& r);

[[nodiscard]] Selection select_candidate(
    const std::vector<CandidateOutcome>& candidates, double fairness_floor);

struct ComparisonReport {
  std::vector<CandidateOutcome> candidates;
  Selection selection;
};

[[nodiscard]] Json to_json(const ComparisonReport& report);
[[nodiscard]] std::string render_text(const ComparisonReport& report);

}  // namespace fairlr
