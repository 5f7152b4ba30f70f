#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairlr/dataset.hpp"

namespace fairlr {

/// Why a metric's ratio or difference is not an ordinary quotient.
enum class MetricFlag {
  none,
  both_rates_zero,  ///< 0 vs 0: ratio taken as 1, difference 0
  one_rate_zero,    ///< exactly one group at 0: ratio 0
  undefined,        ///< a group's conditioning event is empty
};

[[nodiscard]] std::string to_string(MetricFlag flag);

/// A conditional frequency num/den kept as integers until the last step.
struct Rate {
  std::int64_t num = 0;
  std::int64_t den = 0;

  [[nodiscard]] bool defined() const { return den > 0; }
  [[nodiscard]] std::optional<double> value() const;
};

/// One group-fairness quantity evaluated on both groups.
struct MetricValue {
  std::string name;
  /// Index 0 is s=0, index 1 is s=1; empty where the rate is undefined.
  std::array<std::optional<double>, 2> per_group;
  /// per_group[1] - per_group[0].
  std::optional<double> difference;
  /// min(p1/p0, p0/p1), in [0, 1].
  std::optional<double> ratio;
  /// ratio >= 0.8, for the metrics the 80% rule is applied to.
  std::optional<bool> passes_80pct;
  MetricFlag flag = MetricFlag::none;

  [[nodiscard]] bool defined() const { return ratio.has_value(); }
};

/// The 80% (four-fifths) rule threshold on selection-rate ratios.
inline constexpr double kEightyPercentRule = 0.8;

/// Compares two integer rates. The difference and the ratio are each formed
/// from integer cross products and rounded once.
[[nodiscard]] MetricValue compare_rates(std::string name, Rate group0,
                                        Rate group1, bool apply_80pct);

/// Same comparison for real-valued per-group quantities (e.g. AUC).
[[nodiscard]] MetricValue compare_values(std::string name,
                                         std::optional<double> group0,
                                         std::optional<double> group1,
                                         bool apply_80pct);

/// p(yhat = 1 | s): selection rate per group.
[[nodiscard]] MetricValue statistical_parity(const GroupConfusion& confusion);
/// p(y = 1 | yhat = 1, s): precision per group.
[[nodiscard]] MetricValue predictive_parity(const GroupConfusion& confusion);
/// p(yhat = 1 | y = 0, s): false-positive rate per group.
[[nodiscard]] MetricValue predictive_equality(const GroupConfusion& confusion);
/// for_class 1: p(yhat = 1 | y = 1, s) (TPR); for_class 0:
/// p(yhat = 0 | y = 0, s) (TNR).
[[nodiscard]] MetricValue equal_opportunity(const GroupConfusion& confusion,
                                            int for_class);
/// p(yhat = 0 | y = 1, s): the false-negative form of equal opportunity.
[[nodiscard]] MetricValue false_negative_rate_parity(
    const GroupConfusion& confusion);

enum class Verdict { satisfied, violated, undetermined };
[[nodiscard]] std::string to_string(Verdict verdict);

struct EqualizedOdds {
  Verdict verdict = Verdict::undetermined;
  double tolerance = 0.0;
  MetricValue positive_class;  ///< equal opportunity, class 1
  MetricValue negative_class;  ///< equal opportunity, class 0
};

/// Satisfied iff both equal-opportunity ratios are >= 1 - tol; undetermined
/// when either ratio is undefined.
[[nodiscard]] EqualizedOdds equalized_odds(const GroupConfusion& confusion,
                                           double tol);

/// Mann-Whitney estimate of P(score of a random positive > score of a random
/// negative), ties counted 1/2. Empty when either class is absent.
[[nodiscard]] std::optional<double> auc(std::span<const double> scores,
                                        std::span<const int> labels);

struct AccuracyEquity {
  MetricValue auc;       ///< headline comparison
  MetricValue accuracy;  ///< p(yhat = y | s)
};

[[nodiscard]] AccuracyEquity accuracy_equity(const GroupConfusion& confusion,
                                             const RiskScores& scores,
                                             const Dataset& dataset);

struct CalibrationCell {
  std::int64_t count = 0;
  std::optional<double> mean_score;
  std::optional<double> positive_rate;
};

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::array<CalibrationCell, 2> groups;
  /// No rows from either group fell in this bin.
  bool skipped = false;
  /// |rate(s=1) - rate(s=0)| when both groups are present.
  std::optional<double> gap;
};

struct CalibrationTable {
  std::vector<CalibrationBin> bins;
  std::int64_t skipped_bins = 0;
  /// Largest per-bin gap; empty if no bin holds both groups.
  std::optional<double> max_gap;
};

/// Index of the equal-width bin holding `score`: [0, 1/B] for the first bin,
/// ((b)/B, (b+1)/B] afterwards.
[[nodiscard]] int calibration_bin_index(double score, int bins);

/// p(y = 1 | r in bin, s) per bin and group.
[[nodiscard]] CalibrationTable calibration_table(const RiskScores& scores,
                                                 const Dataset& dataset,
                                                 int bins = 10);

struct AuditOptions {
  /// Slack on the equal-opportunity ratios for the equalized-odds verdict;
  /// 0.2 matches the 80% rule.
  double equalized_odds_tol = 1.0 - kEightyPercentRule;
  int calibration_bins = 10;
};

/// Every group-fairness and accuracy measure for one model on one dataset.
struct FairnessReport {
  ThresholdPolicy policy;
  std::array<std::int64_t, 2> group_sizes{};
  GroupConfusion confusion;

  MetricValue statistical_parity;
  MetricValue predictive_parity;
  MetricValue predictive_equality;
  MetricValue equal_opportunity_positive;
  MetricValue equal_opportunity_negative;
  MetricValue false_negative_rate_parity;
  EqualizedOdds equalized_odds;
  AccuracyEquity accuracy_equity;
  CalibrationTable calibration;

  /// (1/n) sum (s_i - s_bar) r_i: mean-score gap weighted by group shares.
  double score_parity = 0.0;
  double overall_accuracy = 0.0;
  std::optional<double> overall_auc;
};

[[nodiscard]] FairnessReport audit(const RiskScores& scores,
                                   const Predictions& predictions,
                                   const Dataset& dataset,
                                   const AuditOptions& options = {});

}  // namespace fairlr
