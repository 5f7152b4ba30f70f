#include "fairlr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

__extension__ typedef __int128 Wide;

double to_double(Wide v) { return static_cast<double>(v); }

}  // namespace

std::string to_string(MetricFlag flag) {
  switch (flag) {
    case MetricFlag::none: return "none";
    case MetricFlag::both_rates_zero: return "both_rates_zero";
    case MetricFlag::one_rate_zero: return "one_rate_zero";
    case MetricFlag::undefined: return "undefined";
  }
  return "unknown";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::undetermined: return "undetermined";
  }
  return "unknown";
}

std::optional<double> Rate::value() const {
  if (!defined()) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

MetricValue compare_rates(std::string name, Rate group0, Rate group1,
                          bool apply_80pct) {
  MetricValue out;
  out.name = std::move(name);
  out.per_group = {group0.value(), group1.value()};
  if (!group0.defined() || !group1.defined()) {
    out.flag = MetricFlag::undefined;
    return out;
  }
  const Wide cross1 = Wide{group1.num} * group0.den;  // p1 scaled by d0 d1
  const Wide cross0 = Wide{group0.num} * group1.den;  // p0 scaled by d0 d1
  const Wide common = Wide{group0.den} * group1.den;
  out.difference = to_double(cross1 - cross0) / to_double(common);
  if (cross0 == 0 && cross1 == 0) {
    out.ratio = 1.0;
    out.flag = MetricFlag::both_rates_zero;
  } else if (cross0 == 0 || cross1 == 0) {
    out.ratio = 0.0;
    out.flag = MetricFlag::one_rate_zero;
  } else {
    out.ratio = to_double(std::min(cross0, cross1)) /
                to_double(std::max(cross0, cross1));
  }
  if (apply_80pct) out.passes_80pct = *out.ratio >= kEightyPercentRule;
  return out;
}

MetricValue compare_values(std::string name, std::optional<double> group0,
                           std::optional<double> group1, bool apply_80pct) {
  MetricValue out;
  out.name = std::move(name);
  out.per_group = {group0, group1};
  if (!group0 || !group1) {
    out.flag = MetricFlag::undefined;
    return out;
  }
  const double p0 = *group0;
  const double p1 = *group1;
  out.difference = p1 - p0;
  if (p0 == 0.0 && p1 == 0.0) {
    out.ratio = 1.0;
    out.flag = MetricFlag::both_rates_zero;
  } else if (p0 == 0.0 || p1 == 0.0) {
    out.ratio = 0.0;
    out.flag = MetricFlag::one_rate_zero;
  } else {
    out.ratio = std::min(p0, p1) / std::max(p0, p1);
  }
  if (apply_80pct) out.passes_80pct = *out.ratio >= kEightyPercentRule;
  return out;
}

MetricValue statistical_parity(const GroupConfusion& confusion) {
  if (confusion[0].total() == 0 || confusion[1].total() == 0)
    throw DataError("statistical parity needs rows in both groups");
  return compare_rates(
      "statistical_parity",
      {confusion[0].predicted_positive(), confusion[0].total()},
      {confusion[1].predicted_positive(), confusion[1].total()}, true);
}

MetricValue predictive_parity(const GroupConfusion& confusion) {
  return compare_rates("predictive_parity",
                       {confusion[0].tp, confusion[0].predicted_positive()},
                       {confusion[1].tp, confusion[1].predicted_positive()},
                       false);
}

MetricValue predictive_equality(const GroupConfusion& confusion) {
  return compare_rates("predictive_equality",
                       {confusion[0].fp, confusion[0].negatives()},
                       {confusion[1].fp, confusion[1].negatives()}, false);
}

MetricValue equal_opportunity(const GroupConfusion& confusion, int for_class) {
  if (for_class == 1) {
    return compare_rates("equal_opportunity_class1",
                         {confusion[0].tp, confusion[0].positives()},
                         {confusion[1].tp, confusion[1].positives()}, true);
  }
  if (for_class == 0) {
    return compare_rates("equal_opportunity_class0",
                         {confusion[0].tn, confusion[0].negatives()},
                         {confusion[1].tn, confusion[1].negatives()}, true);
  }
  throw ConfigError("equal_opportunity class must be 0 or 1");
}

MetricValue false_negative_rate_parity(const GroupConfusion& confusion) {
  return compare_rates("false_negative_rate_parity",
                       {confusion[0].fn, confusion[0].positives()},
                       {confusion[1].fn, confusion[1].positives()}, false);
}

EqualizedOdds equalized_odds(const GroupConfusion& confusion, double tol) {
  if (!(tol >= 0.0 && tol <= 1.0))
    throw ConfigError("equalized-odds tolerance must lie in [0, 1]");
  EqualizedOdds out;
  out.tolerance = tol;
  out.positive_class = equal_opportunity(confusion, 1);
  out.negative_class = equal_opportunity(confusion, 0);
  if (!out.positive_class.defined() || !out.negative_class.defined()) {
    out.verdict = Verdict::undetermined;
  } else {
    const bool ok = *out.positive_class.ratio >= 1.0 - tol &&
                    *out.negative_class.ratio >= 1.0 - tol;
    out.verdict = ok ? Verdict::satisfied : Verdict::violated;
  }
  return out;
}

std::optional<double> auc(std::span<const double> scores,
                          std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw DimensionError("auc: scores and labels differ in length");
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double positive_rank_sum = 0.0;
  std::int64_t positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j + 1;
  }
  const auto negatives = static_cast<std::int64_t>(n) - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

AccuracyEquity accuracy_equity(const GroupConfusion& confusion,
                               const RiskScores& scores,
                               const Dataset& dataset) {
  if (scores.size() != static_cast<std::size_t>(dataset.rows()))
    throw DimensionError("accuracy_equity: scores and dataset differ in length");
  std::array<std::vector<double>, 2> group_scores;
  std::array<std::vector<int>, 2> group_labels;
  const auto s = dataset.sensitive();
  const auto y = dataset.labels();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    group_scores[s[i]].push_back(scores[i]);
    group_labels[s[i]].push_back(y[i]);
  }
  AccuracyEquity out;
  out.auc = compare_values("accuracy_equity_auc",
                           auc(group_scores[0], group_labels[0]),
                           auc(group_scores[1], group_labels[1]), false);
  out.accuracy = compare_rates(
      "accuracy_equity_accuracy",
      {confusion[0].tp + confusion[0].tn, confusion[0].total()},
      {confusion[1].tp + confusion[1].tn, confusion[1].total()}, false);
  return out;
}

int calibration_bin_index(double score, int bins) {
  const double b = static_cast<double>(bins);
  int k = static_cast<int>(std::ceil(score * b)) - 1;
  k = std::clamp(k, 0, bins - 1);
  // Correct for rounding in score * bins against the stored edges k / bins.
  while (k > 0 && score <= static_cast<double>(k) / b) --k;
  while (k + 1 < bins && score > static_cast<double>(k + 1) / b) ++k;
  return k;
}

CalibrationTable calibration_table(const RiskScores& scores,
                                   const Dataset& dataset, int bins) {
  if (bins < 2) throw ConfigError("calibration needs at least 2 bins");
  if (scores.size() != static_cast<std::size_t>(dataset.rows()))
    throw DimensionError("calibration: scores and dataset differ in length");

  struct Accum {
    std::int64_t count = 0;
    std::int64_t positives = 0;
    double score_sum = 0.0;
  };
  std::vector<std::array<Accum, 2>> acc(static_cast<std::size_t>(bins));
  const auto s = dataset.sensitive();
  const auto y = dataset.labels();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& a = acc[static_cast<std::size_t>(calibration_bin_index(scores[i], bins))]
                 [static_cast<std::size_t>(s[i])];
    ++a.count;
    a.positives += y[i];
    a.score_sum += scores[i];
  }

  CalibrationTable out;
  for (int k = 0; k < bins; ++k) {
    CalibrationBin bin;
    bin.lower = static_cast<double>(k) / bins;
    bin.upper = static_cast<double>(k + 1) / bins;
    for (int g = 0; g < 2; ++g) {
      const auto& a = acc[static_cast<std::size_t>(k)][static_cast<std::size_t>(g)];
      auto& cell = bin.groups[static_cast<std::size_t>(g)];
      cell.count = a.count;
      if (a.count > 0) {
        cell.mean_score = a.score_sum / static_cast<double>(a.count);
        cell.positive_rate = static_cast<double>(a.positives) /
                             static_cast<double>(a.count);
      }
    }
    bin.skipped = bin.groups[0].count == 0 && bin.groups[1].count == 0;
    if (bin.skipped) ++out.skipped_bins;
    if (bin.groups[0].positive_rate && bin.groups[1].positive_rate) {
      bin.gap = std::abs(*bin.groups[1].positive_rate -
                         *bin.groups[0].positive_rate);
      out.max_gap = std::max(out.max_gap.value_or(0.0), *bin.gap);
    }
    out.bins.push_back(bin);
  }
  return out;
}

FairnessReport audit(const RiskScores& scores, const Predictions& predictions,
                     const Dataset& dataset, const AuditOptions& options) {
  dataset.require_both_groups();
  if (scores.size() != predictions.labels.size() ||
      scores.size() != static_cast<std::size_t>(dataset.rows())) {
    throw DimensionError("audit: scores, predictions and dataset differ in length");
  }
  FairnessReport r;
  r.policy = predictions.policy;
  r.group_sizes = {dataset.group_size(0), dataset.group_size(1)};
  r.confusion = confusion(predictions, dataset);
  r.statistical_parity = statistical_parity(r.confusion);
  r.predictive_parity = predictive_parity(r.confusion);
  r.predictive_equality = predictive_equality(r.confusion);
  r.equal_opportunity_positive = equal_opportunity(r.confusion, 1);
  r.equal_opportunity_negative = equal_opportunity(r.confusion, 0);
  r.false_negative_rate_parity = false_negative_rate_parity(r.confusion);
  r.equalized_odds = equalized_odds(r.confusion, options.equalized_odds_tol);
  r.accuracy_equity = accuracy_equity(r.confusion, scores, dataset);
  r.calibration = calibration_table(scores, dataset, options.calibration_bins);

  const auto s = dataset.sensitive();
  const double n = static_cast<double>(dataset.rows());
  const double s_bar = static_cast<double>(r.group_sizes[1]) / n;
  double parity = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    parity += (s[i] - s_bar) * scores[i];
  r.score_parity = parity / n;

  const auto& c = r.confusion;
  r.overall_accuracy =
      static_cast<double>(c[0].tp + c[0].tn + c[1].tp + c[1].tn) / n;
  r.overall_auc = auc(scores.values(), dataset.labels());
  return r;
}

}  // namespace fairlr
