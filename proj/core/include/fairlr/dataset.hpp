#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fairlr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Name given to the constant column prepended to every design matrix.
inline constexpr const char* kInterceptName = "(intercept)";

/// Rows of (x, s, y): a design matrix whose column 0 is the constant 1, a
/// binary sensitive attribute (1 = protected group) and a binary label
/// (1 = outcome of interest).
///
/// Construction validates every invariant, so a Dataset in hand is always
/// well formed. Instances are immutable.
class Dataset {
 public:
  /// Takes a design matrix that already carries the intercept column.
  Dataset(Matrix features, std::vector<int> sensitive, std::vector<int> labels,
          std::vector<std::string> feature_names);

  /// Prepends the intercept column to `raw` and names it kInterceptName.
  static Dataset with_intercept(const Matrix& raw, std::vector<int> sensitive,
                                std::vector<int> labels,
                                std::vector<std::string> raw_names);

  [[nodiscard]] Eigen::Index rows() const { return features_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return features_.cols(); }

  [[nodiscard]] const Matrix& features() const { return features_; }
  [[nodiscard]] std::span<const int> sensitive() const { return sensitive_; }
  [[nodiscard]] std::span<const int> labels() const { return labels_; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  /// Row count of group g (0 = unprotected, 1 = protected).
  [[nodiscard]] Eigen::Index group_size(int g) const;
  [[nodiscard]] bool has_both_groups() const {
    return group_size(0) > 0 && group_size(1) > 0;
  }
  /// Throws DataError unless both sensitive values occur.
  void require_both_groups() const;

  /// Sensitive attribute and labels as real vectors, for the linear algebra.
  [[nodiscard]] Vector sensitive_vector() const;
  [[nodiscard]] Vector label_vector() const;

  /// Copy of the given rows, in the given order.
  [[nodiscard]] Dataset subset(std::span<const Eigen::Index> row_indices) const;

 private:
  Matrix features_;
  std::vector<int> sensitive_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
};

/// Model parameters aligned to a declared feature ordering; values[0] is
/// the intercept.
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(Vector values, std::vector<std::string> feature_names);

  static WeightVector zeros(const Dataset& dataset);

  [[nodiscard]] const Vector& values() const { return values_; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  [[nodiscard]] Eigen::Index size() const { return values_.size(); }
  [[nodiscard]] double intercept() const { return values_[0]; }

 private:
  Vector values_;
  std::vector<std::string> feature_names_;
};

/// Per-row predicted probabilities r, each in [0, 1].
class RiskScores {
 public:
  explicit RiskScores(std::vector<double> scores);

  [[nodiscard]] std::span<const double> values() const { return scores_; }
  [[nodiscard]] std::size_t size() const { return scores_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return scores_[i]; }

 private:
  std::vector<double> scores_;
};

/// Label 1 iff score > threshold (strict).
struct FixedThreshold {
  double threshold = 0.5;
};

/// Exactly ceil(fraction * n) rows labelled 1, taken by descending score;
/// ties go to the lower row index.
struct TopFraction {
  double fraction = 0.05;
};

using ThresholdPolicy = std::variant<FixedThreshold, TopFraction>;

/// Throws ConfigError when t is outside (0,1) or q outside (0,1].
void validate(const ThresholdPolicy& policy);
[[nodiscard]] std::string describe(const ThresholdPolicy& policy);

/// Thresholded labels together with the policy that produced them.
struct Predictions {
  std::vector<int> labels;
  ThresholdPolicy policy;
};

/// Confusion counts for one group.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  [[nodiscard]] std::int64_t total() const { return tp + fp + tn + fn; }
  [[nodiscard]] std::int64_t positives() const { return tp + fn; }
  [[nodiscard]] std::int64_t negatives() const { return fp + tn; }
  [[nodiscard]] std::int64_t predicted_positive() const { return tp + fp; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Per-group confusion tables; index 0 is s=0, index 1 is s=1.
struct GroupConfusion {
  std::array<ConfusionCounts, 2> groups;

  [[nodiscard]] const ConfusionCounts& operator[](int g) const {
    return groups[static_cast<std::size_t>(g)];
  }
  [[nodiscard]] std::int64_t total() const {
    return groups[0].total() + groups[1].total();
  }
  bool operator==(const GroupConfusion&) const = default;
};

/// Numerically stable logistic function.
[[nodiscard]] double sigmoid(double z);

/// r_i = sigmoid(w^T x_i) for every row.
[[nodiscard]] RiskScores score(const Vector& weights, const Dataset& dataset);
[[nodiscard]] RiskScores score(const WeightVector& weights,
                               const Dataset& dataset);

[[nodiscard]] Predictions predict(const RiskScores& scores,
                                  const ThresholdPolicy& policy);

/// Per-group counts. Requires both groups to be present.
[[nodiscard]] GroupConfusion confusion(const Predictions& predictions,
                                       const Dataset& dataset);
[[nodiscard]] GroupConfusion confusion(std::span<const int> predicted,
                                       std::span<const int> sensitive,
                                       std::span<const int> labels);

}  // namespace fairlr
