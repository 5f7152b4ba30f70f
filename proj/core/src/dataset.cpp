#include "fairlr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

void require_binary(std::span<const int> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0 && values[i] != 1) {
      std::ostringstream msg;
      msg << what << " at row " << i << " is " << values[i]
          << "; expected 0 or 1";
      throw DataError(msg.str());
    }
  }
}

}  // namespace

Dataset::Dataset(Matrix features, std::vector<int> sensitive,
                 std::vector<int> labels,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      sensitive_(std::move(sensitive)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  const auto n = features_.rows();
  if (n < 2) throw DataError("dataset needs at least 2 rows");
  if (features_.cols() < 1)
    throw DataError("dataset needs an intercept column");
  if (static_cast<Eigen::Index>(sensitive_.size()) != n ||
      static_cast<Eigen::Index>(labels_.size()) != n) {
    throw DimensionError("sensitive/label length does not match row count");
  }
  if (static_cast<Eigen::Index>(feature_names_.size()) != features_.cols()) {
    throw DimensionError("feature_names length does not match column count");
  }
  if (!features_.allFinite()) throw DataError("non-finite feature value");
  if ((features_.col(0).array() != 1.0).any())
    throw DataError("column 0 must be the constant intercept column");
  require_binary(sensitive_, "sensitive value");
  require_binary(labels_, "label");
}

Dataset Dataset::with_intercept(const Matrix& raw, std::vector<int> sensitive,
                                std::vector<int> labels,
                                std::vector<std::string> raw_names) {
  Matrix x(raw.rows(), raw.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(raw.cols()) = raw;
  std::vector<std::string> names;
  names.reserve(raw_names.size() + 1);
  names.emplace_back(kInterceptName);
  for (auto& name : raw_names) names.push_back(std::move(name));
  return Dataset(std::move(x), std::move(sensitive), std::move(labels),
                 std::move(names));
}

Eigen::Index Dataset::group_size(int g) const {
  return std::count(sensitive_.begin(), sensitive_.end(), g);
}

void Dataset::require_both_groups() const {
  if (!has_both_groups()) {
    throw DataError(
        "group-conditional metrics need both sensitive values present; "
        "dataset has only s=" +
        std::to_string(sensitive_.front()));
  }
}

Vector Dataset::sensitive_vector() const {
  Vector s(rows());
  for (Eigen::Index i = 0; i < rows(); ++i) s[i] = sensitive_[i];
  return s;
}

Vector Dataset::label_vector() const {
  Vector y(rows());
  for (Eigen::Index i = 0; i < rows(); ++i) y[i] = labels_[i];
  return y;
}

Dataset Dataset::subset(std::span<const Eigen::Index> row_indices) const {
  Matrix x(static_cast<Eigen::Index>(row_indices.size()), cols());
  std::vector<int> s, y;
  s.reserve(row_indices.size());
  y.reserve(row_indices.size());
  for (std::size_t k = 0; k < row_indices.size(); ++k) {
    const auto i = row_indices[k];
    if (i < 0 || i >= rows()) throw DimensionError("subset row out of range");
    x.row(static_cast<Eigen::Index>(k)) = features_.row(i);
    s.push_back(sensitive_[i]);
    y.push_back(labels_[i]);
  }
  return Dataset(std::move(x), std::move(s), std::move(y), feature_names_);
}

WeightVector::WeightVector(Vector values, std::vector<std::string> feature_names)
    : values_(std::move(values)), feature_names_(std::move(feature_names)) {
  if (values_.size() < 1) throw DimensionError("weight vector is empty");
  if (static_cast<Eigen::Index>(feature_names_.size()) != values_.size())
    throw DimensionError("weights and feature names differ in length");
  if (!values_.allFinite()) throw DataError("non-finite weight");
}

WeightVector WeightVector::zeros(const Dataset& dataset) {
  return WeightVector(Vector::Zero(dataset.cols()), dataset.feature_names());
}

RiskScores::RiskScores(std::vector<double> scores) : scores_(std::move(scores)) {
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!(scores_[i] >= 0.0 && scores_[i] <= 1.0)) {
      throw DataError("risk score at row " + std::to_string(i) +
                      " is outside [0, 1]");
    }
  }
}

void validate(const ThresholdPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
    if (!(fixed->threshold > 0.0 && fixed->threshold < 1.0))
      throw ConfigError("fixed threshold must lie in (0, 1)");
  } else {
    const double q = std::get<TopFraction>(policy).fraction;
    if (!(q > 0.0 && q <= 1.0))
      throw ConfigError("top fraction must lie in (0, 1]");
  }
}

std::string describe(const ThresholdPolicy& policy) {
  std::ostringstream out;
  out.precision(17);
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
    out << "score > " << fixed->threshold;
  } else {
    out << "top " << std::get<TopFraction>(policy).fraction << " by score";
  }
  return out.str();
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

RiskScores score(const Vector& weights, const Dataset& dataset) {
  if (weights.size() != dataset.cols()) {
    throw DimensionError("weights have " + std::to_string(weights.size()) +
                         " entries, dataset has " +
                         std::to_string(dataset.cols()) + " columns");
  }
  if (!weights.allFinite()) throw DataError("non-finite weight");
  const Vector z = dataset.features() * weights;
  std::vector<double> r(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]);
  return RiskScores(std::move(r));
}

RiskScores score(const WeightVector& weights, const Dataset& dataset) {
  return score(weights.values(), dataset);
}

Predictions predict(const RiskScores& scores, const ThresholdPolicy& policy) {
  validate(policy);
  const auto r = scores.values();
  std::vector<int> labels(r.size(), 0);
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
    for (std::size_t i = 0; i < r.size(); ++i)
      labels[i] = r[i] > fixed->threshold ? 1 : 0;
  } else {
    const double q = std::get<TopFraction>(policy).fraction;
    auto k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(r.size())));
    k = std::min(k, r.size());
    std::vector<std::size_t> order(r.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    for (std::size_t j = 0; j < k; ++j) labels[order[j]] = 1;
  }
  return Predictions{std::move(labels), policy};
}

GroupConfusion confusion(std::span<const int> predicted,
                         std::span<const int> sensitive,
                         std::span<const int> labels) {
  if (predicted.size() != sensitive.size() || labels.size() != sensitive.size())
    throw DimensionError("predictions and dataset differ in length");
  GroupConfusion out;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    auto& c = out.groups[static_cast<std::size_t>(sensitive[i] != 0)];
    const bool yhat = predicted[i] != 0;
    const bool y = labels[i] != 0;
    if (yhat && y) ++c.tp;
    else if (yhat) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  if (out.groups[0].total() == 0 || out.groups[1].total() == 0) {
    throw DataError(
        "group-conditional metrics need both sensitive values present");
  }
  return out;
}

GroupConfusion confusion(const Predictions& predictions,
                         const Dataset& dataset) {
  return confusion(predictions.labels, dataset.sensitive(), dataset.labels());
}

}  // namespace fairlr
