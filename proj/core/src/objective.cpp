#include "fairlr/objective.hpp"

#include <algorithm>
#include <cmath>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

void require_dimension(const Vector& weights, const Dataset& dataset) {
  if (weights.size() != dataset.cols()) {
    throw DimensionError("weights have " + std::to_string(weights.size()) +
                         " entries, dataset has " +
                         std::to_string(dataset.cols()) + " columns");
  }
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::none: return "none";
    case PenaltyKind::ridge: return "ridge";
    case PenaltyKind::lasso: return "lasso";
    case PenaltyKind::elastic_net: return "elastic_net";
  }
  return "unknown";
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "none") return PenaltyKind::none;
  if (name == "ridge") return PenaltyKind::ridge;
  if (name == "lasso") return PenaltyKind::lasso;
  if (name == "elastic_net") return PenaltyKind::elastic_net;
  throw ConfigError("unknown penalty kind '" + name + "'");
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ConfigError("penalty lambda must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("penalty alpha must lie in [0, 1]");
}

double PenaltySpec::l1_weight() const {
  switch (kind) {
    case PenaltyKind::lasso: return lambda;
    case PenaltyKind::elastic_net: return lambda * alpha;
    default: return 0.0;
  }
}

double PenaltySpec::l2_weight() const {
  switch (kind) {
    case PenaltyKind::ridge: return lambda;
    case PenaltyKind::elastic_net: return lambda * (1.0 - alpha) / 2.0;
    default: return 0.0;
  }
}

double penalty_value(const Vector& weights, const PenaltySpec& penalty) {
  if (weights.size() <= 1) return 0.0;
  const auto tail = weights.tail(weights.size() - 1);
  return penalty.l1_weight() * tail.cwiseAbs().sum() +
         penalty.l2_weight() * tail.squaredNorm();
}

double logistic_loss(const Vector& weights, const Dataset& dataset) {
  require_dimension(weights, dataset);
  const Vector z = dataset.features() * weights;
  const auto labels = dataset.labels();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = sigmoid(z[i]);
    total -= labels[i] != 0 ? std::log(std::max(h, kLogClamp))
                            : std::log(std::max(1.0 - h, kLogClamp));
  }
  return total / static_cast<double>(dataset.rows());
}

double loss(const Vector& weights, const Dataset& dataset,
            const PenaltySpec& penalty) {
  return logistic_loss(weights, dataset) + penalty_value(weights, penalty);
}

double loss(const WeightVector& weights, const Dataset& dataset,
            const PenaltySpec& penalty) {
  return loss(weights.values(), dataset, penalty);
}

Vector loss_gradient(const Vector& weights, const Dataset& dataset,
                     const PenaltySpec& penalty) {
  require_dimension(weights, dataset);
  const Vector z = dataset.features() * weights;
  Vector residual(z.size());
  const auto labels = dataset.labels();
  for (Eigen::Index i = 0; i < z.size(); ++i)
    residual[i] = sigmoid(z[i]) - labels[i];
  Vector grad = dataset.features().transpose() * residual /
                static_cast<double>(dataset.rows());

  const double l1 = penalty.l1_weight();
  const double l2 = penalty.l2_weight();
  for (Eigen::Index j = 1; j < grad.size(); ++j) {
    const double w = weights[j];
    grad[j] += 2.0 * l2 * w;
    if (w > 0.0) grad[j] += l1;
    else if (w < 0.0) grad[j] -= l1;
  }
  return grad;
}

Vector loss_gradient(const WeightVector& weights, const Dataset& dataset,
                     const PenaltySpec& penalty) {
  return loss_gradient(weights.values(), dataset, penalty);
}

}  // namespace fairlr
