#include "fairlr/constraints.hpp"

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

// Per-row coefficients (s_i - s_bar) / n.
Vector parity_coefficients(const Dataset& dataset) {
  const auto ctx = ConstraintContext::from(dataset);
  const double n = static_cast<double>(dataset.rows());
  return (dataset.sensitive_vector().array() - ctx.s_bar).matrix() / n;
}

// Per-row coefficients (s_i - s_bar)(y_i - y_bar) / n.
Vector odds_coefficients(const Dataset& dataset) {
  const auto ctx = ConstraintContext::from(dataset);
  const double n = static_cast<double>(dataset.rows());
  return ((dataset.sensitive_vector().array() - ctx.s_bar) *
          (dataset.label_vector().array() - ctx.y_bar))
             .matrix() /
         n;
}

}  // namespace

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::statistical_parity_prob:
      return "statistical_parity_prob";
    case ConstraintKind::statistical_parity_linear:
      return "statistical_parity_linear";
    case ConstraintKind::equalized_odds_linear:
      return "equalized_odds_linear";
  }
  return "unknown";
}

ConstraintKind constraint_kind_from_string(const std::string& name) {
  if (name == "statistical_parity_prob")
    return ConstraintKind::statistical_parity_prob;
  if (name == "statistical_parity_linear")
    return ConstraintKind::statistical_parity_linear;
  if (name == "equalized_odds_linear")
    return ConstraintKind::equalized_odds_linear;
  throw ConfigError("unknown constraint kind '" + name + "'");
}

void FairnessConstraint::validate() const {
  if (std::isnan(c)) throw ConfigError("constraint bound c is NaN");
  if (symmetric && c > 0.0) {
    throw ConfigError(
        "a symmetric constraint needs c <= 0 (it enforces |value| <= |c|)");
  }
}

std::vector<FairnessConstraint> default_fairness_constraints(double c,
                                                             bool symmetric) {
  return {{ConstraintKind::statistical_parity_linear, c, symmetric},
          {ConstraintKind::equalized_odds_linear, c, symmetric}};
}

ConstraintContext ConstraintContext::from(const Dataset& dataset) {
  const double n = static_cast<double>(dataset.rows());
  return {dataset.sensitive_vector().sum() / n, dataset.label_vector().sum() / n};
}

double eval_statistical_parity_prob(const Vector& weights,
                                    const Dataset& dataset) {
  require_dimension(weights, dataset);
  const Vector coef = parity_coefficients(dataset);
  const Vector z = dataset.features() * weights;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += coef[i] * sigmoid(z[i]);
  return total;
}

double eval_statistical_parity_linear(const Vector& weights,
                                      const Dataset& dataset) {
  require_dimension(weights, dataset);
  return parity_coefficients(dataset).dot(dataset.features() * weights);
}

double eval_equalized_odds_linear(const Vector& weights,
                                  const Dataset& dataset) {
  require_dimension(weights, dataset);
  return odds_coefficients(dataset).dot(dataset.features() * weights);
}

double eval_constraint(ConstraintKind kind, const Vector& weights,
                       const Dataset& dataset) {
  switch (kind) {
    case ConstraintKind::statistical_parity_prob:
      return eval_statistical_parity_prob(weights, dataset);
    case ConstraintKind::statistical_parity_linear:
      return eval_statistical_parity_linear(weights, dataset);
    case ConstraintKind::equalized_odds_linear:
      return eval_equalized_odds_linear(weights, dataset);
  }
  throw ConfigError("unknown constraint kind");
}

Vector statistical_parity_prob_gradient(const Vector& weights,
                                        const Dataset& dataset) {
  require_dimension(weights, dataset);
  Vector coef = parity_coefficients(dataset);
  const Vector z = dataset.features() * weights;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = sigmoid(z[i]);
    coef[i] *= h * (1.0 - h);
  }
  return dataset.features().transpose() * coef;
}

Vector statistical_parity_linear_gradient(const Dataset& dataset) {
  Vector a = dataset.features().transpose() * parity_coefficients(dataset);
  // sum (s_i - s_bar) vanishes analytically; drop the rounding residue.
  a[0] = 0.0;
  return a;
}

Vector equalized_odds_linear_gradient(const Dataset& dataset) {
  return dataset.features().transpose() * odds_coefficients(dataset);
}

std::string LinearConstraintRow::label() const {
  return mirrored ? to_string(kind) + " (upper)" : to_string(kind);
}

std::vector<LinearConstraintRow> as_linear_constraint(
    const FairnessConstraint& constraint, const Dataset& dataset) {
  constraint.validate();
  Vector a;
  switch (constraint.kind) {
    case ConstraintKind::statistical_parity_linear:
      a = statistical_parity_linear_gradient(dataset);
      break;
    case ConstraintKind::equalized_odds_linear:
      a = equalized_odds_linear_gradient(dataset);
      break;
    case ConstraintKind::statistical_parity_prob:
      throw ConfigError(
          "statistical_parity_prob is nonlinear in the weights and cannot be "
          "used as a solver constraint; use statistical_parity_linear");
  }
  std::vector<LinearConstraintRow> rows;
  rows.push_back({a, constraint.c, constraint.kind, false});
  if (constraint.symmetric)
    rows.push_back({-a, constraint.c, constraint.kind, true});
  return rows;
}

std::vector<LinearConstraintRow> as_linear_constraints(
    const std::vector<FairnessConstraint>& constraints, const Dataset& dataset) {
  std::vector<LinearConstraintRow> rows;
  for (const auto& c : constraints) {
    auto part = as_linear_constraint(c, dataset);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

}  // namespace fairlr
