#pragma once

#include <string>
#include <vector>

#include "fairlr/dataset.hpp"

namespace fairlr {

/// Fairness constraint functions, each of the form value(w) >= c.
///
///   statistical_parity_prob    (1/n) sum (s_i - s_bar) sigmoid(w^T x_i)
///   statistical_parity_linear  (1/n) sum (s_i - s_bar) w^T x_i
///   equalized_odds_linear      (1/n) sum (s_i - s_bar)(y_i - y_bar) w^T x_i
///
/// The probability form is nonlinear in w, so it is only available as an
/// audit quantity; the two linear forms are what the solver enforces.
enum class ConstraintKind {
  statistical_parity_prob,
  statistical_parity_linear,
  equalized_odds_linear,
};

[[nodiscard]] std::string to_string(ConstraintKind kind);
[[nodiscard]] ConstraintKind constraint_kind_from_string(const std::string& name);

/// Selection-rate gap that mirrors the 80% rule on the probability scale.
inline constexpr double kDefaultConstraintBound = -0.2;

struct FairnessConstraint {
  ConstraintKind kind = ConstraintKind::statistical_parity_linear;
  /// Lower bound on the constraint value.
  double c = kDefaultConstraintBound;
  /// Also require value <= -c, i.e. |value| <= |c|. Needs c <= 0.
  bool symmetric = true;

  /// Throws ConfigError when symmetric is set with c > 0 or c is NaN.
  void validate() const;
};

/// Both linear kinds with the default bound, as enforced by default.
[[nodiscard]] std::vector<FairnessConstraint> default_fairness_constraints(
    double c = kDefaultConstraintBound, bool symmetric = true);

struct ConstraintContext {
  double s_bar = 0.0;  ///< share of the protected group in the sample
  double y_bar = 0.0;  ///< mean of the observed labels

  static ConstraintContext from(const Dataset& dataset);
};

[[nodiscard]] double eval_statistical_parity_prob(const Vector& weights,
                                                  const Dataset& dataset);
[[nodiscard]] double eval_statistical_parity_linear(const Vector& weights,
                                                    const Dataset& dataset);
[[nodiscard]] double eval_equalized_odds_linear(const Vector& weights,
                                                const Dataset& dataset);
[[nodiscard]] double eval_constraint(ConstraintKind kind, const Vector& weights,
                                     const Dataset& dataset);

/// Gradients of the constraint values with respect to w. The two linear
/// kinds have gradients that do not depend on w.
[[nodiscard]] Vector statistical_parity_prob_gradient(const Vector& weights,
                                                      const Dataset& dataset);
[[nodiscard]] Vector statistical_parity_linear_gradient(const Dataset& dataset);
[[nodiscard]] Vector equalized_odds_linear_gradient(const Dataset& dataset);

/// One row a^T w >= bound of the solver's inequality system.
struct LinearConstraintRow {
  Vector a;
  double bound = 0.0;
  ConstraintKind kind = ConstraintKind::statistical_parity_linear;
  /// True for the -a^T w >= c half of a symmetric constraint.
  bool mirrored = false;

  [[nodiscard]] double value(const Vector& weights) const {
    return a.dot(weights);
  }
  [[nodiscard]] std::string label() const;
};

/// Rows whose a^T w reproduces the eval_* value of the constraint; a
/// symmetric constraint yields (a, c) and (-a, c). Throws ConfigError for
/// statistical_parity_prob.
[[nodiscard]] std::vector<LinearConstraintRow> as_linear_constraint(
    const FairnessConstraint& constraint, const Dataset& dataset);

/// Concatenated rows for a list of constraints.
[[nodiscard]] std::vector<LinearConstraintRow> as_linear_constraints(
    const std::vector<FairnessConstraint>& constraints, const Dataset& dataset);

}  // namespace fairlr
