#pragma once

#include <string>

#include "fairlr/dataset.hpp"

namespace fairlr {

enum class PenaltyKind { none, ridge, lasso, elastic_net };

[[nodiscard]] std::string to_string(PenaltyKind kind);
/// Throws ConfigError on an unknown name.
[[nodiscard]] PenaltyKind penalty_kind_from_string(const std::string& name);

/// Regularization applied to every weight except the intercept.
///
///   ridge        lambda * sum w_j^2
///   lasso        lambda * sum |w_j|
///   elastic_net  lambda * (alpha * sum |w_j| + (1 - alpha) / 2 * sum w_j^2)
///
/// The defaults (lambda = 0.01, alpha = 0.5) are tool defaults, not values
/// taken from any study.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::none;
  double lambda = 0.01;
  double alpha = 0.5;

  static PenaltySpec none() { return {PenaltyKind::none, 0.0, 0.5}; }
  static PenaltySpec ridge(double lambda) {
    return {PenaltyKind::ridge, lambda, 0.0};
  }
  static PenaltySpec lasso(double lambda) {
    return {PenaltyKind::lasso, lambda, 1.0};
  }
  static PenaltySpec elastic_net(double lambda, double alpha) {
    return {PenaltyKind::elastic_net, lambda, alpha};
  }

  /// Throws ConfigError unless lambda >= 0 and alpha in [0, 1].
  void validate() const;

  /// Weight on sum |w_j| after resolving the kind.
  [[nodiscard]] double l1_weight() const;
  /// Weight on sum w_j^2 after resolving the kind.
  [[nodiscard]] double l2_weight() const;
  [[nodiscard]] bool is_smooth() const { return l1_weight() == 0.0; }
};

/// Log arguments are clamped from below at this value.
inline constexpr double kLogClamp = 1e-12;

/// Penalty term alone; ignores weights[0].
[[nodiscard]] double penalty_value(const Vector& weights,
                                   const PenaltySpec& penalty);

/// Mean negative log-likelihood of the labels under sigmoid(Xw).
[[nodiscard]] double logistic_loss(const Vector& weights,
                                   const Dataset& dataset);

/// logistic_loss + penalty_value.
[[nodiscard]] double loss(const Vector& weights, const Dataset& dataset,
                          const PenaltySpec& penalty);
[[nodiscard]] double loss(const WeightVector& weights, const Dataset& dataset,
                          const PenaltySpec& penalty);

/// (1/n) X^T (sigmoid(Xw) - y) plus the penalty (sub)gradient. For the L1
/// part the subgradient sign(w_j) is used, with 0 at w_j = 0.
[[nodiscard]] Vector loss_gradient(const Vector& weights,
                                   const Dataset& dataset,
                                   const PenaltySpec& penalty);
[[nodiscard]] Vector loss_gradient(const WeightVector& weights,
                                   const Dataset& dataset,
                                   const PenaltySpec& penalty);

}  // namespace fairlr
