#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairlr/constraints.hpp"
#include "fairlr/dataset.hpp"
#include "fairlr/objective.hpp"

namespace fairlr {

struct SolverConfig {
  int max_iterations = 10000;
  /// Bound on the norm of the gradient of the Lagrangian (or of the
  /// objective when there are no constraints).
  double tolerance = 1e-6;
  double constraint_feasibility_tol = 1e-6;
  /// Carried for reproducibility records; the Newton iteration itself is
  /// deterministic and draws no random numbers.
  std::uint64_t seed = 0;
  /// Starting point in the caller's coordinates; all-zeros when empty.
  std::optional<Vector> initial_weights;
  /// Fit on features scaled to zero mean and unit variance (intercept
  /// exempt) and map the weights back afterwards.
  bool standardize = true;

  /// Throws ConfigError on non-positive limits or tolerances.
  void validate() const;
};

/// First-order optimality residuals, measured in the coordinates the solver
/// iterates in.
struct KktResiduals {
  double stationarity = 0.0;             ///< ||grad f - C^T mu||_2
  double primal_infeasibility = 0.0;     ///< max(0, c_k - a_k^T w)
  double complementary_slackness = 0.0;  ///< max |mu_k (a_k^T w - c_k)|
  double dual_infeasibility = 0.0;       ///< max(0, -mu_k)
};

/// State of one linear fairness row at the returned weights.
struct ConstraintReport {
  std::string label;
  ConstraintKind kind = ConstraintKind::statistical_parity_linear;
  bool mirrored = false;
  double value = 0.0;  ///< a^T w on the training data (negated when mirrored)
  double bound = 0.0;
  double multiplier = 0.0;
  bool active = false;  ///< |value - bound| <= feasibility tolerance
};

struct FitResult {
  WeightVector weights;
  bool converged = false;
  int iterations = 0;
  /// Objective value that was minimized (logistic loss plus penalty, the
  /// penalty taken on the fitting coordinates).
  double final_loss = 0.0;
  /// Unpenalized logistic loss of `weights` on the training data.
  double data_loss = 0.0;
  std::vector<ConstraintReport> constraints;
  KktResiduals kkt;
};

/// Minimizes logistic loss plus penalty. A run that exhausts the iteration
/// budget returns its last (lowest-merit) iterate with converged = false.
[[nodiscard]] FitResult fit_unconstrained(const Dataset& dataset,
                                          const PenaltySpec& penalty,
                                          const SolverConfig& config = {});

/// Minimizes logistic loss plus penalty subject to the linear fairness
/// constraints, by sequential quadratic programming with a Newton model of
/// the objective. Throws InfeasibleError when the constraints admit no
/// weights.
[[nodiscard]] FitResult fit_constrained(
    const Dataset& dataset, const PenaltySpec& penalty,
    const std::vector<FairnessConstraint>& constraints,
    const SolverConfig& config = {});

}  // namespace fairlr
