#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fairlr {

/// Solution of a dense strictly convex quadratic program
///
///   minimize    1/2 x^T G x + g^T x
///   subject to  C x >= b          (one row of C per inequality)
struct QpSolution {
  Eigen::VectorXd x;
  /// One multiplier per row of C; zero for inactive rows.
  Eigen::VectorXd multipliers;
  /// Indices of the rows in the final active set.
  std::vector<int> active;
  bool feasible = true;
  int iterations = 0;
};

/// Dual active-set method of Goldfarb and Idnani. G must be symmetric
/// positive definite. Starts from the unconstrained minimizer and adds
/// violated constraints one at a time, so no feasible starting point is
/// needed; an empty feasible set is reported through `feasible = false`.
[[nodiscard]] QpSolution solve_qp(const Eigen::MatrixXd& G,
                                  const Eigen::VectorXd& g,
                                  const Eigen::MatrixXd& C,
                                  const Eigen::VectorXd& b,
                                  int max_iterations = 0);

}  // namespace fairlr
