#include "fairlr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairlr/error.hpp"
#include "fairlr/qp.hpp"

namespace fairlr {

namespace {

// Column-wise affine map x_j -> (x_j - mean_j) / scale_j for j >= 1.
struct Scaling {
  Vector mean;
  Vector scale;

  static Scaling identity(Eigen::Index d) {
    return {Vector::Zero(d), Vector::Ones(d)};
  }

  static Scaling fit(const Dataset& data, bool enabled) {
    auto s = identity(data.cols());
    if (!enabled) return s;
    const double n = static_cast<double>(data.rows());
    for (Eigen::Index j = 1; j < data.cols(); ++j) {
      const auto col = data.features().col(j);
      const double mu = col.mean();
      const double var = (col.array() - mu).square().sum() / n;
      // Constant columns are left alone; centring would zero them out.
      if (var > 1e-24 * (1.0 + mu * mu)) {
        s.mean[j] = mu;
        s.scale[j] = std::sqrt(var);
      }
    }
    return s;
  }

  [[nodiscard]] Dataset apply(const Dataset& data) const {
    Matrix x = data.features();
    for (Eigen::Index j = 1; j < x.cols(); ++j)
      x.col(j) = (x.col(j).array() - mean[j]) / scale[j];
    x.col(0).setOnes();
    return Dataset(std::move(x),
                   {data.sensitive().begin(), data.sensitive().end()},
                   {data.labels().begin(), data.labels().end()},
                   data.feature_names());
  }

  [[nodiscard]] Vector to_fitting(const Vector& w) const {
    Vector out = w.cwiseProduct(scale);
    out[0] = w[0] + w.tail(w.size() - 1).dot(mean.tail(w.size() - 1));
    return out;
  }

  [[nodiscard]] Vector from_fitting(const Vector& w) const {
    Vector out = w.cwiseQuotient(scale);
    out[0] = w[0] - out.tail(w.size() - 1).dot(mean.tail(w.size() - 1));
    return out;
  }
};

// Smooth reformulation of the fitting problem over a parameter vector theta.
// With an L1 term every non-intercept weight is split as w_j = u_j - v_j with
// u, v >= 0, which turns sum |w_j| into the linear term sum (u_j + v_j) and
// adds the bounds to the inequality system.
class Problem {
 public:
  Problem(const Dataset& data, const PenaltySpec& penalty,
          const std::vector<LinearConstraintRow>& rows)
      : data_(data),
        smooth_penalty_{PenaltyKind::ridge, penalty.l2_weight(), 0.0},
        l1_(penalty.l1_weight()) {
    const auto d = data.cols();
    const auto k = d - 1;
    split_ = l1_ > 0.0;
    const auto p = split_ ? 1 + 2 * k : d;
    expand_ = Matrix::Zero(d, p);
    expand_(0, 0) = 1.0;
    for (Eigen::Index j = 1; j < d; ++j) {
      expand_(j, j) = 1.0;
      if (split_) expand_(j, k + j) = -1.0;
    }
    fairness_rows_ = static_cast<Eigen::Index>(rows.size());
    const auto bounds = split_ ? 2 * k : Eigen::Index{0};
    C_.resize(fairness_rows_ + bounds, p);
    b_.resize(fairness_rows_ + bounds);
    for (Eigen::Index r = 0; r < fairness_rows_; ++r) {
      C_.row(r) = rows[static_cast<std::size_t>(r)].a.transpose() * expand_;
      b_[r] = rows[static_cast<std::size_t>(r)].bound;
    }
    for (Eigen::Index i = 0; i < bounds; ++i) {
      C_.row(fairness_rows_ + i).setZero();
      C_(fairness_rows_ + i, 1 + i) = 1.0;
      b_[fairness_rows_ + i] = 0.0;
    }
    linear_cost_ = Vector::Zero(p);
    if (split_) linear_cost_.tail(p - 1).setConstant(l1_);
  }

  [[nodiscard]] Eigen::Index dim() const { return expand_.cols(); }
  [[nodiscard]] bool split() const { return split_; }
  [[nodiscard]] const Matrix& C() const { return C_; }
  [[nodiscard]] const Vector& b() const { return b_; }
  [[nodiscard]] Eigen::Index fairness_rows() const { return fairness_rows_; }

  [[nodiscard]] Vector weights(const Vector& theta) const {
    return expand_ * theta;
  }

  [[nodiscard]] Vector lift(const Vector& w) const {
    if (!split_) return w;
    const auto k = w.size() - 1;
    Vector theta(1 + 2 * k);
    theta[0] = w[0];
    theta.segment(1, k) = w.tail(k).cwiseMax(0.0);
    theta.tail(k) = (-w.tail(k)).cwiseMax(0.0);
    return theta;
  }

  [[nodiscard]] double objective(const Vector& theta) const {
    return loss(weights(theta), data_, smooth_penalty_) +
           linear_cost_.dot(theta);
  }

  [[nodiscard]] Vector gradient(const Vector& theta) const {
    return expand_.transpose() *
               loss_gradient(weights(theta), data_, smooth_penalty_) +
           linear_cost_;
  }

  [[nodiscard]] Matrix hessian(const Vector& theta) const {
    const Vector z = data_.features() * weights(theta);
    Vector root(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double h = sigmoid(z[i]);
      root[i] = std::sqrt(h * (1.0 - h));
    }
    const Matrix scaled = data_.features().array().colwise() * root.array();
    Matrix hw = Matrix::Zero(data_.cols(), data_.cols());
    hw.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(),
                                                  1.0 / data_.rows());
    hw = hw.selfadjointView<Eigen::Lower>();
    const double l2 = smooth_penalty_.l2_weight();
    for (Eigen::Index j = 1; j < hw.rows(); ++j) hw(j, j) += 2.0 * l2;
    return expand_.transpose() * hw * expand_;
  }

 private:
  const Dataset& data_;
  PenaltySpec smooth_penalty_;
  double l1_ = 0.0;
  bool split_ = false;
  Matrix expand_;
  Matrix C_;
  Vector b_;
  Vector linear_cost_;
  Eigen::Index fairness_rows_ = 0;
};

double total_violation(const Matrix& C, const Vector& b, const Vector& theta) {
  if (C.rows() == 0) return 0.0;
  return (b - C * theta).cwiseMax(0.0).sum();
}

double max_violation(const Matrix& C, const Vector& b, const Vector& theta) {
  if (C.rows() == 0) return 0.0;
  return (b - C * theta).cwiseMax(0.0).maxCoeff();
}

KktResiduals residuals(const Problem& problem, const Vector& theta,
                       const Vector& grad, const Vector& mu) {
  KktResiduals out;
  const auto& C = problem.C();
  const auto& b = problem.b();
  if (C.rows() == 0) {
    out.stationarity = grad.norm();
    return out;
  }
  out.stationarity = (grad - C.transpose() * mu).norm();
  out.primal_infeasibility = max_violation(C, b, theta);
  const Vector gap = C * theta - b;
  for (Eigen::Index j = 0; j < C.rows(); ++j) {
    if (mu[j] != 0.0)
      out.complementary_slackness =
          std::max(out.complementary_slackness, std::abs(mu[j] * gap[j]));
    out.dual_infeasibility = std::max(out.dual_infeasibility, -mu[j]);
  }
  return out;
}

FitResult fit(const Dataset& dataset, const PenaltySpec& penalty,
              const std::vector<FairnessConstraint>& constraints,
              const SolverConfig& config) {
  penalty.validate();
  config.validate();
  for (const auto& c : constraints) c.validate();
  if (!constraints.empty()) dataset.require_both_groups();

  const auto scaling = Scaling::fit(dataset, config.standardize);
  const Dataset fitting = scaling.apply(dataset);
  // w^T x is the same in both coordinate systems, so the rows built on the
  // scaled data constrain exactly the same quantities.
  const auto rows = as_linear_constraints(constraints, fitting);
  const Problem problem(fitting, penalty, rows);

  Vector w0 = Vector::Zero(dataset.cols());
  if (config.initial_weights) {
    if (config.initial_weights->size() != dataset.cols())
      throw DimensionError("initial_weights length does not match columns");
    w0 = scaling.to_fitting(*config.initial_weights);
  }
  Vector theta = problem.lift(w0);
  const auto p = problem.dim();
  const auto& C = problem.C();
  const auto& b = problem.b();

  Vector mu = Vector::Zero(C.rows());
  double merit_weight = 0.0;
  bool converged = false;
  int iterations = 0;
  KktResiduals kkt;

  while (true) {
    const Vector grad = problem.gradient(theta);
    const Matrix hess = problem.hessian(theta);
    const double reg =
        (problem.split() ? 1e-6 : 1e-10) * (1.0 + hess.diagonal().maxCoeff());
    const Matrix G = hess + reg * Matrix::Identity(p, p);

    const auto qp = solve_qp(G, grad, C, b - C * theta);
    if (!qp.feasible) {
      throw InfeasibleError(
          "the fairness constraints admit no weights; check the bounds c");
    }
    mu = qp.multipliers;
    kkt = residuals(problem, theta, grad, mu);
    if (kkt.stationarity <= config.tolerance &&
        kkt.primal_infeasibility <= config.constraint_feasibility_tol &&
        kkt.complementary_slackness <= config.tolerance) {
      converged = true;
      break;
    }
    if (iterations >= config.max_iterations) break;

    // Backtracking on the exact l1 merit function f + nu * violation.
    const Vector& step = qp.x;
    if (mu.size() > 0)
      merit_weight = std::max(merit_weight, 1.1 * mu.maxCoeff() + 1e-8);
    const double f0 = problem.objective(theta);
    const double v0 = total_violation(C, b, theta);
    const double merit0 = f0 + merit_weight * v0;
    const double slope = grad.dot(step) - merit_weight * v0;
    double t = 1.0;
    Vector next = theta + step;
    if (slope < -1e-14 * (1.0 + std::abs(merit0))) {
      for (int k = 0; k < 60; ++k) {
        const double merit = problem.objective(next) +
                             merit_weight * total_violation(C, b, next);
        if (merit <= merit0 + 1e-4 * t * slope) break;
        t *= 0.5;
        next = theta + t * step;
      }
    }
    ++iterations;
    if (next == theta) break;  // no representable progress left
    theta = std::move(next);
  }

  // Split parts left a rounding error away from their bound are zero; this
  // keeps lasso zeros exact instead of +-1e-13.
  if (problem.split()) {
    const double snap = 1e-10 * (1.0 + theta.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 1; i < theta.size(); ++i)
      if (std::abs(theta[i]) <= snap) theta[i] = 0.0;
  }
  const Vector fitted = problem.weights(theta);
  FitResult out;
  out.weights =
      WeightVector(scaling.from_fitting(fitted), dataset.feature_names());
  out.converged = converged;
  out.iterations = iterations;
  out.final_loss = loss(fitted, fitting, penalty);
  out.data_loss = logistic_loss(out.weights.values(), dataset);
  out.kkt = kkt;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ConstraintReport rep;
    rep.label = row.label();
    rep.kind = row.kind;
    rep.mirrored = row.mirrored;
    rep.value = row.value(fitted);
    rep.bound = row.bound;
    rep.multiplier = mu[static_cast<Eigen::Index>(r)];
    rep.active = std::abs(rep.value - rep.bound) <=
                 config.constraint_feasibility_tol;
    out.constraints.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw ConfigError("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(constraint_feasibility_tol > 0.0))
    throw ConfigError("constraint_feasibility_tol must be positive");
}

FitResult fit_unconstrained(const Dataset& dataset, const PenaltySpec& penalty,
                            const SolverConfig& config) {
  return fit(dataset, penalty, {}, config);
}

FitResult fit_constrained(const Dataset& dataset, const PenaltySpec& penalty,
                          const std::vector<FairnessConstraint>& constraints,
                          const SolverConfig& config) {
  return fit(dataset, penalty, constraints, config);
}

}  // namespace fairlr
