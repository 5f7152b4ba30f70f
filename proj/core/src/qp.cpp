#include "fairlr/qp.hpp"

#include <cmath>
#include <limits>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

QpSolution solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                    const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                    int max_iterations) {
  const auto n = G.rows();
  const auto m = C.rows();
  if (G.cols() != n || g.size() != n || (m > 0 && C.cols() != n) ||
      b.size() != m) {
    throw DimensionError("solve_qp: inconsistent problem dimensions");
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(G);
  if (chol.info() != Eigen::Success)
    throw Error("solve_qp: G is not positive definite");
  if (max_iterations <= 0) max_iterations = static_cast<int>(10 * (n + m) + 50);

  QpSolution out;
  out.x = chol.solve(-g);
  out.multipliers = Eigen::VectorXd::Zero(m);

  // Active normals as columns, with G^{-1} applied to them cached.
  Eigen::MatrixXd normals(n, 0);
  Eigen::MatrixXd ginv_normals(n, 0);
  Eigen::VectorXd u;  // multipliers of the active rows, same order
  std::vector<int>& active = out.active;

  auto slack = [&](Eigen::Index j) { return C.row(j).dot(out.x) - b[j]; };
  auto violation_tol = [&](Eigen::Index j) {
    return 1e-12 * (1.0 + std::abs(b[j]) +
                    C.row(j).cwiseAbs().dot(out.x.cwiseAbs()));
  };
  auto drop = [&](Eigen::Index k, Eigen::VectorXd& u_plus) {
    const auto q = normals.cols();
    for (Eigen::Index j = k; j + 1 < q; ++j) {
      normals.col(j) = normals.col(j + 1);
      ginv_normals.col(j) = ginv_normals.col(j + 1);
    }
    normals.conservativeResize(Eigen::NoChange, q - 1);
    ginv_normals.conservativeResize(Eigen::NoChange, q - 1);
    for (Eigen::Index j = k; j + 1 < u_plus.size(); ++j) u_plus[j] = u_plus[j + 1];
    u_plus.conservativeResize(u_plus.size() - 1);
    active.erase(active.begin() + k);
  };

  int iterations = 0;
  while (true) {
    // Most violated constraint.
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double s = slack(j);
      if (s < -violation_tol(j) && s < worst) {
        worst = s;
        p = j;
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd np = C.row(p).transpose();
    const Eigen::VectorXd ginv_np = chol.solve(np);
    Eigen::VectorXd u_plus(u.size() + 1);
    u_plus << u, 0.0;

    while (true) {
      if (++iterations > max_iterations) {
        throw Error("solve_qp: iteration limit reached");
      }
      const auto q = normals.cols();
      Eigen::VectorXd r(q);
      Eigen::VectorXd z = ginv_np;
      if (q > 0) {
        const Eigen::MatrixXd M = normals.transpose() * ginv_normals;
        r = M.ldlt().solve(ginv_normals.transpose() * np);
        z -= ginv_normals * r;
      }

      double t1 = kInf;
      Eigen::Index k = -1;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (r[j] > 0.0 && u_plus[j] / r[j] < t1) {
          t1 = u_plus[j] / r[j];
          k = j;
        }
      }
      const double curvature = z.dot(np);
      const double t2 = curvature > 1e-12 * np.dot(ginv_np)
                            ? -slack(p) / curvature
                            : kInf;

      if (t1 == kInf && t2 == kInf) {
        out.feasible = false;
        out.iterations = iterations;
        return out;
      }
      if (t2 == kInf) {
        u_plus.head(q) -= t1 * r;
        u_plus[q] += t1;
        drop(k, u_plus);
        continue;
      }
      const double t = std::min(t1, t2);
      out.x += t * z;
      u_plus.head(q) -= t * r;
      u_plus[q] += t;
      if (t == t2) {
        normals.conservativeResize(Eigen::NoChange, q + 1);
        ginv_normals.conservativeResize(Eigen::NoChange, q + 1);
        normals.col(q) = np;
        ginv_normals.col(q) = ginv_np;
        active.push_back(static_cast<int>(p));
        u = u_plus;
        break;
      }
      drop(k, u_plus);
    }
  }

  for (std::size_t j = 0; j < active.size(); ++j)
    out.multipliers[active[j]] = std::max(0.0, u[static_cast<Eigen::Index>(j)]);
  out.iterations = iterations;
  return out;
}

}  // namespace fairlr
