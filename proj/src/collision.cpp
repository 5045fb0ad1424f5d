#include "rimex/collision.hpp"

#include <cmath>

#include "rimex/error.hpp"

namespace rimex {

Eigen::MatrixXd laplace_beltrami_matrix(int order, double scale) {
  if (order < 1) throw ConfigError("collision operator needs order >= 1");
  if (!(scale > 0.0)) throw ConfigError("Laplace-Beltrami scale must be positive");
  const int n = order + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    if (k >= 2) a(k, k - 2) = scale * k * (k - 1);
    a(k, k) = -scale * k * (k + 1);
  }
  return a;
}

Eigen::MatrixXd isotropic_bgk_matrix(int order) {
  const MomentVector iso = isotropic_moments(order);
  const int n = order + 1;
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(n, n);
  a.col(0) += iso;
  a(0, 0) = 0.0;  // exact mass conservation
  return a;
}

Eigen::MatrixXd CollisionModel::matrix(int order) const {
  return kind == CollisionKind::LaplaceBeltrami ? laplace_beltrami_matrix(order, scale)
                                                : isotropic_bgk_matrix(order);
}

MomentVector isotropic_bgk_moments(const MomentVector& u, int order) {
  if (u.size() != order + 1) throw ContractViolation("moment vector does not match order");
  MomentVector r = u[0] * isotropic_moments(order) - u;
  r[0] = 0.0;
  return r;
}

MomentVector explicit_reduced_step(const MomentVector& u, double dt, const CollisionModel& model) {
  if (!(dt >= 0.0)) throw ConfigError("time step must be non-negative");
  const int order = static_cast<int>(u.size()) - 1;
  return u + dt * (model.matrix(order) * u);
}

MomentVector implicit_relax_step(const MomentVector& u_star, double dt, const MaterialSample& m,
                                 const Eigen::MatrixXd& a) {
  if (!(dt >= 0.0)) throw ConfigError("time step must be non-negative");
  if (!(m.sigma_a >= 0.0) || !(m.sigma_s >= 0.0) || !std::isfinite(m.sigma_a) ||
      !std::isfinite(m.sigma_s))
    throw ConfigError("material coefficients must be finite and non-negative");
  const Eigen::Index n = u_star.size();
  if (n < 2) throw ContractViolation("moment vector needs at least two entries");
  if (a.rows() != n || a.cols() != n) throw ContractViolation("collision matrix size mismatch");
  if (!a.row(0).isZero(0.0)) throw ContractViolation("collision matrix must conserve mass");

  MomentVector rhs = u_star;
  if (m.q_moments.size() != 0) {
    if (m.q_moments.size() != n) throw ContractViolation("source moments size mismatch");
    rhs += dt * m.q_moments;
  }
  if (dt == 0.0) return rhs;
  const Eigen::MatrixXd system =
      (1.0 + dt * m.sigma_a) * Eigen::MatrixXd::Identity(n, n) - (dt * m.sigma_s) * a;
  // The first row of A vanishes, so u'_0 decouples; solving it directly keeps
  // mass conservation exact in floating point.
  MomentVector out(n);
  out[0] = rhs[0] / system(0, 0);
  const Eigen::Index r = n - 1;
  const MomentVector tail_rhs = rhs.tail(r) - system.col(0).tail(r) * out[0];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.bottomRightCorner(r, r));
  out.tail(r) = lu.solve(tail_rhs);
  if (!out.allFinite()) throw Error("implicit relaxation produced non-finite moments");
  return out;
}

MomentVector implicit_relax_step(const MomentVector& u_star, double dt, const MaterialSample& m,
                                 const CollisionModel& model) {
  return implicit_relax_step(u_star, dt, m, model.matrix(static_cast<int>(u_star.size()) - 1));
}

}  // namespace rimex
