#include <algorithm>
#include <cmath>
#include <vector>

#include "rimex/error.hpp"
#include "rimex/realizability.hpp"

namespace rimex {
namespace {

// Phase-one simplex for {x >= 0 : A x = b}. Returns the minimal sum of
// artificial variables, or a negative value if the iteration cap was hit.
double phase_one_residual(const Eigen::MatrixXd& a, Eigen::VectorXd b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index cols = n + m + 1;  // structural | artificial | rhs
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, cols - 1) = sign * b[i];
  }
  // Objective row holds reduced costs of sum(artificials).
  for (Eigen::Index i = 0; i < m; ++i) {
    t.row(m).head(n) -= t.row(i).head(n);
    t(m, cols - 1) -= t(i, cols - 1);
  }
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  const double scale = std::max(1.0, t.col(cols - 1).head(m).cwiseAbs().maxCoeff());
  const double eps = 1e-13 * scale;
  const int max_iterations = 50 * static_cast<int>(m + n);
  const int bland_after = 200;

  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Index enter = -1;
    if (it < bland_after) {
      double most_negative = -eps;
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (t(m, j) < most_negative) {
          most_negative = t(m, j);
          enter = j;
        }
      }
    } else {
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (t(m, j) < -eps) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) return std::max(-t(m, cols - 1), 0.0);

    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > 1e-14) {
        const double ratio = t(i, cols - 1) / t(i, enter);
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return std::max(-t(m, cols - 1), 0.0);  // unbounded column: cannot lower cost

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[leave] = enter;
  }
  return -1.0;
}

OracleVerdict feasibility(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double u0) {
  if (!b.allFinite()) return OracleVerdict::Infeasible;
  const double residual = phase_one_residual(a, b);
  if (residual < 0.0) return OracleVerdict::Indeterminate;
  return residual <= 1e-9 * std::max(1.0, std::abs(u0)) ? OracleVerdict::Feasible
                                                         : OracleVerdict::Infeasible;
}

// Candidate atom locations: all quadrature nodes plus -1, 0 and 1.
std::vector<double> atom_locations(const Quadrature& q) {
  std::vector<double> loc(q.nodes().begin(), q.nodes().end());
  loc.push_back(-1.0);
  loc.push_back(0.0);
  loc.push_back(1.0);
  std::sort(loc.begin(), loc.end());
  return loc;
}

}  // namespace

OracleVerdict lp_realizability_oracle(const MomentVector& u, const Quadrature& q, int order) {
  if (u.size() != order + 1) throw ContractViolation("moment vector does not match order");
  if (!(u[0] > 0.0)) return OracleVerdict::Infeasible;
  const std::vector<double> loc = atom_locations(q);
  Eigen::MatrixXd a(order + 1, static_cast<Eigen::Index>(loc.size()));
  for (std::size_t j = 0; j < loc.size(); ++j) {
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      a(k, static_cast<Eigen::Index>(j)) = p;
      p *= loc[j];
    }
  }
  return feasibility(a, u, u[0]);
}

OracleVerdict lp_realizability_oracle_mixed2(const MixedMoment2Vector& v, const Quadrature& q) {
  if (!(v.u0 > 0.0)) return OracleVerdict::Infeasible;
  const std::vector<double> loc = atom_locations(q);
  Eigen::MatrixXd a(4, static_cast<Eigen::Index>(loc.size()));
  for (std::size_t j = 0; j < loc.size(); ++j) {
    const double mu = loc[j];
    const auto c = static_cast<Eigen::Index>(j);
    a(0, c) = 1.0;
    a(1, c) = mu;
    a(2, c) = mu > 0.0 ? mu * mu : 0.0;
    a(3, c) = mu < 0.0 ? mu * mu : 0.0;
  }
  Eigen::VectorXd b(4);
  b << v.u0, v.u1, v.u2_plus, v.u2_minus;
  return feasibility(a, b, v.u0);
}

}  // namespace rimex
