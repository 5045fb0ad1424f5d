#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rimex/angular.hpp"
#include "rimex/error.hpp"

namespace rimex {

/// Dual variables alpha of the Maxwell-Boltzmann entropy ansatz
/// psi(mu) = exp(b(mu)^T alpha).
using Multipliers = Eigen::VectorXd;

struct ClosureConfig {
  double tau = 1e-6;
  int max_iterations = 200;
  /// Blending weights r toward the isotropic moment, tried in order.
  std::vector<double> regularization_schedule{0.0, 1e-8, 1e-6, 1e-4, 1e-2};
  /// Extra Newton steps taken after the gradient criterion is met, kept only
  /// while they reduce the gradient norm.
  int refinement_steps = 2;

  void validate() const;
};

struct DualReport {
  Multipliers alpha;
  int iterations = 0;
  double regularization_used = 0.0;
  /// ||<b psi> - u_r||_2 in the units of u.
  double final_gradient_norm = 0.0;
};

/// Thrown when every regularization level failed. Carries the best iterate.
class ClosureFailure : public Error {
 public:
  ClosureFailure(const std::string& what, DualReport best)
      : Error(what), best_(std::move(best)) {}
  const DualReport& best() const { return best_; }

 private:
  DualReport best_;
};

struct DualEvaluation {
  double value;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Value <exp(b^T alpha)> - u^T alpha with its gradient and hessian.
/// Throws OverflowError if some exponent exceeds the double range.
DualEvaluation dual_objective(const Multipliers& alpha, const MomentVector& u,
                              const Quadrature& q);

/// Minimize the dual for the multipliers of u. The problem is solved for u/u_0
/// and alpha_0 is shifted by ln u_0 afterwards, so the gradient criterion is
/// tau * u_0 in the units of u (never looser than tau * max(1, u_0)).
DualReport solve_dual(const MomentVector& u, const Quadrature& q,
                      const ClosureConfig& cfg = {},
                      const std::optional<Multipliers>& warm_start = std::nullopt);

/// alpha = (ln(u_0 / 2), 0, ..., 0).
Multipliers isotropic_multipliers(double u0, int order);

/// psi_i = exp(b(mu_i)^T alpha).
std::vector<double> ansatz_samples(const Multipliers& alpha, const Quadrature& q);

/// Half-range flux moments: component k = int_half mu^(k+1) psi dmu.
Eigen::VectorXd half_flux_moments(const Multipliers& alpha, const Quadrature& q,
                                  int order, HalfRange half);

/// F(u) = <mu b psi>.
Eigen::VectorXd flux_moments(const Multipliers& alpha, const Quadrature& q, int order);

/// Kinetic upwind flux: positive half-range from the left ansatz, negative
/// half-range from the right ansatz.
Eigen::VectorXd kinetic_flux(const Multipliers& alpha_left, const Multipliers& alpha_right,
                             const Quadrature& q, int order);

}  // namespace rimex
