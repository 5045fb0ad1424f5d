#pragma once

#include <Eigen/Dense>

#include "rimex/angular.hpp"

namespace rimex {

enum class CollisionKind { LaplaceBeltrami, IsotropicBGK };

/// Linear moment-space collision operator C(u) = A u.
///
/// `scale` multiplies the Laplace-Beltrami operator d/dmu((1 - mu^2) d/dmu):
/// 1/2 is the physical operator used by the transport solver, 1 reproduces the
/// plain vector field (0, -2 u1, -6 u2 + 2 u0) of the reduced M2 example.
/// The isotropic BGK operator ignores it.
struct CollisionModel {
  CollisionKind kind = CollisionKind::LaplaceBeltrami;
  double scale = 0.5;

  Eigen::MatrixXd matrix(int order) const;
};

/// Row k: scale * k(k-1) at column k-2 and -scale * k(k+1) at column k.
Eigen::MatrixXd laplace_beltrami_matrix(int order, double scale);

/// (u_0 / 2) <b> - u.
Eigen::MatrixXd isotropic_bgk_matrix(int order);
MomentVector isotropic_bgk_moments(const MomentVector& u, int order);

/// Local material data at one cell: absorption, scattering, source moments.
struct MaterialSample {
  double sigma_a = 0.0;
  double sigma_s = 0.0;
  MomentVector q_moments;  ///< <b Q>; empty means Q = 0
};

/// Forward Euler step of du/dt = C(u): u + dt A u.
MomentVector explicit_reduced_step(const MomentVector& u, double dt, const CollisionModel& model);

/// Implicit source step: solves ((1 + dt sigma_a) I - dt sigma_s A) u' = u* + dt q.
MomentVector implicit_relax_step(const MomentVector& u_star, double dt, const MaterialSample& m,
                                 const CollisionModel& model);

/// Same as above with a precomputed collision matrix.
MomentVector implicit_relax_step(const MomentVector& u_star, double dt, const MaterialSample& m,
                                 const Eigen::MatrixXd& collision_matrix);

}  // namespace rimex
