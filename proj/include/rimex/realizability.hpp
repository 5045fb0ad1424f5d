#pragma once

#include <cstdint>
#include <vector>

#include "rimex/angular.hpp"

namespace rimex {

/// Outcome of a realizability predicate.
///
/// `margin` is the smallest slack among the defining inequalities, each
/// rescaled to be homogeneous of degree one in the moments (a degree-p
/// inequality is divided by u_0^(p-1)). `tolerance` is the absolute slack
/// accepted, rel_tol * u_0, so that realizable <=> margin >= -tolerance and
/// verdicts are invariant under positive scaling.
struct RealizabilityVerdict {
  bool realizable = false;
  double margin = 0.0;
  double tolerance = 0.0;
};

inline constexpr double kDefaultRealizabilityTolerance = 1e-12;

/// Full-moment realizability on [-1, 1] for orders 1..3.
RealizabilityVerdict is_realizable_full(const MomentVector& u, int order,
                                        double rel_tol = kDefaultRealizabilityTolerance);

/// Classical first-order mixed moments (u_0, u_1+, u_1-).
RealizabilityVerdict is_realizable_mixed1(double u0, double u1_plus, double u1_minus,
                                          double rel_tol = kDefaultRealizabilityTolerance);

/// Differentiable mixed moments of order two: full u_0, u_1 and the half-range
/// second moments u_2+ = int_0^1 mu^2 psi, u_2- = int_-1^0 mu^2 psi.
struct MixedMoment2Vector {
  double u0 = 0.0;
  double u1 = 0.0;
  double u2_plus = 0.0;
  double u2_minus = 0.0;
};

RealizabilityVerdict is_realizable_mixed2(const MixedMoment2Vector& v,
                                          double rel_tol = kDefaultRealizabilityTolerance);

struct Atom {
  double location;
  double weight;
};

/// Finite combination of Dirac masses in mu.
struct AtomicDensity {
  std::vector<Atom> atoms;
};

/// Non-negative two-atom density realizing v (one atom per half-interval).
/// Throws NotRealizableError when v is outside the realizable set.
AtomicDensity atomic_density_mixed2(const MixedMoment2Vector& v);

/// Mixed moments (u0, u1, u2+, u2-) of an atomic density.
MixedMoment2Vector mixed2_moments(const AtomicDensity& density);

enum class OracleVerdict { Feasible, Infeasible, Indeterminate };

/// Linear feasibility oracle: does a non-negative measure supported on the
/// quadrature nodes (plus the points -1, 0, 1) reproduce u? Solved with a
/// phase-one simplex; residual threshold 1e-9 * max(1, u_0).
OracleVerdict lp_realizability_oracle(const MomentVector& u, const Quadrature& q, int order);

/// The same oracle for the mixed basis (1, mu, mu^2 on [0,1], mu^2 on [-1,0]).
OracleVerdict lp_realizability_oracle_mixed2(const MixedMoment2Vector& v, const Quadrature& q);

struct BoundaryDistance {
  double d;      ///< Euclidean distance to the boundary of the u_0 = 1 slice
  double d_rel;  ///< d divided by the largest attainable distance
};

/// Largest distance from the boundary inside the normalized realizable set:
/// 1 (order 1), 1/2 (order 2), 1/5 (order 3).
double max_boundary_distance(int order);

/// Distance of normalized moments to the boundary of the normalized
/// realizable set, orders 1..3. Throws NotRealizableError if eta is outside.
BoundaryDistance distance_to_boundary(const NormalizedMoments& eta, int order);

namespace detail {
/// Distance computed from the boundary's two-atom parametrization; valid for
/// orders 2 and 3. Exposed for cross-checking the order-2 closed form.
double boundary_distance_by_atoms(const Eigen::VectorXd& eta, int order);
}  // namespace detail

/// Moments of psi_i = exp(g_i) with g_i drawn from a seeded smooth random
/// field, so the result is strictly realizable.
MomentVector random_realizable(int order, std::uint64_t seed, const Quadrature& q);

}  // namespace rimex
