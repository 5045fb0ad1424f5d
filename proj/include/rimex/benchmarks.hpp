#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rimex/realizability.hpp"
#include "rimex/solver.hpp"

namespace rimex {

/// Smooth exact M_N solution psi_a = exp(alpha_0 + alpha_1 mu) of the slab
/// transport equation with absorption and a matching non-negative source.
struct ManufacturedFields {
  double K = 2.0;
  double b_offset = 0.0;

  explicit ManufacturedFields(double K);

  double alpha0(double t, double x) const;
  double alpha1(double t, double x) const;
  double sigma_a(double t, double x) const;
  double psi(double t, double x, double mu) const;
  /// [cos(x - t)(1 - mu)^2 + sigma_a] psi_a.
  double source(double t, double x, double mu) const;
  /// exp(alpha_0) 2 sinh(alpha_1) / alpha_1.
  double u0_exact(double t, double x) const;
  /// Cell mean of u0_exact over [a, b] by 5-point Gauss quadrature.
  double u0_cell_mean(double t, double a, double b) const;
};

inline constexpr double kManufacturedLeft = -3.14159265358979323846;
inline constexpr double kManufacturedRight = 3.14159265358979323846;
inline constexpr double kManufacturedFinalTime = 3.14159265358979323846 / 5.0;

/// Periodic run on (-pi, pi) to t = pi/5 with sigma_s = 0; the initial data are
/// cell means of the exact moments. Absorption and source moments are sampled
/// at the cell centres (time level per RunConfig::material_time_fraction).
RunConfig manufactured_config(double K, int nx, const ClosureConfig& closure = {}, int order = 3,
                              int points_per_half = kDefaultPointsPerHalf);

/// Exact zeroth-moment cell means at time t.
std::vector<double> manufactured_exact_means(const ManufacturedFields& f, const Grid& grid,
                                             double t);

struct ErrorReport {
  double E1 = 0.0;
  double Einf = 0.0;
  /// Observed orders against the previous refinement; empty for the first
  /// row or when an error vanishes.
  std::optional<double> nu1;
  std::optional<double> nuinf;
};

/// E1 = dz sum |numeric - exact|, Einf = max |numeric - exact|.
ErrorReport error_norms(const std::vector<double>& numeric, const std::vector<double>& exact,
                        double dz);

/// ln(E_coarse / E_fine) / ln(dz_coarse / dz_fine); nullopt if an error is zero.
std::optional<double> observed_order(double e_coarse, double e_fine, double dz_coarse,
                                     double dz_fine);

struct ConvergenceRow {
  int nx = 0;
  ErrorReport errors;
};

struct StudyOptions {
  ClosureConfig closure;
  int order = 3;
  int points_per_half = kDefaultPointsPerHalf;
  double cfl_factor = 1.0;
  double material_time_fraction = 0.5;
  int threads = 1;
};

/// One manufactured-solution run per resolution; nx_list must be increasing
/// and even.
std::vector<ConvergenceRow> convergence_study(double K, const std::vector<int>& nx_list,
                                              const StudyOptions& options = {});

inline constexpr double kPlaneSourceVacuum = 0.5e-8;
inline constexpr double kPlaneSourceHalfWidth = 1.2;

/// Plane source on [-1.2, 1.2] to t = 1 with sigma_s = 1 and vacuum Dirichlet
/// boundaries. A unit-mass isotropic Dirac at x = 0 is split between the two
/// centre cells. nx must be even.
RunConfig plane_source_config(int order, int nx, const CollisionModel& collision = {},
                              const ClosureConfig& closure = {});

/// Predicate-versus-oracle comparison on seeded random vectors. u_0 is
/// log-uniform in [0.1, 10]; the normalized moments are either uniform in a
/// box slightly larger than the normalized realizable set or moments of one to three
/// random atoms with a small perturbation.
struct AgreementReport {
  int samples = 0;
  int realizable = 0;     ///< accepted by the predicate
  int in_band = 0;        ///< |margin / u_0| < band, not compared
  int indeterminate = 0;  ///< oracle hit its iteration cap
  int agreed = 0;
  int disagreed = 0;
};

inline constexpr int kOraclePointsPerHalf = 1000;

AgreementReport realizability_agreement(int order, int samples, std::uint64_t seed,
                                        double band = 1e-6,
                                        int oracle_points_per_half = kOraclePointsPerHalf);

/// The same for mixed moments (u_0, u_1, u_2+, u_2-).
AgreementReport realizability_agreement_mixed2(int samples, std::uint64_t seed,
                                               double band = 1e-6,
                                               int oracle_points_per_half = kOraclePointsPerHalf);

MomentVector random_test_moments(int order, std::uint64_t seed);
MixedMoment2Vector random_test_mixed2(std::uint64_t seed);

}  // namespace rimex
