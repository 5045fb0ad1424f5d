#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rimex/angular.hpp"
#include "rimex/closure.hpp"
#include "rimex/collision.hpp"
#include "rimex/error.hpp"

namespace rimex {

/// Equidistant cells on (z_left, z_right); cell j (0-based) is centred at
/// z_left + (j + 1/2) dz.
struct Grid {
  int nx = 0;
  double z_left = 0.0;
  double z_right = 1.0;

  double dz() const { return (z_right - z_left) / nx; }
  double center(int j) const { return z_left + (j + 0.5) * dz(); }
  void validate() const;
};

enum class Side { Left, Right };

struct PeriodicBoundary {};

/// Ghost-cell moments <b psi_b(t, boundary, .)> on each side.
struct DirichletBoundary {
  std::function<MomentVector(double t)> left;
  std::function<MomentVector(double t)> right;
};

using BoundaryCondition = std::variant<PeriodicBoundary, DirichletBoundary>;

/// Dirichlet data from angle-independent boundary densities.
DirichletBoundary constant_density_boundary(double psi_left, double psi_right, int order);

/// sigma_a, sigma_s and source moments at (t, x).
using MaterialField = std::function<MaterialSample(double t, double x)>;

struct DiagnosticsRecord {
  int step = 0;
  double t = 0.0;
  double total_mass = 0.0;
  /// Smallest realizability margin over cells, divided by the cell's u_0.
  double min_margin = 0.0;
  std::optional<double> min_d_rel;
  int closure_iterations_max = 0;
  int regularizations_used = 0;
};

struct RunConfig {
  int order = 3;
  Grid grid;
  double t_final = 1.0;
  double cfl_factor = 1.0;
  int points_per_half = kDefaultPointsPerHalf;
  ClosureConfig closure;
  CollisionModel collision;
  MaterialField material;  ///< empty: vacuum (no absorption, scattering, source)
  /// The implicit stage samples the material at t^k + material_time_fraction * dt
  /// and the cell centre; 1/2 approximates the time average over the step.
  double material_time_fraction = 0.5;
  BoundaryCondition bc = PeriodicBoundary{};
  std::vector<MomentVector> initial_means;

  bool track_distance = false;
  /// Cells with u_0 at or below this value are skipped by the distance tracker.
  double distance_floor = 0.0;
  double realizability_tolerance = 1e-12;
  int threads = 1;

  void validate() const;
};

struct SolverState {
  double t = 0.0;
  int step = 0;
  std::vector<MomentVector> means;
  /// Last multipliers per cell, used to warm-start the closure. Empty vectors
  /// mark cells without a cached solution.
  std::vector<Multipliers> alphas;
  std::vector<DiagnosticsRecord> diagnostics;
};

/// A cell-level failure inside one time step.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, int cell, MomentVector moments)
      : Error(what), cell_(cell), moments_(std::move(moments)) {}
  int cell() const { return cell_; }
  const MomentVector& moments() const { return moments_; }

 private:
  int cell_;
  MomentVector moments_;
};

/// A run aborted by a step failure; carries the last valid state.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& what, SolverState last_valid)
      : Error(what), last_valid_(std::move(last_valid)) {}
  const SolverState& last_valid() const { return last_valid_; }

 private:
  SolverState last_valid_;
};

/// dt = cfl_factor * dz.
double cfl_timestep(double dz, double cfl_factor);

struct TimeStepPlan {
  double dt;
  int steps;
};

/// Uniform step no larger than cfl_factor * dz that lands exactly on t_final.
TimeStepPlan plan_timesteps(double dz, double cfl_factor, double t_final);

MomentVector ghost_moments(const SolverState& state, const BoundaryCondition& bc, Side side,
                           double t);

/// First-order IMEX finite-volume solver: explicit kinetic upwind transport
/// followed by an implicit, cell-local source/collision solve.
class Solver {
 public:
  explicit Solver(RunConfig config);

  const RunConfig& config() const { return config_; }
  const Quadrature& quadrature() const { return quadrature_; }
  const SolverState& state() const { return state_; }
  const TimeStepPlan& plan() const { return plan_; }
  bool done() const { return state_.step >= plan_.steps; }

  /// Intermediate means u*_j of the transport stage; refreshes the multiplier
  /// cache of the current state.
  std::vector<MomentVector> explicit_transport_step(double dt);

  /// One full step (transport + implicit source) with the planned dt.
  void imex_step();

  /// Steps until t_final. Throws RunFailure with the last valid state.
  const SolverState& run();

  /// Diagnostics of the current state (also appended after every step).
  DiagnosticsRecord measure(int closure_iterations_max, int regularizations_used) const;

  /// Relative distance per cell; nullopt where u_0 <= distance_floor.
  std::vector<std::optional<double>> relative_distances() const;

 private:
  RunConfig config_;
  Quadrature quadrature_;
  Eigen::MatrixXd collision_matrix_;
  TimeStepPlan plan_;
  SolverState state_;
  int last_iterations_max_ = 0;
  int last_regularizations_ = 0;
};

/// Convenience: construct a solver and run it to completion.
SolverState run(const RunConfig& config);

}  // namespace rimex
