#include "rimex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rimex/realizability.hpp"

namespace rimex {
namespace {

std::string describe(const MomentVector& u) {
  std::ostringstream s;
  s.precision(17);
  s << "(";
  for (Eigen::Index k = 0; k < u.size(); ++k) s << (k ? ", " : "") << u[k];
  s << ")";
  return s.str();
}

// Runs body(j) for j in [0, n) and rethrows the exception of the lowest
// failing index after the loop, so failures are thread-count independent.
template <class Body>
void for_each_cell(int n, int threads, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1))
#endif
  for (int j = 0; j < n; ++j) {
    try {
      body(j);
    } catch (...) {
      errors[static_cast<std::size_t>(j)] = std::current_exception();
    }
  }
  (void)threads;
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct CellClosure {
  Multipliers alpha;
  int iterations = 0;
  bool regularized = false;
};

CellClosure close_cell(const MomentVector& u, const Quadrature& q, const ClosureConfig& cfg,
                       const Multipliers& warm, int cell) {
  try {
    // Near-vacuum cells restart from the isotropic guess.
    std::optional<Multipliers> start;
    if (warm.size() == u.size() && u[0] >= 1e-10) start = warm;
    DualReport r = solve_dual(u, q, cfg, start);
    return {std::move(r.alpha), r.iterations, r.regularization_used > 0.0};
  } catch (const Error& e) {
    throw StepFailure("closure failed in cell " + std::to_string(cell) + " for moments " +
                          describe(u) + ": " + e.what(),
                      cell, u);
  }
}

}  // namespace

void Grid::validate() const {
  if (nx < 2) throw ConfigError("grid needs at least two cells");
  if (!(z_right > z_left) || !std::isfinite(z_left) || !std::isfinite(z_right))
    throw ConfigError("grid needs a finite interval with z_left < z_right");
}

DirichletBoundary constant_density_boundary(double psi_left, double psi_right, int order) {
  if (!(psi_left > 0.0) || !(psi_right > 0.0))
    throw ConfigError("boundary densities must be positive");
  const MomentVector iso = isotropic_moments(order);
  const MomentVector left = 2.0 * psi_left * iso;
  const MomentVector right = 2.0 * psi_right * iso;
  return {[left](double) { return left; }, [right](double) { return right; }};
}

void RunConfig::validate() const {
  if (order < 1 || order > 3) throw ConfigError("solver supports moment orders 1..3");
  grid.validate();
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (!(cfl_factor > 0.0) || cfl_factor > 1.0)
    throw ConfigError("cfl_factor must lie in (0, 1]");
  if (points_per_half < 2) throw ConfigError("need at least two quadrature points per half");
  closure.validate();
  if (collision.kind == CollisionKind::LaplaceBeltrami && !(collision.scale > 0.0))
    throw ConfigError("Laplace-Beltrami scale must be positive");
  if (!(material_time_fraction >= 0.0 && material_time_fraction <= 1.0))
    throw ConfigError("material_time_fraction must lie in [0, 1]");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!(realizability_tolerance >= 0.0)) throw ConfigError("realizability tolerance must be >= 0");
  if (!(distance_floor >= 0.0)) throw ConfigError("distance floor must be >= 0");
  if (static_cast<int>(initial_means.size()) != grid.nx)
    throw ConfigError("initial data must provide one moment vector per cell");
  if (const auto* d = std::get_if<DirichletBoundary>(&bc)) {
    if (!d->left || !d->right) throw ConfigError("Dirichlet boundary needs data on both sides");
  }
  for (int j = 0; j < grid.nx; ++j) {
    const MomentVector& u = initial_means[static_cast<std::size_t>(j)];
    if (u.size() != order + 1)
      throw ConfigError("initial moment vector " + std::to_string(j) + " has the wrong size");
    if (!is_realizable_full(u, order, realizability_tolerance).realizable)
      throw NotRealizableError("initial moments in cell " + std::to_string(j) +
                               " are not realizable: " + describe(u));
  }
}

double cfl_timestep(double dz, double cfl_factor) {
  if (!(dz > 0.0)) throw ConfigError("dz must be positive");
  if (!(cfl_factor > 0.0) || cfl_factor > 1.0) throw ConfigError("cfl_factor must lie in (0, 1]");
  return cfl_factor * dz;
}

TimeStepPlan plan_timesteps(double dz, double cfl_factor, double t_final) {
  const double dt_max = cfl_timestep(dz, cfl_factor);
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  const int steps = std::max(1, static_cast<int>(std::ceil(t_final / dt_max - 1e-9)));
  return {t_final / steps, steps};
}

MomentVector ghost_moments(const SolverState& state, const BoundaryCondition& bc, Side side,
                           double t) {
  if (state.means.empty()) throw ContractViolation("state has no cells");
  if (std::holds_alternative<PeriodicBoundary>(bc))
    return side == Side::Left ? state.means.back() : state.means.front();
  const auto& d = std::get<DirichletBoundary>(bc);
  MomentVector g = side == Side::Left ? d.left(t) : d.right(t);
  const int order = static_cast<int>(state.means.front().size()) - 1;
  if (g.size() != order + 1) throw ContractViolation("boundary moments have the wrong size");
  if (!is_realizable_full(g, order).realizable)
    throw ConfigError("boundary moments " + describe(g) + " are not realizable");
  return g;
}

Solver::Solver(RunConfig config)
    : config_(std::move(config)),
      quadrature_(make_quadrature(config_.points_per_half)),
      plan_{0.0, 0} {
  config_.validate();
  collision_matrix_ = config_.collision.matrix(config_.order);
  plan_ = plan_timesteps(config_.grid.dz(), config_.cfl_factor, config_.t_final);
  state_.means = config_.initial_means;
  state_.alphas.assign(state_.means.size(), Multipliers());
  state_.diagnostics.push_back(measure(0, 0));
}

std::vector<MomentVector> Solver::explicit_transport_step(double dt) {
  const int n = config_.grid.nx;
  const int order = config_.order;
  const double lambda = dt / config_.grid.dz();
  const Quadrature& q = quadrature_;

  // Cells 0..n-1 are interior, n is the left ghost and n+1 the right ghost.
  std::vector<CellClosure> closures(static_cast<std::size_t>(n + 2));
  for_each_cell(n, config_.threads, [&](int j) {
    const auto sj = static_cast<std::size_t>(j);
    closures[sj] = close_cell(state_.means[sj], q, config_.closure, state_.alphas[sj], j);
  });
  if (std::holds_alternative<PeriodicBoundary>(config_.bc)) {
    closures[static_cast<std::size_t>(n)] = closures[static_cast<std::size_t>(n - 1)];
    closures[static_cast<std::size_t>(n + 1)] = closures[0];
  } else {
    const MomentVector gl = ghost_moments(state_, config_.bc, Side::Left, state_.t);
    const MomentVector gr = ghost_moments(state_, config_.bc, Side::Right, state_.t);
    closures[static_cast<std::size_t>(n)] = close_cell(gl, q, config_.closure, Multipliers(), -1);
    closures[static_cast<std::size_t>(n + 1)] =
        close_cell(gr, q, config_.closure, Multipliers(), n);
  }

  last_iterations_max_ = 0;
  last_regularizations_ = 0;
  for (int j = 0; j < n; ++j) {
    const auto& c = closures[static_cast<std::size_t>(j)];
    last_iterations_max_ = std::max(last_iterations_max_, c.iterations);
    if (c.regularized) ++last_regularizations_;
    state_.alphas[static_cast<std::size_t>(j)] = c.alpha;
  }

  // Half-range fluxes per cell; slot j+1 holds cell j, slots 0 and n+1 the ghosts.
  std::vector<Eigen::VectorXd> f_pos(static_cast<std::size_t>(n + 2)),
      f_neg(static_cast<std::size_t>(n + 2));
  auto slot_alpha = [&](int s) -> const Multipliers& {
    if (s == 0) return closures[static_cast<std::size_t>(n)].alpha;
    if (s == n + 1) return closures[static_cast<std::size_t>(n + 1)].alpha;
    return closures[static_cast<std::size_t>(s - 1)].alpha;
  };
  for_each_cell(n + 2, config_.threads, [&](int s) {
    const auto ss = static_cast<std::size_t>(s);
    f_pos[ss] = half_flux_moments(slot_alpha(s), q, order, HalfRange::Positive);
    f_neg[ss] = half_flux_moments(slot_alpha(s), q, order, HalfRange::Negative);
  });

  // Interface i (0..n) sits between slots i and i+1.
  std::vector<Eigen::VectorXd> interface_flux(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    interface_flux[si] = f_pos[si] + f_neg[si + 1];
  }

  std::vector<MomentVector> u_star(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    u_star[sj] = state_.means[sj] - lambda * (interface_flux[sj + 1] - interface_flux[sj]);
  }
  return u_star;
}

void Solver::imex_step() {
  if (done()) throw ContractViolation("solver already reached t_final");
  const double dt = plan_.dt;
  const int n = config_.grid.nx;
  const int order = config_.order;
  std::vector<MomentVector> u_star = explicit_transport_step(dt);

  const int next_step = state_.step + 1;
  const double t_next = next_step == plan_.steps ? config_.t_final : next_step * dt;
  const double t_material = state_.t + config_.material_time_fraction * (t_next - state_.t);
  std::vector<MomentVector> next(static_cast<std::size_t>(n));
  for_each_cell(n, config_.threads, [&](int j) {
    const auto sj = static_cast<std::size_t>(j);
    MaterialSample m;
    if (config_.material) m = config_.material(t_material, config_.grid.center(j));
    next[sj] = implicit_relax_step(u_star[sj], dt, m, collision_matrix_);
    const RealizabilityVerdict v =
        is_realizable_full(next[sj], order, config_.realizability_tolerance);
    if (!v.realizable) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "step " << next_step << " produced non-realizable moments in cell " << j << " "
          << describe(next[sj]) << " (margin " << v.margin << ")";
      throw StepFailure(msg.str(), j, next[sj]);
    }
  });

  state_.means = std::move(next);
  state_.step = next_step;
  state_.t = t_next;
  state_.diagnostics.push_back(measure(last_iterations_max_, last_regularizations_));
}

const SolverState& Solver::run() {
  while (!done()) {
    SolverState snapshot = state_;
    try {
      imex_step();
    } catch (const Error& e) {
      throw RunFailure(e.what(), std::move(snapshot));
    }
  }
  return state_;
}

std::vector<std::optional<double>> Solver::relative_distances() const {
  const int n = config_.grid.nx;
  std::vector<std::optional<double>> out(static_cast<std::size_t>(n));
  for_each_cell(n, config_.threads, [&](int j) {
    const MomentVector& u = state_.means[static_cast<std::size_t>(j)];
    if (!(u[0] > config_.distance_floor)) return;
    out[static_cast<std::size_t>(j)] = distance_to_boundary(normalize(u), config_.order).d_rel;
  });
  return out;
}

DiagnosticsRecord Solver::measure(int closure_iterations_max, int regularizations_used) const {
  DiagnosticsRecord r;
  r.step = state_.step;
  r.t = state_.t;
  r.closure_iterations_max = closure_iterations_max;
  r.regularizations_used = regularizations_used;
  double mass = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const MomentVector& u : state_.means) {
    mass += u[0];
    const RealizabilityVerdict v = is_realizable_full(u, config_.order, config_.realizability_tolerance);
    min_margin = std::min(min_margin, u[0] > 0.0 ? v.margin / u[0] : v.margin);
  }
  r.total_mass = mass * config_.grid.dz();
  r.min_margin = min_margin;
  if (config_.track_distance) {
    for (const auto& d : relative_distances()) {
      if (d && (!r.min_d_rel || *d < *r.min_d_rel)) r.min_d_rel = *d;
    }
  }
  return r;
}

SolverState run(const RunConfig& config) {
  Solver solver(config);
  return solver.run();
}

}  // namespace rimex
