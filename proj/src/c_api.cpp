#include "rimex/rimex.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "rimex/benchmarks.hpp"
#include "rimex/closure.hpp"
#include "rimex/collision.hpp"
#include "rimex/realizability.hpp"
#include "rimex/solver.hpp"

struct rimex_solver {
  std::unique_ptr<rimex::Solver> solver;
  std::optional<rimex::ManufacturedFields> manufactured;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

rimex_status fail(rimex_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Maps exceptions to status codes; every entry point runs through here.
template <class F>
rimex_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const rimex::StepFailure& e) {
    return fail(RIMEX_ERR_STEP, e.what());
  } catch (const rimex::RunFailure& e) {
    return fail(RIMEX_ERR_STEP, e.what());
  } catch (const rimex::ClosureFailure& e) {
    return fail(RIMEX_ERR_CLOSURE, e.what());
  } catch (const rimex::ConfigError& e) {
    return fail(RIMEX_ERR_CONFIG, e.what());
  } catch (const rimex::DomainError& e) {
    return fail(RIMEX_ERR_DOMAIN, e.what());
  } catch (const rimex::NotRealizableError& e) {
    return fail(RIMEX_ERR_NOT_REALIZABLE, e.what());
  } catch (const rimex::OverflowError& e) {
    return fail(RIMEX_ERR_OVERFLOW, e.what());
  } catch (const rimex::ContractViolation& e) {
    return fail(RIMEX_ERR_CONTRACT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RIMEX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RIMEX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RIMEX_ERR_INTERNAL, "unknown error");
  }
}

#define RIMEX_REQUIRE(cond, msg) \
  do {                           \
    if (!(cond)) return fail(RIMEX_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

rimex::MomentVector to_vector(const double* u, int order) {
  return Eigen::Map<const Eigen::VectorXd>(u, order + 1);
}

void write(const Eigen::VectorXd& v, double* out) {
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = v[k];
}

rimex_verdict to_c(const rimex::RealizabilityVerdict& v) {
  return {v.realizable ? 1 : 0, v.margin, v.tolerance};
}

rimex_oracle_verdict to_c(rimex::OracleVerdict v) {
  switch (v) {
    case rimex::OracleVerdict::Feasible: return RIMEX_ORACLE_FEASIBLE;
    case rimex::OracleVerdict::Infeasible: return RIMEX_ORACLE_INFEASIBLE;
    default: return RIMEX_ORACLE_INDETERMINATE;
  }
}

rimex::ClosureConfig from_c(const rimex_closure_config* c) {
  rimex::ClosureConfig cfg;
  if (c) {
    cfg.tau = c->tau;
    cfg.max_iterations = c->max_iterations;
    cfg.refinement_steps = c->refinement_steps;
  }
  cfg.validate();
  return cfg;
}

rimex::CollisionModel collision(rimex_collision kind, double scale) {
  rimex::CollisionModel m;
  if (kind == RIMEX_COLLISION_LAPLACE_BELTRAMI)
    m.kind = rimex::CollisionKind::LaplaceBeltrami;
  else if (kind == RIMEX_COLLISION_BGK)
    m.kind = rimex::CollisionKind::IsotropicBGK;
  else
    throw rimex::ConfigError("unknown collision operator");
  m.scale = scale;
  return m;
}

rimex_solver_options options_or_default(const rimex_solver_options* opts) {
  rimex_solver_options o;
  rimex_solver_options_default(&o);
  return opts ? *opts : o;
}

void apply(const rimex_solver_options& o, rimex::RunConfig& cfg) {
  cfg.closure = from_c(&o.closure);
  cfg.threads = o.threads;
  cfg.cfl_factor = o.cfl_factor;
  cfg.material_time_fraction = o.material_time_fraction;
}

std::vector<double> zeroth_moments(const rimex::SolverState& s) {
  std::vector<double> u0(s.means.size());
  for (std::size_t j = 0; j < u0.size(); ++j) u0[j] = s.means[j][0];
  return u0;
}

}  // namespace

extern "C" {

const char* rimex_version(void) { return "0.1.0"; }

const char* rimex_status_string(rimex_status status) {
  switch (status) {
    case RIMEX_OK: return "ok";
    case RIMEX_ERR_CONFIG: return "configuration error";
    case RIMEX_ERR_DOMAIN: return "domain error";
    case RIMEX_ERR_NOT_REALIZABLE: return "not realizable";
    case RIMEX_ERR_CLOSURE: return "closure failure";
    case RIMEX_ERR_OVERFLOW: return "overflow";
    case RIMEX_ERR_STEP: return "step failure";
    case RIMEX_ERR_CONTRACT: return "contract violation";
    case RIMEX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RIMEX_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case RIMEX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rimex_last_error(void) { return g_last_error.c_str(); }

void rimex_closure_config_default(rimex_closure_config* cfg) {
  if (!cfg) return;
  const rimex::ClosureConfig d;
  cfg->tau = d.tau;
  cfg->max_iterations = d.max_iterations;
  cfg->refinement_steps = d.refinement_steps;
}

rimex_status rimex_check_realizable(const double* u, int order, double rel_tol,
                                    rimex_verdict* out) {
  RIMEX_REQUIRE(u && out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    *out = to_c(rimex::is_realizable_full(to_vector(u, order), order, rel_tol));
    return RIMEX_OK;
  });
}

rimex_status rimex_check_realizable_mixed2(const double* v, double rel_tol, rimex_verdict* out) {
  RIMEX_REQUIRE(v && out, "null pointer argument");
  return guarded([&] {
    *out = to_c(rimex::is_realizable_mixed2({v[0], v[1], v[2], v[3]}, rel_tol));
    return RIMEX_OK;
  });
}

rimex_status rimex_check_realizable_mixed1(double u0, double u1_plus, double u1_minus,
                                           double rel_tol, rimex_verdict* out) {
  RIMEX_REQUIRE(out, "null pointer argument");
  return guarded([&] {
    *out = to_c(rimex::is_realizable_mixed1(u0, u1_plus, u1_minus, rel_tol));
    return RIMEX_OK;
  });
}

rimex_status rimex_lp_oracle(const double* u, int order, int points_per_half,
                             rimex_oracle_verdict* out) {
  RIMEX_REQUIRE(u && out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    const rimex::Quadrature q = rimex::make_quadrature(points_per_half);
    *out = to_c(rimex::lp_realizability_oracle(to_vector(u, order), q, order));
    return RIMEX_OK;
  });
}

rimex_status rimex_lp_oracle_mixed2(const double* v, int points_per_half,
                                    rimex_oracle_verdict* out) {
  RIMEX_REQUIRE(v && out, "null pointer argument");
  return guarded([&] {
    const rimex::Quadrature q = rimex::make_quadrature(points_per_half);
    *out = to_c(rimex::lp_realizability_oracle_mixed2({v[0], v[1], v[2], v[3]}, q));
    return RIMEX_OK;
  });
}

rimex_status rimex_random_realizable(int order, uint64_t seed, int points_per_half, double* out) {
  RIMEX_REQUIRE(out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    const rimex::Quadrature q = rimex::make_quadrature(points_per_half);
    write(rimex::random_realizable(order, seed, q), out);
    return RIMEX_OK;
  });
}

rimex_status rimex_distance_to_boundary(const double* u, int order, double* d, double* d_rel) {
  RIMEX_REQUIRE(u && d && d_rel, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    const auto r = rimex::distance_to_boundary(rimex::normalize(to_vector(u, order)), order);
    *d = r.d;
    *d_rel = r.d_rel;
    return RIMEX_OK;
  });
}

rimex_status rimex_realizability_agreement(int order, int samples, uint64_t seed, double band,
                                           rimex_agreement* out) {
  RIMEX_REQUIRE(out, "null pointer argument");
  return guarded([&] {
    const rimex::AgreementReport r =
        order == 0 ? rimex::realizability_agreement_mixed2(samples, seed, band)
                   : rimex::realizability_agreement(order, samples, seed, band);
    *out = {r.samples, r.realizable, r.in_band, r.indeterminate, r.agreed, r.disagreed};
    return RIMEX_OK;
  });
}

rimex_status rimex_solve_dual(const double* u, int order, int points_per_half,
                              const rimex_closure_config* cfg, double* alpha_out,
                              int* iterations) {
  RIMEX_REQUIRE(u && alpha_out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    const rimex::Quadrature q = rimex::make_quadrature(points_per_half);
    const rimex::DualReport r = rimex::solve_dual(to_vector(u, order), q, from_c(cfg));
    write(r.alpha, alpha_out);
    if (iterations) *iterations = r.iterations;
    return RIMEX_OK;
  });
}

rimex_status rimex_reduced_explicit_step(const double* u, int order, double dt,
                                         rimex_collision kind, double scale, double* out) {
  RIMEX_REQUIRE(u && out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    write(rimex::explicit_reduced_step(to_vector(u, order), dt, collision(kind, scale)), out);
    return RIMEX_OK;
  });
}

rimex_status rimex_reduced_implicit_step(const double* u, int order, double dt,
                                         rimex_collision kind, double scale, double* out) {
  RIMEX_REQUIRE(u && out, "null pointer argument");
  RIMEX_REQUIRE(order >= 1, "order must be at least 1");
  return guarded([&] {
    rimex::MaterialSample m;
    m.sigma_s = 1.0;
    write(rimex::implicit_relax_step(to_vector(u, order), dt, m, collision(kind, scale)), out);
    return RIMEX_OK;
  });
}

void rimex_solver_options_default(rimex_solver_options* opts) {
  if (!opts) return;
  const rimex::RunConfig d;
  rimex_closure_config_default(&opts->closure);
  opts->points_per_half = d.points_per_half;
  opts->threads = d.threads;
  opts->cfl_factor = d.cfl_factor;
  opts->material_time_fraction = d.material_time_fraction;
}

rimex_status rimex_solver_create_manufactured(double K, int nx, int order,
                                              const rimex_solver_options* opts,
                                              rimex_solver** out) {
  RIMEX_REQUIRE(out, "null pointer argument");
  *out = nullptr;
  return guarded([&] {
    const rimex_solver_options o = options_or_default(opts);
    rimex::RunConfig cfg =
        rimex::manufactured_config(K, nx, from_c(&o.closure), order, o.points_per_half);
    apply(o, cfg);
    auto handle = std::make_unique<rimex_solver>();
    handle->manufactured.emplace(K);
    handle->solver = std::make_unique<rimex::Solver>(std::move(cfg));
    *out = handle.release();
    return RIMEX_OK;
  });
}

rimex_status rimex_solver_create_plane_source(int order, int nx, rimex_collision kind,
                                              double lb_scale, const rimex_solver_options* opts,
                                              rimex_solver** out) {
  RIMEX_REQUIRE(out, "null pointer argument");
  *out = nullptr;
  return guarded([&] {
    const rimex_solver_options o = options_or_default(opts);
    rimex::RunConfig cfg =
        rimex::plane_source_config(order, nx, collision(kind, lb_scale), from_c(&o.closure));
    cfg.points_per_half = o.points_per_half;
    apply(o, cfg);
    auto handle = std::make_unique<rimex_solver>();
    handle->solver = std::make_unique<rimex::Solver>(std::move(cfg));
    *out = handle.release();
    return RIMEX_OK;
  });
}

void rimex_solver_destroy(rimex_solver* solver) { delete solver; }

rimex_status rimex_solver_step(rimex_solver* solver) {
  RIMEX_REQUIRE(solver, "null solver handle");
  return guarded([&] {
    if (solver->solver->done()) throw rimex::ContractViolation("solver already reached t_final");
    solver->solver->imex_step();
    return RIMEX_OK;
  });
}

rimex_status rimex_solver_advance_to(rimex_solver* solver, double t) {
  RIMEX_REQUIRE(solver, "null solver handle");
  return guarded([&] {
    rimex::Solver& s = *solver->solver;
    const double dt = s.plan().dt;
    while (!s.done() && s.state().t + dt <= t + 1e-9 * dt) s.imex_step();
    return RIMEX_OK;
  });
}

rimex_status rimex_solver_run(rimex_solver* solver) {
  RIMEX_REQUIRE(solver, "null solver handle");
  return guarded([&] {
    while (!solver->solver->done()) solver->solver->imex_step();
    return RIMEX_OK;
  });
}

rimex_status rimex_solver_get_info(const rimex_solver* solver, rimex_solver_info* out) {
  RIMEX_REQUIRE(solver && out, "null pointer argument");
  const rimex::Solver& s = *solver->solver;
  const rimex::RunConfig& c = s.config();
  *out = {c.order,        c.grid.nx,         c.grid.z_left, c.grid.z_right, c.grid.dz(),
          s.plan().dt,    s.plan().steps,    s.state().step, s.state().t,  c.t_final};
  return RIMEX_OK;
}

rimex_status rimex_solver_cell_centers(const rimex_solver* solver, double* out, size_t len) {
  RIMEX_REQUIRE(solver && out, "null pointer argument");
  const rimex::Grid& g = solver->solver->config().grid;
  if (len < static_cast<size_t>(g.nx)) return fail(RIMEX_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (int j = 0; j < g.nx; ++j) out[j] = g.center(j);
  return RIMEX_OK;
}

rimex_status rimex_solver_means(const rimex_solver* solver, double* out, size_t len) {
  RIMEX_REQUIRE(solver && out, "null pointer argument");
  const auto& means = solver->solver->state().means;
  const size_t n = static_cast<size_t>(solver->solver->config().order + 1);
  if (len < means.size() * n) return fail(RIMEX_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (size_t j = 0; j < means.size(); ++j) write(means[j], out + j * n);
  return RIMEX_OK;
}

rimex_status rimex_solver_relative_distances(const rimex_solver* solver, double* out, size_t len) {
  RIMEX_REQUIRE(solver && out, "null pointer argument");
  return guarded([&] {
    const auto d = solver->solver->relative_distances();
    if (len < d.size()) return fail(RIMEX_ERR_BUFFER_TOO_SMALL, "buffer too small");
    for (size_t j = 0; j < d.size(); ++j) out[j] = d[j].value_or(kNaN);
    return RIMEX_OK;
  });
}

rimex_status rimex_solver_diagnostics_count(const rimex_solver* solver, size_t* count) {
  RIMEX_REQUIRE(solver && count, "null pointer argument");
  *count = solver->solver->state().diagnostics.size();
  return RIMEX_OK;
}

rimex_status rimex_solver_diagnostics(const rimex_solver* solver, rimex_diagnostics* out,
                                      size_t len) {
  RIMEX_REQUIRE(solver && out, "null pointer argument");
  const auto& diag = solver->solver->state().diagnostics;
  if (len < diag.size()) return fail(RIMEX_ERR_BUFFER_TOO_SMALL, "buffer too small");
  for (size_t i = 0; i < diag.size(); ++i) {
    const auto& d = diag[i];
    out[i] = {d.step,
              d.t,
              d.total_mass,
              d.min_margin,
              d.min_d_rel.value_or(kNaN),
              d.closure_iterations_max,
              d.regularizations_used};
  }
  return RIMEX_OK;
}

rimex_status rimex_solver_manufactured_errors(const rimex_solver* solver, double* e1,
                                              double* einf) {
  RIMEX_REQUIRE(solver && e1 && einf, "null pointer argument");
  if (!solver->manufactured)
    return fail(RIMEX_ERR_INVALID_ARGUMENT, "solver was not created for the manufactured solution");
  return guarded([&] {
    const rimex::Solver& s = *solver->solver;
    const auto exact =
        rimex::manufactured_exact_means(*solver->manufactured, s.config().grid, s.state().t);
    const auto r = rimex::error_norms(zeroth_moments(s.state()), exact, s.config().grid.dz());
    *e1 = r.E1;
    *einf = r.Einf;
    return RIMEX_OK;
  });
}

rimex_status rimex_observed_order(double e_coarse, double e_fine, double dz_coarse,
                                  double dz_fine, double* nu) {
  RIMEX_REQUIRE(nu, "null pointer argument");
  return guarded([&] {
    *nu = rimex::observed_order(e_coarse, e_fine, dz_coarse, dz_fine).value_or(kNaN);
    return RIMEX_OK;
  });
}

rimex_status rimex_convergence_study(double K, const int* nx, size_t count, int order,
                                     const rimex_solver_options* opts,
                                     rimex_convergence_row* rows) {
  RIMEX_REQUIRE(nx && rows, "null pointer argument");
  return guarded([&] {
    const rimex_solver_options o = options_or_default(opts);
    rimex::StudyOptions so;
    so.closure = from_c(&o.closure);
    so.order = order;
    so.points_per_half = o.points_per_half;
    so.cfl_factor = o.cfl_factor;
    so.material_time_fraction = o.material_time_fraction;
    so.threads = o.threads;
    const auto table = rimex::convergence_study(K, std::vector<int>(nx, nx + count), so);
    for (size_t i = 0; i < table.size(); ++i) {
      const auto& e = table[i].errors;
      rows[i] = {table[i].nx, e.E1, e.nu1.value_or(kNaN), e.Einf, e.nuinf.value_or(kNaN)};
    }
    return RIMEX_OK;
  });
}

}  // extern "C"
