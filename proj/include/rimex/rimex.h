/*
 * C interface to the rimex moment-model library.
 *
 * Every function returns a rimex_status; on failure rimex_last_error() holds a
 * message for the calling thread. Arrays are caller-allocated; moment vectors
 * of order N have N + 1 entries. Solver means are stored cell-major
 * (nx * (N + 1) doubles). Undefined values (observed orders without a
 * previous row, distances of skipped cells) are reported as NaN.
 */
#ifndef RIMEX_RIMEX_H
#define RIMEX_RIMEX_H

#include <stddef.h>
#include <stdint.h>

#if defined(RIMEX_BUILDING_LIBRARY)
#define RIMEX_API __attribute__((visibility("default")))
#else
#define RIMEX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rimex_status {
  RIMEX_OK = 0,
  RIMEX_ERR_CONFIG = 1,
  RIMEX_ERR_DOMAIN = 2,
  RIMEX_ERR_NOT_REALIZABLE = 3,
  RIMEX_ERR_CLOSURE = 4,
  RIMEX_ERR_OVERFLOW = 5,
  RIMEX_ERR_STEP = 6,
  RIMEX_ERR_CONTRACT = 7,
  RIMEX_ERR_INVALID_ARGUMENT = 8,
  RIMEX_ERR_BUFFER_TOO_SMALL = 9,
  RIMEX_ERR_INTERNAL = 10
} rimex_status;

typedef enum rimex_collision {
  RIMEX_COLLISION_LAPLACE_BELTRAMI = 0,
  RIMEX_COLLISION_BGK = 1
} rimex_collision;

typedef enum rimex_oracle_verdict {
  RIMEX_ORACLE_INFEASIBLE = 0,
  RIMEX_ORACLE_FEASIBLE = 1,
  RIMEX_ORACLE_INDETERMINATE = 2
} rimex_oracle_verdict;

RIMEX_API const char* rimex_version(void);
RIMEX_API const char* rimex_status_string(rimex_status status);
/* Message of the last failed call on this thread ("" if none). */
RIMEX_API const char* rimex_last_error(void);

typedef struct rimex_closure_config {
  double tau;
  int max_iterations;
  int refinement_steps;
} rimex_closure_config;

RIMEX_API void rimex_closure_config_default(rimex_closure_config* cfg);

/* ---- realizability ---------------------------------------------------- */

typedef struct rimex_verdict {
  int realizable;
  double margin;
  double tolerance;
} rimex_verdict;

RIMEX_API rimex_status rimex_check_realizable(const double* u, int order, double rel_tol,
                                              rimex_verdict* out);
/* v = (u0, u1, u2+, u2-). */
RIMEX_API rimex_status rimex_check_realizable_mixed2(const double* v, double rel_tol,
                                                     rimex_verdict* out);
RIMEX_API rimex_status rimex_check_realizable_mixed1(double u0, double u1_plus, double u1_minus,
                                                     double rel_tol, rimex_verdict* out);
RIMEX_API rimex_status rimex_lp_oracle(const double* u, int order, int points_per_half,
                                       rimex_oracle_verdict* out);
RIMEX_API rimex_status rimex_lp_oracle_mixed2(const double* v, int points_per_half,
                                              rimex_oracle_verdict* out);
RIMEX_API rimex_status rimex_random_realizable(int order, uint64_t seed, int points_per_half,
                                               double* out);
/* Distance of u / u0 to the boundary of the normalized realizable set. */
RIMEX_API rimex_status rimex_distance_to_boundary(const double* u, int order, double* d,
                                                  double* d_rel);

typedef struct rimex_agreement {
  int samples;
  int realizable;
  int in_band;
  int indeterminate;
  int agreed;
  int disagreed;
} rimex_agreement;

/* order 1..3 for full moments; order 0 selects the mixed (u0, u1, u2+, u2-) basis. */
RIMEX_API rimex_status rimex_realizability_agreement(int order, int samples, uint64_t seed,
                                                     double band, rimex_agreement* out);

/* ---- closure ---------------------------------------------------------- */

/* alpha_out has order + 1 entries; cfg may be NULL for defaults. */
RIMEX_API rimex_status rimex_solve_dual(const double* u, int order, int points_per_half,
                                        const rimex_closure_config* cfg, double* alpha_out,
                                        int* iterations);

/* ---- reduced (space-homogeneous) collision dynamics ------------------- */

/* u + dt A u with the chosen operator; scale multiplies Laplace-Beltrami. */
RIMEX_API rimex_status rimex_reduced_explicit_step(const double* u, int order, double dt,
                                                   rimex_collision kind, double scale,
                                                   double* out);
/* (I - dt A)^{-1} u. */
RIMEX_API rimex_status rimex_reduced_implicit_step(const double* u, int order, double dt,
                                                   rimex_collision kind, double scale,
                                                   double* out);

/* ---- transport solver ------------------------------------------------- */

typedef struct rimex_solver rimex_solver;

typedef struct rimex_solver_options {
  rimex_closure_config closure;
  int points_per_half;
  int threads;
  double cfl_factor;
  double material_time_fraction;
} rimex_solver_options;

RIMEX_API void rimex_solver_options_default(rimex_solver_options* opts);

/* opts may be NULL for defaults. */
RIMEX_API rimex_status rimex_solver_create_manufactured(double K, int nx, int order,
                                                        const rimex_solver_options* opts,
                                                        rimex_solver** out);
RIMEX_API rimex_status rimex_solver_create_plane_source(int order, int nx, rimex_collision kind,
                                                        double lb_scale,
                                                        const rimex_solver_options* opts,
                                                        rimex_solver** out);
RIMEX_API void rimex_solver_destroy(rimex_solver* solver);

/* One time step; the state is unchanged on failure. */
RIMEX_API rimex_status rimex_solver_step(rimex_solver* solver);
/* Steps while the next time level does not exceed t (plus a rounding margin). */
RIMEX_API rimex_status rimex_solver_advance_to(rimex_solver* solver, double t);
RIMEX_API rimex_status rimex_solver_run(rimex_solver* solver);

typedef struct rimex_solver_info {
  int order;
  int nx;
  double z_left;
  double z_right;
  double dz;
  double dt;
  int steps_total;
  int step;
  double t;
  double t_final;
} rimex_solver_info;

RIMEX_API rimex_status rimex_solver_get_info(const rimex_solver* solver, rimex_solver_info* out);
RIMEX_API rimex_status rimex_solver_cell_centers(const rimex_solver* solver, double* out,
                                                 size_t len);
RIMEX_API rimex_status rimex_solver_means(const rimex_solver* solver, double* out, size_t len);
/* NaN for cells skipped by the vacuum floor. */
RIMEX_API rimex_status rimex_solver_relative_distances(const rimex_solver* solver, double* out,
                                                       size_t len);

typedef struct rimex_diagnostics {
  int step;
  double t;
  double total_mass;
  double min_margin;
  double min_d_rel; /* NaN when not tracked */
  int closure_iterations_max;
  int regularizations_used;
} rimex_diagnostics;

RIMEX_API rimex_status rimex_solver_diagnostics_count(const rimex_solver* solver, size_t* count);
RIMEX_API rimex_status rimex_solver_diagnostics(const rimex_solver* solver,
                                                rimex_diagnostics* out, size_t len);
/* Zeroth-moment errors against the exact solution (manufactured solvers only). */
RIMEX_API rimex_status rimex_solver_manufactured_errors(const rimex_solver* solver, double* e1,
                                                        double* einf);

/* ---- convergence ------------------------------------------------------ */

typedef struct rimex_convergence_row {
  int nx;
  double E1;
  double nu1;
  double Einf;
  double nuinf;
} rimex_convergence_row;

RIMEX_API rimex_status rimex_observed_order(double e_coarse, double e_fine, double dz_coarse,
                                            double dz_fine, double* nu);
/* rows must hold count entries. */
RIMEX_API rimex_status rimex_convergence_study(double K, const int* nx, size_t count, int order,
                                               const rimex_solver_options* opts,
                                               rimex_convergence_row* rows);

#ifdef __cplusplus
}
#endif

#endif /* RIMEX_RIMEX_H */
