#include "rimex/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace rimex {
namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

MomentVector manufactured_moments(const ManufacturedFields& f, const Quadrature& q, int order,
                                  double t, double x, bool source) {
  MomentVector u = MomentVector::Zero(order + 1);
  const auto nodes = q.nodes();
  const auto weights = q.weights();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = weights[i] * (source ? f.source(t, x, nodes[i]) : f.psi(t, x, nodes[i]));
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      u[k] += p * v;
      p *= nodes[i];
    }
  }
  return u;
}

}  // namespace

ManufacturedFields::ManufacturedFields(double k) : K(k) {
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("manufactured solution needs K > 1");
  b_offset = -K + 1.0 - std::log((K - 1.0) / (2.0 * std::sinh(K - 1.0)));
}

double ManufacturedFields::alpha0(double t, double x) const {
  return -K - std::sin(x - t) - b_offset;
}

double ManufacturedFields::alpha1(double t, double x) const { return K + std::sin(x - t); }

double ManufacturedFields::sigma_a(double t, double x) const {
  return 4.0 * (1.0 - std::cos(x - t));
}

double ManufacturedFields::psi(double t, double x, double mu) const {
  return std::exp(alpha0(t, x) + alpha1(t, x) * mu);
}

double ManufacturedFields::source(double t, double x, double mu) const {
  const double a = 1.0 - mu;
  return (std::cos(x - t) * a * a + sigma_a(t, x)) * psi(t, x, mu);
}

double ManufacturedFields::u0_exact(double t, double x) const {
  const double a1 = alpha1(t, x);
  return std::exp(alpha0(t, x)) * 2.0 * std::sinh(a1) / a1;
}

double ManufacturedFields::u0_cell_mean(double t, double a, double b) const {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
    s += kGaussWeights[i] * u0_exact(t, mid + half * kGaussNodes[i]);
  return 0.5 * s;
}

RunConfig manufactured_config(double K, int nx, const ClosureConfig& closure, int order,
                              int points_per_half) {
  const ManufacturedFields f(K);
  RunConfig cfg;
  cfg.order = order;
  cfg.grid = {nx, kManufacturedLeft, kManufacturedRight};
  cfg.grid.validate();
  cfg.t_final = kManufacturedFinalTime;
  cfg.cfl_factor = 1.0;
  cfg.points_per_half = points_per_half;
  cfg.closure = closure;
  cfg.bc = PeriodicBoundary{};
  cfg.collision = CollisionModel{};

  const Quadrature q = make_quadrature(cfg.points_per_half);
  const double dz = cfg.grid.dz();
  cfg.initial_means.resize(static_cast<std::size_t>(nx));
  for (int j = 0; j < nx; ++j) {
    const double mid = cfg.grid.center(j);
    MomentVector u = MomentVector::Zero(order + 1);
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
      u += kGaussWeights[i] * manufactured_moments(f, q, order, 0.0, mid + 0.5 * dz * kGaussNodes[i], false);
    cfg.initial_means[static_cast<std::size_t>(j)] = 0.5 * u;
  }

  cfg.material = [f, q, order](double t, double x) {
    MaterialSample m;
    m.sigma_a = f.sigma_a(t, x);
    m.sigma_s = 0.0;
    m.q_moments = manufactured_moments(f, q, order, t, x, true);
    return m;
  };
  return cfg;
}

std::vector<double> manufactured_exact_means(const ManufacturedFields& f, const Grid& grid,
                                             double t) {
  std::vector<double> out(static_cast<std::size_t>(grid.nx));
  const double dz = grid.dz();
  for (int j = 0; j < grid.nx; ++j) {
    const double a = grid.z_left + j * dz;
    out[static_cast<std::size_t>(j)] = f.u0_cell_mean(t, a, a + dz);
  }
  return out;
}

ErrorReport error_norms(const std::vector<double>& numeric, const std::vector<double>& exact,
                        double dz) {
  if (numeric.size() != exact.size())
    throw ContractViolation("numeric and exact values differ in length");
  if (!(dz > 0.0)) throw ContractViolation("dz must be positive");
  ErrorReport r;
  double sum = 0.0;
  for (std::size_t j = 0; j < numeric.size(); ++j) {
    const double d = std::abs(numeric[j] - exact[j]);
    sum += d;
    r.Einf = std::max(r.Einf, d);
  }
  r.E1 = dz * sum;
  return r;
}

std::optional<double> observed_order(double e_coarse, double e_fine, double dz_coarse,
                                     double dz_fine) {
  if (!(dz_fine > 0.0) || !(dz_coarse > dz_fine))
    throw ContractViolation("observed order needs 0 < dz_fine < dz_coarse");
  if (e_coarse < 0.0 || e_fine < 0.0) throw ContractViolation("errors must be non-negative");
  if (e_coarse == 0.0 || e_fine == 0.0) return std::nullopt;
  return std::log(e_coarse / e_fine) / std::log(dz_coarse / dz_fine);
}

std::vector<ConvergenceRow> convergence_study(double K, const std::vector<int>& nx_list,
                                              const StudyOptions& options) {
  if (nx_list.empty()) throw ConfigError("convergence study needs at least one resolution");
  for (std::size_t i = 0; i < nx_list.size(); ++i) {
    if (nx_list[i] < 2 || nx_list[i] % 2 != 0)
      throw ConfigError("convergence resolutions must be even and positive");
    if (i > 0 && nx_list[i] <= nx_list[i - 1])
      throw ConfigError("convergence resolutions must be increasing");
  }
  const ManufacturedFields f(K);
  std::vector<ConvergenceRow> rows;
  for (int nx : nx_list) {
    RunConfig cfg =
        manufactured_config(K, nx, options.closure, options.order, options.points_per_half);
    cfg.cfl_factor = options.cfl_factor;
    cfg.material_time_fraction = options.material_time_fraction;
    cfg.threads = options.threads;
    const SolverState final_state = run(cfg);
    std::vector<double> numeric(final_state.means.size());
    for (std::size_t j = 0; j < numeric.size(); ++j) numeric[j] = final_state.means[j][0];
    ConvergenceRow row{nx, error_norms(numeric, manufactured_exact_means(f, cfg.grid, cfg.t_final),
                                       cfg.grid.dz())};
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double dz_prev = (kManufacturedRight - kManufacturedLeft) / prev.nx;
      row.errors.nu1 = observed_order(prev.errors.E1, row.errors.E1, dz_prev, cfg.grid.dz());
      row.errors.nuinf =
          observed_order(prev.errors.Einf, row.errors.Einf, dz_prev, cfg.grid.dz());
    }
    rows.push_back(row);
  }
  return rows;
}

RunConfig plane_source_config(int order, int nx, const CollisionModel& collision,
                              const ClosureConfig& closure) {
  if (nx < 2 || nx % 2 != 0) throw ConfigError("plane source needs an even number of cells");
  RunConfig cfg;
  cfg.order = order;
  cfg.grid = {nx, -kPlaneSourceHalfWidth, kPlaneSourceHalfWidth};
  cfg.t_final = 1.0;
  cfg.cfl_factor = 1.0;
  cfg.closure = closure;
  cfg.collision = collision;
  cfg.material = [](double, double) {
    MaterialSample m;
    m.sigma_s = 1.0;
    return m;
  };
  cfg.bc = constant_density_boundary(kPlaneSourceVacuum, kPlaneSourceVacuum, order);
  cfg.track_distance = true;
  cfg.distance_floor = 100.0 * kPlaneSourceVacuum;

  const MomentVector iso = isotropic_moments(order);
  const MomentVector vacuum = 2.0 * kPlaneSourceVacuum * iso;
  cfg.initial_means.assign(static_cast<std::size_t>(nx), vacuum);
  const double dz = cfg.grid.dz();
  for (int j : {nx / 2 - 1, nx / 2}) cfg.initial_means[static_cast<std::size_t>(j)] += iso / dz;
  return cfg;
}

namespace {

// Moments of 1..3 random atoms plus a small relative perturbation: lands on
// either side of the boundary, where predicates are easiest to get wrong.
template <class Moments>
auto perturbed_atoms(std::mt19937_64& rng, Moments&& moments) {
  std::uniform_real_distribution<double> loc(-1.0, 1.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  const int atoms = count(rng);
  auto u = moments(loc(rng)).eval();
  u *= unit(rng);
  for (int i = 1; i < atoms; ++i) u += moments(loc(rng)) * unit(rng);
  u /= u[0];
  std::uniform_real_distribution<double> log_eps(std::log(1e-5), std::log(1e-1));
  const double eps = std::exp(log_eps(rng));
  for (Eigen::Index k = 1; k < u.size(); ++k) u[k] += eps * (2.0 * unit(rng) - 1.0);
  return u;
}

}  // namespace

MomentVector random_test_moments(int order, std::uint64_t seed) {
  if (order < 1) throw ConfigError("order must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mass(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> odd(-1.25, 1.25), even(-0.25, 1.25);
  const double mass = std::exp(log_mass(rng));
  MomentVector u(order + 1);
  if (std::bernoulli_distribution(0.5)(rng)) {
    u = perturbed_atoms(rng, [order](double x) { return eval_basis(order, x); });
  } else {
    u[0] = 1.0;
    for (int k = 1; k <= order; ++k) u[k] = k % 2 ? odd(rng) : even(rng);
  }
  return mass * u;
}

MixedMoment2Vector random_test_mixed2(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mass(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> odd(-1.25, 1.25), even(-0.25, 1.25);
  const double mass = std::exp(log_mass(rng));
  Eigen::Vector4d u;
  if (std::bernoulli_distribution(0.5)(rng)) {
    u = perturbed_atoms(rng, [](double x) {
      return Eigen::Vector4d(1.0, x, x > 0.0 ? x * x : 0.0, x < 0.0 ? x * x : 0.0);
    });
  } else {
    u = Eigen::Vector4d(1.0, odd(rng), even(rng), even(rng));
  }
  u *= mass;
  return {u[0], u[1], u[2], u[3]};
}

namespace {

void tally(AgreementReport& r, const RealizabilityVerdict& v, double u0, double band,
           OracleVerdict oracle) {
  ++r.samples;
  if (v.realizable) ++r.realizable;
  if (std::abs(v.margin / u0) < band) {
    ++r.in_band;
    return;
  }
  if (oracle == OracleVerdict::Indeterminate) {
    ++r.indeterminate;
    return;
  }
  if (v.realizable == (oracle == OracleVerdict::Feasible))
    ++r.agreed;
  else
    ++r.disagreed;
}

}  // namespace

AgreementReport realizability_agreement(int order, int samples, std::uint64_t seed, double band,
                                        int oracle_points_per_half) {
  if (order < 1 || order > 3) throw ConfigError("realizability check supports orders 1..3");
  if (samples < 0) throw ConfigError("sample count must be non-negative");
  const Quadrature q = make_quadrature(oracle_points_per_half);
  AgreementReport r;
  for (int i = 0; i < samples; ++i) {
    const MomentVector u = random_test_moments(order, seed + static_cast<std::uint64_t>(i));
    tally(r, is_realizable_full(u, order), u[0], band, lp_realizability_oracle(u, q, order));
  }
  return r;
}

AgreementReport realizability_agreement_mixed2(int samples, std::uint64_t seed, double band,
                                               int oracle_points_per_half) {
  if (samples < 0) throw ConfigError("sample count must be non-negative");
  const Quadrature q = make_quadrature(oracle_points_per_half);
  AgreementReport r;
  for (int i = 0; i < samples; ++i) {
    const MixedMoment2Vector v = random_test_mixed2(seed + static_cast<std::uint64_t>(i));
    tally(r, is_realizable_mixed2(v), v.u0, band, lp_realizability_oracle_mixed2(v, q));
  }
  return r;
}

}  // namespace rimex
