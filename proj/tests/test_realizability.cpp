#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rimex/error.hpp"
#include "rimex/realizability.hpp"

using namespace rimex;

namespace {

Eigen::VectorXd curve(double x, int order) {
  Eigen::VectorXd c(order);
  double p = 1.0;
  for (int k = 0; k < order; ++k) c[k] = p *= x;
  return c;
}

double segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) {
  const Eigen::VectorXd ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - a - t * ab).norm();
}

// Brute force over a fine parametrization of the boundary of the normalized set.
double brute_distance(const Eigen::VectorXd& eta, int order) {
  const int n = 100000;
  double best = std::numeric_limits<double>::infinity();
  if (order == 2) {
    best = 1.0 - eta[1];
    for (int i = 0; i <= n; ++i) best = std::min(best, (eta - curve(-1.0 + 2.0 * i / n, 2)).norm());
  } else {
    const Eigen::VectorXd lo = curve(-1.0, 3), hi = curve(1.0, 3);
    for (int i = 0; i <= n; ++i) {
      const Eigen::VectorXd c = curve(-1.0 + 2.0 * i / n, 3);
      best = std::min({best, segment_distance(eta, lo, c), segment_distance(eta, hi, c)});
    }
  }
  return best;
}

MomentVector with_mass(double u0, const Eigen::VectorXd& eta) {
  MomentVector u(eta.size() + 1);
  u[0] = u0;
  u.tail(eta.size()) = u0 * eta;
  return u;
}

}  // namespace

TEST_CASE("full-moment predicate examples") {
  const auto a = is_realizable_full(Eigen::Vector3d(1, 1, 1), 2);
  CHECK(a.realizable);
  CHECK(a.margin == 0.0);
  CHECK_FALSE(is_realizable_full(Eigen::Vector3d(1, 0.9, 0.8), 2).realizable);
  CHECK(is_realizable_full(Eigen::Vector4d(1, 0, 1.0 / 3.0, 0), 3).realizable);
  CHECK_FALSE(is_realizable_full(Eigen::Vector3d(1, 0, 2), 2).realizable);
  CHECK(is_realizable_full(Eigen::Vector2d(1, -1), 1).realizable);
  CHECK_FALSE(is_realizable_full(Eigen::Vector2d(1, 1.5), 1).realizable);
  CHECK_FALSE(is_realizable_full(Eigen::Vector2d(0, 0), 1).realizable);
  CHECK_FALSE(is_realizable_full(Eigen::Vector2d(NAN, 0), 1).realizable);
  CHECK_THROWS_AS(is_realizable_full(Eigen::Vector3d(1, 0, 0), 3), ContractViolation);
  CHECK_THROWS_AS(is_realizable_full(Eigen::VectorXd::Ones(5), 4), ConfigError);

  // Tolerance is relative to u0.
  const auto t = is_realizable_full(Eigen::Vector2d(1e6, 1e6 * (1 + 5e-13)), 1);
  CHECK(t.realizable);
  CHECK(t.tolerance == doctest::Approx(1e-6));
  CHECK_FALSE(is_realizable_full(Eigen::Vector2d(1e6, 1e6 * (1 + 5e-12)), 1).realizable);
}

TEST_CASE("mixed-moment predicates") {
  const auto a = is_realizable_mixed1(1, 0.5, -0.5);
  CHECK(a.realizable);
  CHECK(a.margin == 0.0);
  CHECK_FALSE(is_realizable_mixed1(1, 0.2, 0.1).realizable);
  CHECK(is_realizable_mixed1(1, 0, 0).realizable);
  CHECK_FALSE(is_realizable_mixed1(1, 0.7, -0.5).realizable);

  const auto b = is_realizable_mixed2({1, 0, 0.5, 0.5});
  CHECK(b.realizable);
  CHECK(std::abs(b.margin) <= 1e-15);
  CHECK_FALSE(is_realizable_mixed2({1, 0.1, 0.5, 0.5}).realizable);
  CHECK(is_realizable_mixed2({1, 0, 0, 0}).realizable);
  CHECK_FALSE(is_realizable_mixed2({1, 0, -0.1, 0.2}).realizable);
  CHECK_FALSE(is_realizable_mixed2({0, 0, 0, 0}).realizable);
}

TEST_CASE("atomic densities for mixed moments") {
  const AtomicDensity a = atomic_density_mixed2({1, 0, 0.5, 0.5});
  REQUIRE(a.atoms.size() == 2);
  for (const Atom& at : a.atoms) {
    CHECK(std::abs(std::abs(at.location) - 1.0) <= 1e-15);
    CHECK(at.weight == doctest::Approx(0.5).epsilon(1e-15));
  }
  const AtomicDensity d = atomic_density_mixed2({1, 0, 0, 0});
  REQUIRE(d.atoms.size() == 1);
  CHECK(d.atoms[0].location == 0.0);
  CHECK(d.atoms[0].weight == 1.0);
  CHECK_THROWS_AS(atomic_density_mixed2({1, 0.1, 0.5, 0.5}), NotRealizableError);

  // Random two-atom densities with one atom per half give realizable inputs.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    AtomicDensity src;
    src.atoms.push_back({unit(rng), 0.1 + 5 * unit(rng)});
    src.atoms.push_back({-unit(rng), 0.1 + 5 * unit(rng)});
    if (trial % 3 == 0) src.atoms.push_back({2 * unit(rng) - 1, unit(rng)});
    const MixedMoment2Vector v = mixed2_moments(src);
    REQUIRE(is_realizable_mixed2(v).realizable);
    const AtomicDensity out = atomic_density_mixed2(v);
    for (const Atom& at : out.atoms) {
      CHECK(at.weight >= 0.0);
      CHECK((at.location >= -1.0 && at.location <= 1.0));
    }
    const MixedMoment2Vector w = mixed2_moments(out);
    const double s = v.u0;
    CHECK(std::abs(w.u0 - v.u0) <= 1e-12 * s);
    CHECK(std::abs(w.u1 - v.u1) <= 1e-12 * s);
    CHECK(std::abs(w.u2_plus - v.u2_plus) <= 1e-12 * s);
    CHECK(std::abs(w.u2_minus - v.u2_minus) <= 1e-12 * s);
  }
}

TEST_CASE("linear programming oracle") {
  const Quadrature q = make_quadrature(50);
  CHECK(lp_realizability_oracle(Eigen::Vector3d(2, 0, 2.0 / 3.0), q, 2) == OracleVerdict::Feasible);
  CHECK(lp_realizability_oracle(Eigen::Vector2d(1, 1.5), q, 1) == OracleVerdict::Infeasible);
  CHECK(lp_realizability_oracle(Eigen::Vector3d(1, 0, 2), q, 2) == OracleVerdict::Infeasible);
  CHECK(lp_realizability_oracle(Eigen::Vector3d(1, 1, 1), q, 2) == OracleVerdict::Feasible);
  CHECK(lp_realizability_oracle_mixed2({1, 0, 0.5, 0.5}, q) == OracleVerdict::Feasible);
  CHECK(lp_realizability_oracle_mixed2({1, 0.1, 0.5, 0.5}, q) == OracleVerdict::Infeasible);
  CHECK_THROWS_AS(lp_realizability_oracle(Eigen::Vector3d(1, 0, 0), q, 1), ContractViolation);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int order = 1 + trial % 3;
    MomentVector u(order + 1);
    u[0] = 1.0;
    for (int k = 1; k <= order; ++k) u[k] = unit(rng);
    const auto v = is_realizable_full(u, order);
    if (std::abs(v.margin) < 1e-6) continue;
    const OracleVerdict o = lp_realizability_oracle(u, q, order);
    REQUIRE(o != OracleVerdict::Indeterminate);
    CHECK(v.realizable == (o == OracleVerdict::Feasible));
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("random realizable vectors") {
  const Quadrature q = make_quadrature();
  const Quadrature fine = make_quadrature(50);
  for (int order = 1; order <= 3; ++order) {
    CHECK(random_realizable(order, 42, q) == random_realizable(order, 42, q));
    CHECK(random_realizable(order, 42, q) != random_realizable(order, 43, q));
  }
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const MomentVector u = random_realizable(3, seed, fine);
    CHECK(is_realizable_full(u, 3).realizable);
    CHECK(lp_realizability_oracle(u, fine, 3) == OracleVerdict::Feasible);
  }
}

TEST_CASE("cone and convexity") {
  const Quadrature q = make_quadrature();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int order = 1 + static_cast<int>(seed % 3);
    const MomentVector u = random_realizable(order, seed, q);
    const MomentVector w = random_realizable(order, seed + 1000, q);
    const auto base = is_realizable_full(u, order);
    for (double c : {1e-8, 0.5, 3.0, 1e6}) {
      const auto scaled = is_realizable_full(c * u, order);
      CHECK(scaled.realizable);
      CHECK(scaled.margin == doctest::Approx(c * base.margin).epsilon(1e-10));
    }
    for (double t : {0.1, 0.5, 0.9})
      CHECK(is_realizable_full(t * u + (1 - t) * w, order).realizable);
  }
}

TEST_CASE("boundary distance examples") {
  CHECK(max_boundary_distance(1) == 1.0);
  CHECK(max_boundary_distance(2) == 0.5);
  CHECK(max_boundary_distance(3) == 0.2);

  auto d1 = distance_to_boundary(normalize(Eigen::Vector2d(1, 0)), 1);
  CHECK(d1.d == 1.0);
  CHECK(d1.d_rel == 1.0);
  auto d2 = distance_to_boundary(normalize(Eigen::Vector3d(1, 0, 0.5)), 2);
  CHECK(d2.d == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d2.d_rel == doctest::Approx(1.0).epsilon(1e-12));
  auto d3 = distance_to_boundary(normalize(Eigen::Vector3d(1, 0, 1.0 / 3.0)), 2);
  CHECK(d3.d == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d3.d_rel == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(distance_to_boundary(normalize(Eigen::Vector3d(1, 0.9, 0.8)), 2), NotRealizableError);
  CHECK_THROWS_AS(distance_to_boundary(normalize(Eigen::Vector3d(1, 0, 0.5)), 3), ContractViolation);
}

TEST_CASE("boundary distance matches brute force") {
  const Quadrature q = make_quadrature();
  for (int order = 2; order <= 3; ++order) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const NormalizedMoments eta = normalize(random_realizable(order, 500 + seed, q));
      const double d = distance_to_boundary(eta, order).d;
      CHECK(std::abs(d - brute_distance(eta.eta, order)) <= 1e-6);
      CHECK(d <= max_boundary_distance(order) + 1e-12);
    }
  }
  // A grid of the normalized M3 set never exceeds the stated maximum.
  double largest = 0.0;
  for (int i = -20; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      for (int k = -20; k <= 20; ++k) {
        const Eigen::Vector3d eta(i / 20.0, j / 20.0, k / 20.0);
        if (!is_realizable_full(with_mass(1.0, eta), 3).realizable) continue;
        largest = std::max(largest, distance_to_boundary({1.0, eta}, 3).d);
      }
  CHECK(largest <= 0.2 + 1e-9);
  CHECK(largest >= 0.19);
}

TEST_CASE("boundary distance vanishes on boundary points") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> x(-1.0, 1.0), w(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = x(rng);
    CHECK(distance_to_boundary({1.0, curve(a, 1)}, 1).d <= 1e-10 + (1 - std::abs(a)));
    CHECK(distance_to_boundary({1.0, curve(a, 2)}, 2).d <= 1e-10);
    const double s = w(rng);
    const Eigen::VectorXd lo = s * curve(a, 3) + (1 - s) * curve(-1.0, 3);
    const Eigen::VectorXd hi = s * curve(a, 3) + (1 - s) * curve(1.0, 3);
    CHECK(distance_to_boundary({1.0, lo}, 3).d <= 1e-10);
    CHECK(distance_to_boundary({1.0, hi}, 3).d <= 1e-10);
    const Eigen::VectorXd top = s * curve(-1.0, 2) + (1 - s) * curve(1.0, 2);
    CHECK(distance_to_boundary({1.0, top}, 2).d <= 1e-10);
  }
  CHECK(distance_to_boundary({1.0, Eigen::VectorXd::Constant(1, 1.0)}, 1).d == 0.0);
}

TEST_CASE("order-2 closed form agrees with the atom parametrization") {
  const Quadrature q = make_quadrature();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NormalizedMoments eta = normalize(random_realizable(2, seed, q));
    CHECK(std::abs(distance_to_boundary(eta, 2).d - detail::boundary_distance_by_atoms(eta.eta, 2)) <=
          1e-10);
  }
}
