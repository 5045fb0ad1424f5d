#include <doctest.h>

#include <random>

#include "rimex/collision.hpp"
#include "rimex/error.hpp"
#include "rimex/realizability.hpp"

using namespace rimex;

namespace {

const CollisionModel kLaplaceUnit{CollisionKind::LaplaceBeltrami, 1.0};
const CollisionModel kBgk{CollisionKind::IsotropicBGK, 1.0};

}  // namespace

TEST_CASE("Laplace-Beltrami matrix") {
  Eigen::Matrix3d expected;
  expected << 0, 0, 0, 0, -2, 0, 2, 0, -6;
  CHECK(laplace_beltrami_matrix(2, 1.0) == expected);
  const Eigen::Vector3d u(0.7, 0.2, 0.4);
  CHECK((laplace_beltrami_matrix(2, 0.5) * u - Eigen::Vector3d(0, -0.2, 0.7 - 1.2)).cwiseAbs().maxCoeff() <=
        1e-15);
  for (int n = 1; n <= 3; ++n) CHECK(laplace_beltrami_matrix(n, 0.5).row(0).isZero(0.0));
  CHECK_THROWS_AS(laplace_beltrami_matrix(0, 1.0), ConfigError);
  CHECK_THROWS_AS(laplace_beltrami_matrix(2, 0.0), ConfigError);

  // Integration by parts against the ansatz-independent action on mu^k:
  // <mu^k d/dmu((1 - mu^2) psi')> = k(k-1) u_{k-2} - k(k+1) u_k.
  const Quadrature q = make_quadrature();
  std::vector<double> lap;
  for (double mu : q.nodes()) {
    // psi = e^mu, so d/dmu((1 - mu^2) e^mu) = e^mu (1 - 2 mu - mu^2).
    lap.push_back(std::exp(mu) * (1.0 - 2.0 * mu - mu * mu));
  }
  std::vector<double> psi;
  for (double mu : q.nodes()) psi.push_back(std::exp(mu));
  const MomentVector direct = moments_of_samples(q, 3, lap);
  const MomentVector via_matrix = laplace_beltrami_matrix(3, 1.0) * moments_of_samples(q, 3, psi);
  CHECK((direct - via_matrix).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("isotropic BGK operator") {
  CHECK(isotropic_bgk_moments(Eigen::Vector4d(1, 0, 1.0 / 3.0, 0), 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK((isotropic_bgk_moments(Eigen::Vector3d(1, 1, 1), 2) - Eigen::Vector3d(0, -1, 1.0 / 3.0 - 1))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  const Eigen::Vector4d u(2.5, -0.3, 1.1, 0.2);
  CHECK(isotropic_bgk_moments(u, 3)[0] == 0.0);
  CHECK((isotropic_bgk_matrix(3) * u - isotropic_bgk_moments(u, 3)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(isotropic_bgk_moments(u, 2), ContractViolation);
}

TEST_CASE("explicit reduced step") {
  for (double dt : {1e-3, 1e-2, 1e-1, 0.3}) {
    const MomentVector v = explicit_reduced_step(Eigen::Vector3d(1, 1, 1), dt, kLaplaceUnit);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == doctest::Approx(1 - 2 * dt).epsilon(1e-15));
    CHECK(v[2] == doctest::Approx(1 - 4 * dt).epsilon(1e-15));
    // u0 u2 - u1^2 = -4 dt^2 < 0.
    CHECK_FALSE(is_realizable_full(v, 2).realizable);
  }
  const Eigen::Vector3d u(1.2, 0.3, 0.5);
  CHECK(explicit_reduced_step(u, 0.0, kLaplaceUnit) == MomentVector(u));
  const MomentVector iso = 3.0 * isotropic_moments(3);
  CHECK((explicit_reduced_step(iso, 0.4, kBgk) - iso).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((explicit_reduced_step(iso, 0.4, kLaplaceUnit) - iso).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(explicit_reduced_step(u, -1.0, kLaplaceUnit), ConfigError);
}

TEST_CASE("implicit relaxation examples") {
  const MaterialSample scatter{0.0, 1.0, {}};
  const MomentVector a = implicit_relax_step(Eigen::Vector3d(1, 1, 1), 0.5, scatter, kLaplaceUnit);
  CHECK((a - Eigen::Vector3d(1, 0.5, 0.5)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(is_realizable_full(a, 2).realizable);

  const Eigen::Vector3d u(1.2, 0.3, 0.5);
  CHECK(implicit_relax_step(u, 0.0, scatter, kLaplaceUnit) == MomentVector(u));

  const MomentVector big = implicit_relax_step(u, 1e8, scatter, kLaplaceUnit);
  CHECK((big - Eigen::Vector3d(1.2, 0, 0.4)).cwiseAbs().maxCoeff() <= 1e-8);

  // Absorption and source act on every component: (1 + dt sa) u' = u + dt q when ss = 0.
  const MaterialSample absorb{2.0, 0.0, Eigen::Vector3d(1, 0, 1.0 / 3.0)};
  const MomentVector c = implicit_relax_step(u, 0.25, absorb, kLaplaceUnit);
  CHECK((c - (u + 0.25 * Eigen::Vector3d(1, 0, 1.0 / 3.0)) / 1.5).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(implicit_relax_step(u, -0.1, scatter, kLaplaceUnit), ConfigError);
  CHECK_THROWS_AS(implicit_relax_step(u, 0.1, MaterialSample{-1.0, 0.0, {}}, kLaplaceUnit), ConfigError);
  CHECK_THROWS_AS(implicit_relax_step(u, 0.1, MaterialSample{0.0, NAN, {}}, kLaplaceUnit), ConfigError);
  CHECK_THROWS_AS(implicit_relax_step(u, 0.1, MaterialSample{0, 0, Eigen::Vector2d(1, 0)}, kLaplaceUnit),
                  ContractViolation);
  CHECK_THROWS_AS(implicit_relax_step(u, 0.1, scatter, Eigen::MatrixXd::Ones(3, 3)), ContractViolation);
  CHECK_THROWS_AS(implicit_relax_step(u, 0.1, scatter, Eigen::MatrixXd::Zero(2, 2)), ContractViolation);
}

TEST_CASE("implicit relaxation preserves realizability and mass") {
  const Quadrature q = make_quadrature();
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int order = 1 + trial % 3;
    const MomentVector u = random_realizable(order, 2 * trial, q);
    const double dt = 10.0 * unit(rng);
    const CollisionModel model = trial % 2 ? kBgk : CollisionModel{CollisionKind::LaplaceBeltrami, 0.5};
    MaterialSample m{3.0 * unit(rng), 3.0 * unit(rng), {}};
    if (trial % 4 == 0) m.q_moments = random_realizable(order, 2 * trial + 1, q);
    const MomentVector out = implicit_relax_step(u, dt, m, model);
    CHECK(is_realizable_full(out, order).realizable);
    if (m.q_moments.size() == 0 && m.sigma_a == 0.0) CHECK(out[0] == u[0]);
    const MaterialSample pure{0.0, m.sigma_s, {}};
    CHECK(implicit_relax_step(u, dt, pure, model)[0] == u[0]);
  }
}

TEST_CASE("iterated implicit relaxation reaches the isotropic state") {
  const Quadrature q = make_quadrature();
  const MaterialSample scatter{0.0, 1.0, {}};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int order = 1 + static_cast<int>(seed % 3);
    for (const CollisionModel& model : {kLaplaceUnit, kBgk}) {
      MomentVector u = random_realizable(order, seed, q);
      for (int it = 0; it < 400; ++it) u = implicit_relax_step(u, 0.1, scatter, model);
      CHECK((u - u[0] * isotropic_moments(order)).cwiseAbs().maxCoeff() <= 1e-8 * u[0]);
    }
  }
}
