#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rimex/angular.hpp"
#include "rimex/error.hpp"
#include "rimex/log.hpp"
#include "rimex/realizability.hpp"

using namespace rimex;

namespace {

std::vector<double> sample(const Quadrature& q, double (*f)(double)) {
  std::vector<double> v;
  for (double mu : q.nodes()) v.push_back(f(mu));
  return v;
}

}  // namespace

TEST_CASE("basis evaluation") {
  CHECK(eval_basis(2, 0.0) == Eigen::Vector3d(1, 0, 0));
  CHECK(eval_basis(3, 1.0) == Eigen::Vector4d(1, 1, 1, 1));
  CHECK(eval_basis(2, -0.5) == Eigen::Vector3d(1, -0.5, 0.25));
  CHECK_THROWS_AS(eval_basis(2, 1.0 + 1e-11), DomainError);
  CHECK_NOTHROW(eval_basis(2, 1.0 + 1e-13));
  CHECK_THROWS_AS(Basis(0), ConfigError);

  const Basis b(3);
  for (double mu : {-0.9, -0.3, 0.2, 0.7}) {
    const auto v = b.eval(mu);
    CHECK(v[0] == 1.0);
    for (int k = 1; k <= 3; ++k) CHECK(v[k] == doctest::Approx(std::pow(mu, k)).epsilon(1e-15));
  }
}

TEST_CASE("quadrature construction") {
  CHECK_THROWS_AS(make_quadrature(1), ConfigError);

  const Quadrature q2 = make_quadrature(2);
  double sum = 0.0;
  for (double w : q2.weights()) sum += w;
  CHECK(std::abs(sum - 2.0) <= 1e-15);
  // The 2-point Gauss rule is exact for cubics, so int_0^1 mu = 1/2 exactly.
  CHECK(integrate_half(q2, sample(q2, [](double m) { return m; }), HalfRange::Positive) == 0.5);

  const Quadrature q20 = make_quadrature(20);
  CHECK(std::abs(integrate(q20, sample(q20, [](double m) { return m * m; })) - 2.0 / 3.0) <=
        1e-14);
}

TEST_CASE("quadrature invariants and polynomial exactness") {
  for (int p : {2, 3, 5, 20, 51}) {
    const Quadrature q = make_quadrature(p);
    REQUIRE(q.size() == static_cast<std::size_t>(2 * p));
    CHECK(q.split_index() == static_cast<std::size_t>(p));
    double sum = 0.0;
    for (double w : q.weights()) sum += w;
    CHECK(std::abs(sum - 2.0) <= 1e-14);
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(q.nodes()[i] != 0.0);
      if (i < q.split_index())
        CHECK((q.nodes()[i] >= -1.0 && q.nodes()[i] < 0.0));
      else
        CHECK((q.nodes()[i] > 0.0 && q.nodes()[i] <= 1.0));
    }
    // Mirror symmetry of the two halves.
    for (std::size_t i = 0; i < q.split_index(); ++i) {
      CHECK(q.nodes()[i] == -q.nodes()[q.size() - 1 - i]);
      CHECK(q.weights()[i] == q.weights()[q.size() - 1 - i]);
    }
    for (int k = 0; k <= 2 * p - 1; ++k) {
      std::vector<double> f;
      for (double mu : q.nodes()) f.push_back(std::pow(mu, k));
      const double pos = integrate_half(q, f, HalfRange::Positive);
      const double neg = integrate_half(q, f, HalfRange::Negative);
      const double exact_pos = 1.0 / (k + 1);
      const double exact_neg = (k % 2 ? -1.0 : 1.0) / (k + 1);
      CHECK(std::abs(pos - exact_pos) <= 1e-13);
      CHECK(std::abs(neg - exact_neg) <= 1e-13);
      CHECK(integrate(q, f) == pos + neg);
    }
  }
}

TEST_CASE("integration examples and contracts") {
  const Quadrature q = make_quadrature(20);
  CHECK(integrate(q, sample(q, [](double) { return 1.0; })) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(integrate_half(q, sample(q, [](double m) { return m; }), HalfRange::Positive) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate_half(q, sample(q, [](double m) { return m * m * m; }), HalfRange::Negative) ==
        doctest::Approx(-0.25).epsilon(1e-15));
  const std::vector<double> short_samples(q.size() - 1, 1.0);
  CHECK_THROWS_AS(integrate(q, short_samples), ContractViolation);
  CHECK_THROWS_AS(integrate_half(q, short_samples, HalfRange::Positive), ContractViolation);
  CHECK_THROWS_AS(moments_of_samples(q, 2, short_samples), ContractViolation);
}

TEST_CASE("moments of samples") {
  const Quadrature q = make_quadrature(20);
  const MomentVector u = moments_of_samples(q, 2, sample(q, [](double) { return 1.0; }));
  CHECK(u[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(u[1]) <= 1e-15);
  CHECK(u[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const MomentVector h = moments_of_samples(q, 3, sample(q, [](double) { return 0.5; }));
  CHECK((h - isotropic_moments(3)).cwiseAbs().maxCoeff() <= 1e-15);

  // Closed forms: int e^{mu/2} = 4 sinh(1/2); int mu e^{mu/2} = [e^{mu/2}(2 mu - 4)].
  const MomentVector e = moments_of_samples(q, 1, sample(q, [](double m) { return std::exp(0.5 * m); }));
  CHECK(e[0] == doctest::Approx(4.0 * std::sinh(0.5)).epsilon(1e-14));
  CHECK(e[0] == doctest::Approx(2.08438).epsilon(1e-5));
  const double u1 = std::exp(0.5) * (2.0 - 4.0) - std::exp(-0.5) * (-2.0 - 4.0);
  CHECK(e[1] == doctest::Approx(u1).epsilon(1e-14));
}

TEST_CASE("negative samples are reported as warnings") {
  std::vector<std::string> seen;
  const WarningSink previous = set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  const Quadrature q = make_quadrature(4);
  std::vector<double> psi(q.size(), 1.0);
  psi[3] = -1e-13;
  moments_of_samples(q, 2, psi);
  CHECK(seen.empty());
  psi[3] = -1e-6;
  const MomentVector u = moments_of_samples(q, 2, psi);
  CHECK(seen.size() == 1);
  CHECK(std::isfinite(u[0]));
  set_warning_sink(previous);
}

TEST_CASE("normalization") {
  const NormalizedMoments a = normalize(Eigen::Vector3d(2, 0, 2.0 / 3.0));
  CHECK(a.u0 == 2.0);
  CHECK(a.eta[0] == 0.0);
  CHECK(a.eta[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const NormalizedMoments b = normalize(Eigen::Vector3d(1, 1, 1));
  CHECK(b.eta == Eigen::Vector2d(1, 1));
  CHECK_THROWS_AS(normalize(Eigen::Vector3d(0, 0, 0)), NotRealizableError);
  CHECK_THROWS_AS(normalize(Eigen::Vector3d(-1, 0, 0)), NotRealizableError);

  const MomentVector u = Eigen::Vector4d(3.7, -1.2, 2.1, -0.9);
  const MomentVector r = normalize(u).reconstruct();
  CHECK(((r - u).cwiseAbs().array() <= 1e-14 * u.cwiseAbs().array()).all());
}

TEST_CASE("moments of non-negative samples are realizable") {
  const Quadrature q = make_quadrature(20);
  std::uint64_t state = 12345;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0;
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> psi(q.size());
    for (double& p : psi) p = next() < 0.3 ? 0.0 : next();
    for (int order = 1; order <= 3; ++order) {
      const MomentVector u = moments_of_samples(q, order, psi);
      if (u[0] > 0.0) CHECK(is_realizable_full(u, order).realizable);
    }
  }
}
