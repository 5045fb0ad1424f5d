#include "rimex/angular.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

#include "rimex/error.hpp"
#include "rimex/log.hpp"

namespace rimex {

Basis::Basis(int order) : order_(order) {
  if (order < 1) throw ConfigError("basis order must be at least 1");
}

Eigen::VectorXd Basis::eval(double mu) const {
  if (!(std::abs(mu) <= 1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "angular variable " << mu << " outside [-1, 1]";
    throw DomainError(msg.str());
  }
  Eigen::VectorXd b(size());
  b[0] = 1.0;
  for (int k = 1; k <= order_; ++k) b[k] = b[k - 1] * mu;
  return b;
}

Eigen::VectorXd eval_basis(int order, double mu) { return Basis(order).eval(mu); }

Quadrature::Quadrature(std::vector<double> nodes, std::vector<double> weights,
                       std::size_t split_index)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), split_index_(split_index) {
  if (nodes_.size() != weights_.size())
    throw ContractViolation("quadrature nodes and weights differ in length");
  if (split_index_ > nodes_.size())
    throw ContractViolation("quadrature split index out of range");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const bool negative = i < split_index_;
    if (negative ? !(nodes_[i] >= -1.0 && nodes_[i] < 0.0)
                 : !(nodes_[i] > 0.0 && nodes_[i] <= 1.0))
      throw ContractViolation("quadrature node on the wrong half-interval");
    if (!(weights_[i] > 0.0)) throw ContractViolation("quadrature weight not positive");
  }
}

Quadrature make_quadrature(int points_per_half) {
  if (points_per_half < 2)
    throw ConfigError("quadrature needs at least 2 points per half-interval");
  const auto m = static_cast<unsigned>(points_per_half);

  // Gauss-Legendre on [-1, 1]; boost returns the non-negative zeros only.
  std::vector<double> ref_nodes;
  for (double z : boost::math::legendre_p_zeros<double>(static_cast<int>(m))) {
    ref_nodes.push_back(z);
    if (z != 0.0) ref_nodes.push_back(-z);
  }
  std::sort(ref_nodes.begin(), ref_nodes.end());

  // Map onto [0, 1]: mu = (1 + x) / 2, w = 1 / ((1 - x^2) P_m'(x)^2).
  std::vector<double> pos_nodes(m), pos_weights(m);
  for (unsigned i = 0; i < m; ++i) {
    const double x = ref_nodes[i];
    const double dp = boost::math::legendre_p_prime(static_cast<int>(m), x);
    pos_nodes[i] = 0.5 * (1.0 + x);
    pos_weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }

  std::vector<double> nodes(2 * m), weights(2 * m);
  for (unsigned i = 0; i < m; ++i) {
    nodes[m - 1 - i] = -pos_nodes[i];
    weights[m - 1 - i] = pos_weights[i];
    nodes[m + i] = pos_nodes[i];
    weights[m + i] = pos_weights[i];
  }
  return Quadrature(std::move(nodes), std::move(weights), m);
}

namespace {

void check_length(const Quadrature& q, std::span<const double> f) {
  if (f.size() != q.size()) {
    std::ostringstream msg;
    msg << "sample count " << f.size() << " does not match node count " << q.size();
    throw ContractViolation(msg.str());
  }
}

double weighted_sum(const Quadrature& q, std::span<const double> f,
                    std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) s += q.weights()[i] * f[i];
  return s;
}

}  // namespace

double integrate(const Quadrature& q, std::span<const double> f) {
  check_length(q, f);
  return integrate_half(q, f, HalfRange::Negative) + integrate_half(q, f, HalfRange::Positive);
}

double integrate_half(const Quadrature& q, std::span<const double> f, HalfRange half) {
  check_length(q, f);
  return weighted_sum(q, f, q.begin(half), q.end(half));
}

MomentVector moments_of_samples(const Quadrature& q, int order,
                                std::span<const double> psi) {
  check_length(q, psi);
  const Basis basis(order);
  MomentVector u = MomentVector::Zero(basis.size());
  double most_negative = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(psi[i])) throw DomainError("non-finite density sample");
    most_negative = std::min(most_negative, psi[i]);
    const double wpsi = q.weights()[i] * psi[i];
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      u[k] += wpsi * p;
      p *= q.nodes()[i];
    }
  }
  if (most_negative < -1e-12) {
    std::ostringstream msg;
    msg << "density sample " << most_negative << " is negative";
    log_warning(msg.str());
  }
  return u;
}

MomentVector NormalizedMoments::reconstruct() const {
  MomentVector u(eta.size() + 1);
  u[0] = u0;
  u.tail(eta.size()) = u0 * eta;
  return u;
}

NormalizedMoments normalize(const MomentVector& u) {
  if (u.size() < 2) throw ContractViolation("moment vector needs at least two entries");
  if (!(u[0] > 0.0)) throw NotRealizableError("zeroth moment must be positive to normalize");
  return {u[0], u.tail(u.size() - 1) / u[0]};
}

MomentVector isotropic_moments(int order) {
  const Basis basis(order);
  MomentVector iso(basis.size());
  for (int k = 0; k <= order; ++k) iso[k] = (k % 2 == 0) ? 1.0 / (k + 1) : 0.0;
  return iso;
}

}  // namespace rimex
