#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rimex {

/// Monomial moments (u_0, ..., u_N) of a kinetic density on mu in [-1, 1].
using MomentVector = Eigen::VectorXd;

/// Moments of the monomial full-moment basis b(mu) = (1, mu, ..., mu^N).
class Basis {
 public:
  explicit Basis(int order);

  int order() const { return order_; }
  int size() const { return order_ + 1; }

  /// b(mu); throws DomainError for |mu| > 1 + 1e-12.
  Eigen::VectorXd eval(double mu) const;

 private:
  int order_;
};

Eigen::VectorXd eval_basis(int order, double mu);

enum class HalfRange { Negative, Positive };

/// Gauss-Legendre rule applied separately on [-1, 0] and [0, 1].
///
/// Nodes are stored in ascending order; nodes [0, split_index) lie in
/// [-1, 0) and nodes [split_index, size) in (0, 1]. The negative half is the
/// exact mirror image of the positive half.
class Quadrature {
 public:
  Quadrature(std::vector<double> nodes, std::vector<double> weights,
             std::size_t split_index);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t split_index() const { return split_index_; }
  std::size_t points_per_half() const { return split_index_; }

  /// First and one-past-last node index of the requested half-interval.
  std::size_t begin(HalfRange half) const {
    return half == HalfRange::Negative ? 0 : split_index_;
  }
  std::size_t end(HalfRange half) const {
    return half == HalfRange::Negative ? split_index_ : nodes_.size();
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::size_t split_index_;
};

inline constexpr int kDefaultPointsPerHalf = 20;

Quadrature make_quadrature(int points_per_half = kDefaultPointsPerHalf);

/// Weighted sum of samples over all nodes.
double integrate(const Quadrature& q, std::span<const double> f);

/// Weighted sum over the nodes of one half-interval.
double integrate_half(const Quadrature& q, std::span<const double> f,
                      HalfRange half);

/// u_k = sum_i w_i mu_i^k psi_i. Negative samples below -1e-12 are reported
/// through the warning log; the sum is still returned.
MomentVector moments_of_samples(const Quadrature& q, int order,
                                std::span<const double> psi);

struct NormalizedMoments {
  double u0;
  Eigen::VectorXd eta;  ///< eta_k = u_k / u_0 for k = 1..N

  MomentVector reconstruct() const;
};

/// Throws NotRealizableError when u_0 <= 0.
NormalizedMoments normalize(const MomentVector& u);

/// <b> for the isotropic density psi = 1/2: (1, 0, 1/3, 0, 1/5, ...).
MomentVector isotropic_moments(int order);

}  // namespace rimex
