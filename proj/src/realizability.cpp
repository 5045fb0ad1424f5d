#include "rimex/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>
#include <sstream>

#include "rimex/error.hpp"

namespace rimex {
namespace {

struct Slack {
  double value;
  int degree;
};

RealizabilityVerdict verdict_from(double u0, std::initializer_list<Slack> slacks,
                                  double rel_tol) {
  RealizabilityVerdict v;
  if (!(u0 > 0.0)) {
    v.realizable = false;
    v.margin = -std::numeric_limits<double>::infinity();
    v.tolerance = 0.0;
    return v;
  }
  double margin = std::numeric_limits<double>::infinity();
  for (const Slack& s : slacks) {
    margin = std::min(margin, s.value / std::pow(u0, s.degree - 1));
  }
  v.margin = margin;
  v.tolerance = rel_tol * u0;
  v.realizable = std::isfinite(margin) && margin >= -v.tolerance;
  return v;
}

}  // namespace

RealizabilityVerdict is_realizable_full(const MomentVector& u, int order, double rel_tol) {
  if (order < 1 || order > 3)
    throw ConfigError("full-moment realizability is implemented for orders 1..3");
  if (u.size() != order + 1) {
    std::ostringstream msg;
    msg << "moment vector of length " << u.size() << " does not match order " << order;
    throw ContractViolation(msg.str());
  }
  if (!u.allFinite()) return {false, -std::numeric_limits<double>::infinity(), 0.0};
  const double u0 = u[0], u1 = u[1];
  switch (order) {
    case 1:
      return verdict_from(u0, {{u0 - u1, 1}, {u0 + u1, 1}}, rel_tol);
    case 2: {
      const double u2 = u[2];
      return verdict_from(
          u0, {{u0 - u1, 1}, {u0 + u1, 1}, {u0 * u2 - u1 * u1, 2}, {u0 - u2, 1}}, rel_tol);
    }
    default: {
      // Positive semidefiniteness of the localizing Hankel matrices for the
      // weights (1 + mu) and (1 - mu).
      const double u2 = u[2], u3 = u[3];
      const double lo0 = u0 + u1, lo1 = u1 + u2, lo2 = u2 + u3;
      const double hi0 = u0 - u1, hi1 = u1 - u2, hi2 = u2 - u3;
      return verdict_from(u0,
                          {{lo0, 1},
                           {lo2, 1},
                           {hi0, 1},
                           {hi2, 1},
                           {lo0 * lo2 - lo1 * lo1, 2},
                           {hi0 * hi2 - hi1 * hi1, 2}},
                          rel_tol);
    }
  }
}

RealizabilityVerdict is_realizable_mixed1(double u0, double u1_plus, double u1_minus,
                                          double rel_tol) {
  return verdict_from(u0, {{u0 - u1_plus + u1_minus, 1}, {u1_plus, 1}, {-u1_minus, 1}},
                      rel_tol);
}

RealizabilityVerdict is_realizable_mixed2(const MixedMoment2Vector& v, double rel_tol) {
  const double lower_arg = v.u2_minus * (v.u0 - v.u2_plus);
  const double upper_arg = v.u2_plus * (v.u0 - v.u2_minus);
  const double lower = v.u2_plus - std::sqrt(std::max(lower_arg, 0.0));
  const double upper = std::sqrt(std::max(upper_arg, 0.0)) - v.u2_minus;
  return verdict_from(v.u0,
                      {{v.u2_plus, 1},
                       {v.u2_minus, 1},
                       {lower_arg, 2},
                       {upper_arg, 2},
                       {v.u1 - lower, 1},
                       {upper - v.u1, 1}},
                      rel_tol);
}

AtomicDensity atomic_density_mixed2(const MixedMoment2Vector& v) {
  const RealizabilityVerdict verdict = is_realizable_mixed2(v);
  if (!verdict.realizable) {
    std::ostringstream msg;
    msg << "mixed moments (" << v.u0 << ", " << v.u1 << ", " << v.u2_plus << ", "
        << v.u2_minus << ") are not realizable (margin " << verdict.margin << ")";
    throw NotRealizableError(msg.str());
  }
  const double u0 = v.u0;
  const double eta1 = v.u1 / u0;
  const double eta2p = std::max(v.u2_plus / u0, 0.0);
  const double eta2m = std::max(v.u2_minus / u0, 0.0);

  AtomicDensity out;
  if (eta2p == 0.0 && eta2m == 0.0) {
    out.atoms.push_back({0.0, u0});
    return out;
  }
  // A vanishing half-range second moment forces that half's mass onto mu = 0.
  if (eta2m == 0.0 || eta2p == 0.0) {
    const double eta2 = eta2p > 0.0 ? eta2p : eta2m;
    const double weight = std::min(eta1 * eta1 / eta2, 1.0);
    const double location = std::clamp(eta2 / eta1, -1.0, 1.0);
    out.atoms.push_back({location, u0 * weight});
    if (weight < 1.0) out.atoms.push_back({0.0, u0 * (1.0 - weight)});
    return out;
  }

  const double s = std::sqrt(std::max(eta2m + eta2p - eta1 * eta1, 0.0) / (eta2m * eta2p));
  const double eta1p = eta2p * (eta1 + eta2m * s) / (eta2m + eta2p);
  const double eta1m = eta2m * (eta1 - eta2p * s) / (eta2m + eta2p);
  if (eta1p > 0.0) out.atoms.push_back({std::min(eta2p / eta1p, 1.0), u0 * eta1p * eta1p / eta2p});
  if (eta1m < 0.0) out.atoms.push_back({std::max(eta2m / eta1m, -1.0), u0 * eta1m * eta1m / eta2m});
  return out;
}

MixedMoment2Vector mixed2_moments(const AtomicDensity& density) {
  MixedMoment2Vector v;
  for (const Atom& a : density.atoms) {
    v.u0 += a.weight;
    v.u1 += a.weight * a.location;
    if (a.location > 0.0) v.u2_plus += a.weight * a.location * a.location;
    if (a.location < 0.0) v.u2_minus += a.weight * a.location * a.location;
  }
  return v;
}

MomentVector random_realizable(int order, std::uint64_t seed, const Quadrature& q) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amplitude(0.0, 4.0);
  std::uniform_real_distribution<double> log_mass(std::log(0.1), std::log(10.0));

  // Smooth random log-density plus bounded node-wise noise.
  constexpr int degree = 4;
  double coeff[degree + 1];
  const double scale = amplitude(rng);
  for (double& c : coeff) c = scale * unit(rng);
  const double mass = std::exp(log_mass(rng));
  const double noise = 0.5 * (unit(rng) + 1.0);

  std::vector<double> psi(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double mu = q.nodes()[i];
    double g = 0.0;
    for (int k = degree; k >= 0; --k) g = g * mu + coeff[k];
    psi[i] = std::exp(g + noise * unit(rng));
  }
  MomentVector u = moments_of_samples(q, order, psi);
  return u * (mass / u[0]);
}

}  // namespace rimex
