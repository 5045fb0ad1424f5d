#include "rimex/closure.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rimex {
namespace {

constexpr double kMaxExponent = 700.0;

// b(mu)^T alpha by Horner's rule.
double exponent(const Multipliers& alpha, double mu) {
  double p = 0.0;
  for (Eigen::Index k = alpha.size() - 1; k >= 0; --k) p = p * mu + alpha[k];
  return p;
}

double checked_exp(double p) {
  if (!(p <= kMaxExponent)) {
    std::ostringstream msg;
    msg << "ansatz exponent " << p << " exceeds " << kMaxExponent;
    throw OverflowError(msg.str());
  }
  return std::exp(p);
}

// Moments <mu^k psi> for k = 0..max_power.
Eigen::VectorXd power_moments(const Multipliers& alpha, const Quadrature& q, int max_power) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(max_power + 1);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double mu = q.nodes()[i];
    double wp = q.weights()[i] * checked_exp(exponent(alpha, mu));
    for (int k = 0; k <= max_power; ++k) {
      m[k] += wp;
      wp *= mu;
    }
  }
  return m;
}

double dual_value(const Multipliers& alpha, const MomentVector& u, const Quadrature& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    s += q.weights()[i] * checked_exp(exponent(alpha, q.nodes()[i]));
  return s - u.dot(alpha);
}

// Non-throwing variant used inside the line search.
double dual_value_or_inf(const Multipliers& alpha, const MomentVector& u, const Quadrature& q) {
  try {
    return dual_value(alpha, u, q);
  } catch (const OverflowError&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct NewtonOutcome {
  bool converged = false;
  Multipliers alpha;
  int iterations = 0;
  double gradient_norm = std::numeric_limits<double>::infinity();
};

double gradient_norm_or_inf(const Multipliers& alpha, const MomentVector& target,
                            const Quadrature& q) {
  try {
    return dual_objective(alpha, target, q).gradient.norm();
  } catch (const OverflowError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Damped Newton with Armijo backtracking on the normalized dual.
NewtonOutcome newton(const MomentVector& target, Multipliers alpha, const Quadrature& q,
                     const ClosureConfig& cfg) {
  constexpr double armijo = 1e-4;
  constexpr double min_step = 1e-12;
  NewtonOutcome out;
  out.alpha = alpha;

  for (int it = 0; it <= cfg.max_iterations; ++it) {
    DualEvaluation ev;
    try {
      ev = dual_objective(alpha, target, q);
    } catch (const OverflowError&) {
      return out;
    }
    const double gnorm = ev.gradient.norm();
    if (gnorm < out.gradient_norm) {
      out.alpha = alpha;
      out.gradient_norm = gnorm;
      out.iterations = it;
    }
    if (gnorm <= cfg.tau) {
      out.converged = true;
      out.iterations = it;
      // Quadratic convergence makes a couple of extra steps nearly free; keep
      // them only while the residual keeps shrinking.
      for (int extra = 0; extra < cfg.refinement_steps; ++extra) {
        Eigen::LLT<Eigen::MatrixXd> llt(ev.hessian);
        if (llt.info() != Eigen::Success) break;
        const Multipliers trial = alpha - llt.solve(ev.gradient);
        const double trial_norm = gradient_norm_or_inf(trial, target, q);
        if (!(trial_norm < out.gradient_norm)) break;
        alpha = trial;
        out.alpha = trial;
        out.gradient_norm = trial_norm;
        ev = dual_objective(alpha, target, q);
      }
      return out;
    }
    if (it == cfg.max_iterations) break;

    Eigen::LLT<Eigen::MatrixXd> llt(ev.hessian);
    if (llt.info() != Eigen::Success) return out;
    const Eigen::VectorXd dir = -llt.solve(ev.gradient);
    const double slope = ev.gradient.dot(dir);
    if (!(slope < 0.0)) return out;

    double t = 1.0;
    bool accepted = false;
    while (t >= min_step) {
      const Multipliers trial = alpha + t * dir;
      if (dual_value_or_inf(trial, target, q) <= ev.value + armijo * t * slope) {
        alpha = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Near the optimum the value differences drown in rounding; fall back to
      // the gradient norm as merit.
      const Multipliers trial = alpha + dir;
      if (gradient_norm_or_inf(trial, target, q) < gnorm) {
        alpha = trial;
      } else {
        return out;
      }
    }
  }
  return out;
}

}  // namespace

void ClosureConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("closure tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("closure needs at least one iteration");
  if (regularization_schedule.empty() || regularization_schedule.front() != 0.0)
    throw ConfigError("regularization schedule must start at 0");
  for (std::size_t i = 1; i < regularization_schedule.size(); ++i) {
    if (!(regularization_schedule[i] > regularization_schedule[i - 1]))
      throw ConfigError("regularization schedule must be strictly increasing");
  }
  if (!(regularization_schedule.back() < 1.0))
    throw ConfigError("regularization weights must lie in [0, 1)");
}

DualEvaluation dual_objective(const Multipliers& alpha, const MomentVector& u,
                              const Quadrature& q) {
  if (alpha.size() != u.size())
    throw ContractViolation("multipliers and moments differ in length");
  if (!alpha.allFinite()) throw DomainError("multipliers must be finite");
  const int n = static_cast<int>(alpha.size());
  const Eigen::VectorXd m = power_moments(alpha, q, 2 * (n - 1));

  DualEvaluation ev;
  ev.value = m[0] - u.dot(alpha);
  ev.gradient = m.head(n) - u;
  ev.hessian.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) ev.hessian(j, k) = m[j + k];
  return ev;
}

Multipliers isotropic_multipliers(double u0, int order) {
  Multipliers alpha = Multipliers::Zero(order + 1);
  alpha[0] = std::log(u0 / 2.0);
  return alpha;
}

DualReport solve_dual(const MomentVector& u, const Quadrature& q, const ClosureConfig& cfg,
                      const std::optional<Multipliers>& warm_start) {
  cfg.validate();
  const int order = static_cast<int>(u.size()) - 1;
  if (order < 1) throw ContractViolation("moment vector needs at least two entries");
  if (!u.allFinite()) throw DomainError("moment vector must be finite");

  DualReport best;
  best.alpha = isotropic_multipliers(u[0] > 0.0 ? u[0] : 1.0, order);
  best.final_gradient_norm = std::numeric_limits<double>::infinity();
  if (!(u[0] > 0.0)) throw ClosureFailure("zeroth moment is not positive", best);

  const double u0 = u[0];
  const double log_u0 = std::log(u0);
  const MomentVector normalized = u / u0;
  const MomentVector iso = isotropic_moments(order);

  Multipliers start = isotropic_multipliers(1.0, order);
  if (warm_start && warm_start->size() == u.size() && warm_start->allFinite()) {
    start = *warm_start;
    start[0] -= log_u0;
  }

  int total_iterations = 0;
  for (double r : cfg.regularization_schedule) {
    const MomentVector target = (1.0 - r) * normalized + r * iso;
    NewtonOutcome outcome = newton(target, start, q, cfg);
    total_iterations += outcome.iterations;
    if (outcome.gradient_norm * u0 < best.final_gradient_norm) {
      best.alpha = outcome.alpha;
      best.alpha[0] += log_u0;
      best.iterations = total_iterations;
      best.regularization_used = r;
      best.final_gradient_norm = outcome.gradient_norm * u0;
    }
    if (outcome.converged) {
      DualReport report;
      report.alpha = outcome.alpha;
      report.alpha[0] += log_u0;
      report.iterations = total_iterations;
      report.regularization_used = r;
      report.final_gradient_norm = outcome.gradient_norm * u0;
      return report;
    }
    // Restart the next level from the isotropic point; the failed iterate may
    // sit in a badly conditioned corner.
    start = isotropic_multipliers(1.0, order);
  }
  std::ostringstream msg;
  msg << "dual closure did not converge for u = (" << u.transpose()
      << "); best gradient norm " << best.final_gradient_norm;
  throw ClosureFailure(msg.str(), best);
}

std::vector<double> ansatz_samples(const Multipliers& alpha, const Quadrature& q) {
  if (!alpha.allFinite()) throw DomainError("multipliers must be finite");
  std::vector<double> psi(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) psi[i] = checked_exp(exponent(alpha, q.nodes()[i]));
  return psi;
}

Eigen::VectorXd half_flux_moments(const Multipliers& alpha, const Quadrature& q, int order,
                                  HalfRange half) {
  if (alpha.size() != order + 1) throw ContractViolation("multipliers do not match order");
  if (!alpha.allFinite()) throw DomainError("multipliers must be finite");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(order + 1);
  for (std::size_t i = q.begin(half); i < q.end(half); ++i) {
    const double mu = q.nodes()[i];
    double wp = q.weights()[i] * checked_exp(exponent(alpha, mu)) * mu;
    for (int k = 0; k <= order; ++k) {
      f[k] += wp;
      wp *= mu;
    }
  }
  return f;
}

Eigen::VectorXd flux_moments(const Multipliers& alpha, const Quadrature& q, int order) {
  return half_flux_moments(alpha, q, order, HalfRange::Positive) +
         half_flux_moments(alpha, q, order, HalfRange::Negative);
}

Eigen::VectorXd kinetic_flux(const Multipliers& alpha_left, const Multipliers& alpha_right,
                             const Quadrature& q, int order) {
  return half_flux_moments(alpha_left, q, order, HalfRange::Positive) +
         half_flux_moments(alpha_right, q, order, HalfRange::Negative);
}

}  // namespace rimex
