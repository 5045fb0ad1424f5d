#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "rimex/error.hpp"
#include "rimex/realizability.hpp"

namespace rimex {
namespace {

// Real roots of x^3 + p x + q = 0.
std::vector<double> depressed_cubic_roots(double p, double q) {
  std::vector<double> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    roots.push_back(std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s));
  } else if (p == 0.0) {
    roots.push_back(0.0);
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
  }
  // One Newton polish per root.
  for (double& x : roots) {
    const double f = x * x * x + p * x + q;
    const double df = 3.0 * x * x + p;
    if (df != 0.0) x -= f / df;
  }
  return roots;
}

// Distance from (eta1, eta2) to the parabola eta2 = eta1^2, |eta1| <= 1:
// stationary points of the quartic (x - eta1)^2 + (x^2 - eta2)^2.
double parabola_distance(double eta1, double eta2) {
  auto sq_dist = [&](double x) {
    const double a = x - eta1, b = x * x - eta2;
    return a * a + b * b;
  };
  double best = std::min(sq_dist(-1.0), sq_dist(1.0));
  for (double x : depressed_cubic_roots(0.5 - eta2, -0.5 * eta1)) {
    if (std::abs(x) <= 1.0) best = std::min(best, sq_dist(x));
  }
  return std::sqrt(best);
}

using Point = Eigen::Vector3d;  // unused trailing entries stay zero for order 2

// Squared distance from eta to the segment {e + w (m - e) : w in [0, 1]}.
double segment_sq_distance(const Point& eta, const Point& e, const Point& m) {
  const Point d = m - e;
  const Point v = eta - e;
  const double dd = d.squaredNorm();
  const double w = dd > 0.0 ? std::clamp(d.dot(v) / dd, 0.0, 1.0) : 0.0;
  return (v - w * d).squaredNorm();
}

Point moment_curve(double x, int order) {
  Point m = Point::Zero();
  double p = 1.0;
  for (int k = 0; k < order; ++k) {
    p *= x;
    m[k] = p;
  }
  return m;
}

Point moment_curve_derivative(double x, int order) {
  Point m = Point::Zero();
  double p = 1.0;
  for (int k = 0; k < order; ++k) {
    m[k] = (k + 1) * p;
    p *= x;
  }
  return m;
}

struct Minimum {
  double x;
  double value;
};

// Minimize a continuous function of x over [-1, 1]: coarse scan, then Brent
// refinement around each sampled local minimum.
template <class F>
Minimum minimize_on_interval(F&& f) {
  constexpr int samples = 500;
  std::array<double, samples + 1> xs{}, fs{};
  for (int i = 0; i <= samples; ++i) {
    xs[i] = -1.0 + 2.0 * i / samples;
    fs[i] = f(xs[i]);
  }
  const auto first = std::min_element(fs.begin(), fs.end());
  Minimum best{xs[static_cast<std::size_t>(first - fs.begin())], *first};

  // Sampled local minima; a plateau contributes only its first point.
  std::vector<int> candidates;
  for (int i = 0; i <= samples; ++i) {
    const bool left_ok = i == 0 || fs[i] < fs[i - 1];
    const bool right_ok = i == samples || fs[i] <= fs[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }
  constexpr std::size_t refined = 3;
  if (candidates.size() > refined) {
    std::partial_sort(candidates.begin(), candidates.begin() + refined, candidates.end(),
                      [&](int a, int b) { return fs[a] < fs[b]; });
    candidates.resize(refined);
  }
  for (int i : candidates) {
    const double lo = xs[std::max(i - 1, 0)];
    const double hi = xs[std::min(i + 1, samples)];
    boost::uintmax_t max_iter = 200;
    const auto minimum = boost::math::tools::brent_find_minima(
        f, lo, hi, std::numeric_limits<double>::digits, max_iter);
    if (minimum.second < best.value) best = {minimum.first, minimum.second};
  }
  return best;
}

// Brent locates x only to about sqrt(eps), which leaves distances near 1e-8
// for points on the surface {e + w (m(x) - e)}. Gauss-Newton in (w, x) from
// the Brent point converges quadratically there.
double polish_on_ruled_surface(const Point& eta, const Point& e, double x, int order) {
  auto residual = [&](double w, double xx) {
    return Point(e + w * (moment_curve(xx, order) - e) - eta);
  };
  const Point d0 = moment_curve(x, order) - e;
  double w = d0.squaredNorm() > 0.0 ? std::clamp(d0.dot(eta - e) / d0.squaredNorm(), 0.0, 1.0) : 0.0;
  Point r = residual(w, x);
  for (int it = 0; it < 30; ++it) {
    Eigen::Matrix<double, 3, 2> j;
    j.col(0) = moment_curve(x, order) - e;
    j.col(1) = w * moment_curve_derivative(x, order);
    const Eigen::Vector2d step = (j.transpose() * j).ldlt().solve(-j.transpose() * r);
    if (!step.allFinite()) break;
    const double w_new = std::clamp(w + step[0], 0.0, 1.0);
    const double x_new = std::clamp(x + step[1], -1.0, 1.0);
    const Point r_new = residual(w_new, x_new);
    if (!(r_new.squaredNorm() < r.squaredNorm())) break;
    w = w_new;
    x = x_new;
    r = r_new;
  }
  return r.squaredNorm();
}

}  // namespace

double max_boundary_distance(int order) {
  switch (order) {
    case 1: return 1.0;
    case 2: return 0.5;
    case 3: return 0.2;
    default: throw ConfigError("boundary distance is implemented for orders 1..3");
  }
}

namespace detail {

double boundary_distance_by_atoms(const Eigen::VectorXd& eta, int order) {
  if (order != 2 && order != 3) throw ConfigError("atom parametrization needs order 2 or 3");
  if (eta.size() != order) throw ContractViolation("normalized moments do not match order");
  // Boundary points are moments of measures with at most one interior atom
  // plus endpoint atoms: (order 2) one interior atom, or atoms at -1 and 1;
  // (order 3) one interior atom together with an atom at -1 or at 1.
  Point p = Point::Zero();
  p.head(order) = eta;
  const Point lower = moment_curve(-1.0, order);
  const Point upper = moment_curve(1.0, order);
  double best;
  if (order == 2) {
    best = segment_sq_distance(p, lower, upper);
    best = std::min(best, minimize_on_interval([&](double x) {
                      return (p - moment_curve(x, 2)).squaredNorm();
                    }).value);
  } else {
    best = std::numeric_limits<double>::infinity();
    for (const Point& e : {lower, upper}) {
      const Minimum m =
          minimize_on_interval([&](double x) { return segment_sq_distance(p, e, moment_curve(x, 3)); });
      best = std::min({best, m.value, polish_on_ruled_surface(p, e, m.x, 3)});
    }
  }
  return std::sqrt(best);
}

}  // namespace detail

BoundaryDistance distance_to_boundary(const NormalizedMoments& eta, int order) {
  const double max_d = max_boundary_distance(order);
  if (eta.eta.size() != order) throw ContractViolation("normalized moments do not match order");
  MomentVector u(order + 1);
  u[0] = 1.0;
  u.tail(order) = eta.eta;
  const RealizabilityVerdict verdict = is_realizable_full(u, order);
  if (!verdict.realizable) {
    std::ostringstream msg;
    msg << "normalized moments (" << eta.eta.transpose() << ") are not realizable";
    throw NotRealizableError(msg.str());
  }
  double d = 0.0;
  switch (order) {
    case 1:
      d = 1.0 - std::abs(eta.eta[0]);
      break;
    case 2:
      d = std::min(1.0 - eta.eta[1], parabola_distance(eta.eta[0], eta.eta[1]));
      break;
    default:
      d = detail::boundary_distance_by_atoms(eta.eta, 3);
      break;
  }
  d = std::max(d, 0.0);
  return {d, d / max_d};
}

}  // namespace rimex
