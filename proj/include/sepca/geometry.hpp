#ifndef SEPCA_GEOMETRY_HPP
#define SEPCA_GEOMETRY_HPP

// Geometric comparison of detection regions at sigma = 1. Sum-type selectors
// detect a (scaled) row vector outside a hyperplane at distance r - h from the
// origin; ell2-type selectors detect it outside an l2 ball of radius r. Where
// the two meet they cut a hyperspherical cap of angle theta_lim.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "sepca/algorithm.hpp"
#include "sepca/matrix.hpp"
#include "sepca/row_stats.hpp"
#include "sepca/theory.hpp"

namespace sepca {

struct GeometryParams {
  double beta_sparsity = 0.75;  // Higher Criticism variants
  std::size_t k_hat = 1;        // fdr
  double zeta = 1.02;
  double nu = std::exp(2.0);
  std::optional<Vector> v;  // optional row direction for theta(v)
};

struct GeometryReport {
  Algorithm a = Algorithm::sum;
  Algorithm b = Algorithm::ell2;
  double r = std::numeric_limits<double>::quiet_NaN();          // l2-ball radius (cross-family pairs)
  double r_minus_h = std::numeric_limits<double>::quiet_NaN();  // hyperplane distance (cross-family pairs)
  double h = std::numeric_limits<double>::quiet_NaN();
  double cos_theta_lim = std::numeric_limits<double>::quiet_NaN();
  double theta_lim = std::numeric_limits<double>::quiet_NaN();  // NaN when no cap exists
  bool cap_exists = false;
  std::optional<double> theta_v;  // angle between v and the all-ones direction of its orthant
  double ratio = std::numeric_limits<double>::quiet_NaN();      // threshold of a over threshold of b
  std::optional<Algorithm> preferred;                           // empty when it depends on v and none was given
};

/// Distance r - h of the detection hyperplane for sum-type selectors.
inline double hyperplane_distance(Algorithm alg, std::size_t n, std::size_t p, const GeometryParams& g) {
  const double log_p = std::log(static_cast<double>(p));
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (alg) {
    case Algorithm::sum:
      return threshold_constants(p).C_U * std::sqrt(log_p / static_cast<double>(n));
    case Algorithm::hc_sum:
      return std::sqrt(2.0 * rho(g.beta_sparsity) * log_p / static_cast<double>(n));
    case Algorithm::fdr: {
      if (g.k_hat < 1 || g.k_hat > p) throw std::invalid_argument("geometry: k_hat must lie in [1, p]");
      const double lg = std::log(g.nu * static_cast<double>(p) / static_cast<double>(g.k_hat));
      return std::sqrt(g.zeta) * (1.0 + std::sqrt(2.0 * lg)) / root_n;
    }
    default:
      throw std::invalid_argument("geometry: " + to_string(alg) + " is not a sum-type selector");
  }
}

/// Radius r of the detection ball for ell2-type selectors.
inline double ball_radius(Algorithm alg, std::size_t n, std::size_t p, const GeometryParams& g) {
  const double log_p = std::log(static_cast<double>(p));
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (alg) {
    case Algorithm::ell2:
      return std::sqrt(threshold_constants(p).C2) * std::sqrt((1.0 + log_p) / root_n);
    case Algorithm::hc_ell2:
      return rho(g.beta_sparsity) * 2.0 * log_p / root_n;
    default:
      throw std::invalid_argument("geometry: " + to_string(alg) + " is not an ell2-type selector");
  }
}

/// theta(v) = arccos(||v||_1 / (||v||_2 sqrt(n))).
inline double vector_angle(std::span<const double> v) {
  const double n2 = norm2(v);
  if (!(n2 > 0.0)) throw std::invalid_argument("vector_angle: zero vector");
  const double c = norm1(v) / (n2 * std::sqrt(static_cast<double>(v.size())));
  return std::acos(std::min(1.0, c));
}

/// Cap angle from radius and cap height.
inline double cap_angle(double r, double h) { return std::acos((r - h) / r); }

inline GeometryReport geometry_compare(Algorithm a, Algorithm b, std::size_t n, std::size_t p,
                                       const GeometryParams& g = {}) {
  if (p < 2 || n < 1) throw std::invalid_argument("geometry_compare: need p >= 2 and n >= 1");
  const auto usable = [](Algorithm x) { return is_sum_family(x) || is_ell2_family(x); };
  if (!usable(a) || !usable(b))
    throw std::invalid_argument("geometry_compare: comparisons involving " +
                                to_string(usable(a) ? b : a) + " have no closed form");
  if (a == b) throw std::invalid_argument("geometry_compare: algorithms must differ");

  GeometryReport rep;
  rep.a = a;
  rep.b = b;
  if (g.v) rep.theta_v = vector_angle(*g.v);

  if (is_sum_family(a) == is_sum_family(b)) {
    // Same geometry on both sides: compare thresholds directly.
    const double ta = is_sum_family(a) ? hyperplane_distance(a, n, p, g) : ball_radius(a, n, p, g);
    const double tb = is_sum_family(b) ? hyperplane_distance(b, n, p, g) : ball_radius(b, n, p, g);
    rep.ratio = ta / tb;
    rep.preferred = rep.ratio <= 1.0 ? a : b;
    return rep;
  }

  const Algorithm sum_alg = is_sum_family(a) ? a : b;
  const Algorithm ball_alg = is_sum_family(a) ? b : a;
  rep.r = ball_radius(ball_alg, n, p, g);
  rep.r_minus_h = hyperplane_distance(sum_alg, n, p, g);
  rep.h = rep.r - rep.r_minus_h;
  rep.cos_theta_lim = rep.r_minus_h / rep.r;
  rep.cap_exists = rep.cos_theta_lim >= 0.0 && rep.cos_theta_lim <= 1.0;
  if (rep.cap_exists) rep.theta_lim = std::acos(rep.cos_theta_lim);
  rep.ratio = is_sum_family(a) ? rep.cos_theta_lim : 1.0 / rep.cos_theta_lim;
  if (!rep.cap_exists) {
    rep.preferred = ball_alg;
  } else if (rep.theta_v) {
    rep.preferred = *rep.theta_v < rep.theta_lim ? sum_alg : ball_alg;
  }
  return rep;
}

}  // namespace sepca

#endif  // SEPCA_GEOMETRY_HPP
