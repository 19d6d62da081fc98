#ifndef SEPCA_SPECIAL_HPP
#define SEPCA_SPECIAL_HPP

// Error function family and the chi-square survival function, built from
// power series and continued fractions so the threshold formulas do not depend
// on platform libm accuracy.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sepca/error.hpp"

namespace sepca::special {

namespace detail {

inline constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;
inline constexpr double kTiny = 1e-300;

// erf(x) = 2x/sqrt(pi) e^{-x^2} sum_k (2x^2)^k / (1*3*...*(2k+1)); all terms positive.
inline double erf_series(double x) {
  const double x2 = x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= 2.0 * x2 / (2.0 * k + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return kTwoOverSqrtPi * x * std::exp(-x2) * sum;
}

// Denominator f(x) of erfc(x) = exp(-x^2) / (sqrt(pi) f(x)), x > 0, by the
// Laplace continued fraction with modified Lentz evaluation.
inline double erfc_fraction(double x) {
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 5000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

inline double erfc_continued_fraction(double x) { return std::numbers::inv_sqrtpi * std::exp(-x * x) / erfc_fraction(x); }

// Giles' single-precision approximation to erfinv(1 - q), used as a starting point.
inline double erfinv_initial(double y, double w) {
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * y;
}

}  // namespace detail

inline double erfc(double x);

/// Error function; absolute error below 1e-15 on the real line.
inline double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (ax < 2.0) return detail::erf_series(x);
  const double r = 1.0 - detail::erfc_continued_fraction(ax);
  return x < 0 ? -r : r;
}

/// Complementary error function with relative accuracy in the upper tail.
inline double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0) return 2.0 - erfc(-x);
  if (x < 2.0) return 1.0 - detail::erf_series(x);
  if (x > 27.3) return 0.0;
  return detail::erfc_continued_fraction(x);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * erfc(-x * std::numbers::sqrt2 / 2.0); }

/// Standard normal upper tail P(Z > x).
inline double normal_sf(double x) { return 0.5 * erfc(x * std::numbers::sqrt2 / 2.0); }

/// Inverse of erfc on (0, 2).
inline double erfcinv(double q) {
  if (!(q > 0.0 && q < 2.0)) throw std::domain_error("erfcinv: argument must lie in (0, 2), got " + std::to_string(q));
  if (q > 1.0) return -erfcinv(2.0 - q);
  if (q == 1.0) return 0.0;
  const double w = -std::log(q * (2.0 - q));
  if (q < 1e-10) {
    // Far tail: Newton on log erfc(x) = log q, with erfc(x) ~ exp(-x^2) / (x sqrt(pi)) as the start.
    const double log_q = std::log(q);
    double x = std::sqrt(-log_q - 0.5 * std::log(std::numbers::pi));
    x = std::sqrt(-log_q - std::log(std::numbers::pi) / 2.0 - std::log(x));
    for (int it = 0; it < 100; ++it) {
      const double f = detail::erfc_fraction(x);
      const double g = std::log(std::numbers::inv_sqrtpi) - x * x - std::log(f) - log_q;
      const double dx = g / (2.0 * f);
      x += dx;
      if (std::abs(dx) <= 1e-16 * x) break;
    }
    return x;
  }
  double x = detail::erfinv_initial(1.0 - q, w);
  if (!(x > 0.0)) x = 1e-8;
  for (int it = 0; it < 100; ++it) {
    const double f = erfc(x) - q;
    const double slope = detail::kTwoOverSqrtPi * std::exp(-x * x);
    if (slope == 0.0) break;
    const double s = f / slope;
    const double dx = s / (1.0 + x * s);  // Halley step
    x += dx;
    if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

/// Inverse error function on (-1, 1).
inline double erfinv(double y) {
  if (!(std::abs(y) < 1.0)) throw std::domain_error("erfinv: argument must lie in (-1, 1), got " + std::to_string(y));
  if (y < 0) return -erfinv(-y);
  if (y == 0.0) return 0.0;
  if (y > 0.5) return erfcinv(1.0 - y);
  const double w = -std::log((1.0 - y) * (1.0 + y));
  double x = detail::erfinv_initial(y, w);
  for (int it = 0; it < 100; ++it) {
    const double f = erf(x) - y;
    const double s = f / (detail::kTwoOverSqrtPi * std::exp(-x * x));
    const double dx = -s / (1.0 + x * s);
    x += dx;
    if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

/// Standard normal quantile.
inline double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("normal_quantile: probability must lie in (0, 1)");
  return -std::numbers::sqrt2 * erfcinv(2.0 * prob);
}

/// Regularized upper incomplete gamma Q(a, z) = Gamma(a, z) / Gamma(a).
inline double gamma_q(double a, double z) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_q: shape must be positive");
  if (!(z >= 0.0)) throw std::invalid_argument("gamma_q: argument must be nonnegative");
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  const double log_prefix = -z + a * std::log(z) - std::lgamma(a);
  if (z < a + 1.0) {
    // Series for P(a, z).
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
      term *= z / (a + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  // Continued fraction for Q(a, z), modified Lentz.
  double b = z + 1.0 - a;
  double c = 1.0 / detail::kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::abs(c) < detail::kTiny) c = detail::kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefix) * h;
}

/// P(chi^2_dof > x).
inline double chi2_sf(double x, unsigned long dof) {
  if (dof == 0) throw std::invalid_argument("chi2_sf: degrees of freedom must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("chi2_sf: argument must be nonnegative");
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

}  // namespace sepca::special

#endif  // SEPCA_SPECIAL_HPP
