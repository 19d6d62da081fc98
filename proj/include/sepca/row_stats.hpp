#ifndef SEPCA_ROW_STATS_HPP
#define SEPCA_ROW_STATS_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "sepca/matrix.hpp"
#include "sepca/special.hpp"

namespace sepca {

enum class StatKind { sum, ell1, ell2 };

inline std::string to_string(StatKind k) {
  switch (k) {
    case StatKind::sum: return "sum";
    case StatKind::ell1: return "ell1";
    case StatKind::ell2: return "ell2";
  }
  return "?";
}

/// Row statistic T_i:
///   sum:  |sum_k x_k| / sqrt(n)
///   ell1: sum_k |x_k| / sqrt(n)
///   ell2: sum_k x_k^2
inline double row_statistic(StatKind kind, std::span<const double> row) {
  if (row.empty()) throw std::invalid_argument("row_statistic: empty row");
  double acc = 0.0;
  for (double x : row) {
    if (!std::isfinite(x)) throw std::invalid_argument("row_statistic: non-finite entry");
    switch (kind) {
      case StatKind::sum: acc += x; break;
      case StatKind::ell1: acc += std::abs(x); break;
      case StatKind::ell2: acc += x * x; break;
    }
  }
  const double root_n = std::sqrt(static_cast<double>(row.size()));
  switch (kind) {
    case StatKind::sum: return std::abs(acc) / root_n;
    case StatKind::ell1: return acc / root_n;
    case StatKind::ell2: return acc;
  }
  return acc;
}

inline Vector row_statistics(StatKind kind, const DataMatrix& x) {
  Vector t(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) t[i] = row_statistic(kind, x.row(i));
  return t;
}

/// Which sum-statistic threshold to use: the sharp Gaussian-maximum expression or
/// the simpler sigma * C_U * sqrt(log p / n).
enum class SumVariant { exact, table_bound };

/// Constants of the FWER thresholds, all depending on p only (K = e).
struct ThresholdConstants {
  double K = std::numbers::e;
  double C1 = 0.0;       // K sqrt(1 - 2/pi)
  double C2 = 0.0;       // sqrt(2) K
  double U = 0.0;        // sqrt(2) erfinv(1 - 1/p)
  double delta = 0.0;    // (pi^2 / 12) (log p)^{-3/2}
  double kappa_U = 0.0;  // >= sqrt(2)/U (3 + sqrt(log p))
  double C_U = 0.0;      // sqrt(2) + kappa_U / (3 sqrt(2))
};

/// Smallest admissible kappa_U for dimension p.
inline double min_kappa_U(std::size_t p) {
  if (p < 2) throw std::invalid_argument("min_kappa_U: p must be >= 2");
  const double U = std::numbers::sqrt2 * special::erfcinv(1.0 / static_cast<double>(p));
  return std::numbers::sqrt2 / U * (3.0 + std::sqrt(std::log(static_cast<double>(p))));
}

/// kappa_U defaults to its minimum; a supplied value must not be below it.
inline ThresholdConstants threshold_constants(std::size_t p, std::optional<double> kappa_U = std::nullopt) {
  if (p < 2) throw std::invalid_argument("threshold constants need p >= 2 (log p must be positive)");
  ThresholdConstants c;
  const double log_p = std::log(static_cast<double>(p));
  c.C1 = c.K * std::sqrt(1.0 - 2.0 / std::numbers::pi);
  c.C2 = std::numbers::sqrt2 * c.K;
  // erfinv(1 - 1/p) == erfcinv(1/p), evaluated without cancellation.
  c.U = std::numbers::sqrt2 * special::erfcinv(1.0 / static_cast<double>(p));
  c.delta = std::numbers::pi * std::numbers::pi / 12.0 * std::pow(log_p, -1.5);
  const double kmin = std::numbers::sqrt2 / c.U * (3.0 + std::sqrt(log_p));
  if (kappa_U && !(*kappa_U >= kmin))
    throw std::invalid_argument("kappa_U = " + std::to_string(*kappa_U) + " is below the admissible minimum " +
                                std::to_string(kmin));
  c.kappa_U = kappa_U.value_or(kmin);
  c.C_U = std::numbers::sqrt2 + c.kappa_U / (3.0 * std::numbers::sqrt2);
  return c;
}

struct ThresholdSpec {
  StatKind kind = StatKind::sum;
  std::size_t n = 1;
  std::size_t p = 2;
  double sigma = 1.0;
  SumVariant variant = SumVariant::exact;  // sum only
  std::optional<double> kappa_U;           // table_bound only
};

/// FWER threshold tau_{n,p}, calibrated so that P(max_i T_i >= tau) <= 1/(e p) under the null.
inline double fwer_threshold(const ThresholdSpec& spec) {
  if (spec.p < 2) throw std::invalid_argument("fwer_threshold: p must be >= 2");
  if (spec.n < 1) throw std::invalid_argument("fwer_threshold: n must be >= 1");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("fwer_threshold: sigma must be positive");
  const ThresholdConstants c = threshold_constants(spec.p, spec.kappa_U);
  const double dp = static_cast<double>(spec.p);
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  const double log_p = std::log(dp);
  const double log_ep = 1.0 + log_p;
  switch (spec.kind) {
    case StatKind::ell1:
      return spec.sigma * (std::sqrt(2.0 / std::numbers::pi) + c.C1 * log_ep / root_n);
    case StatKind::ell2:
      return spec.sigma * spec.sigma * (1.0 + c.C2 * log_ep / root_n);
    case StatKind::sum:
      if (spec.variant == SumVariant::table_bound) return spec.sigma * c.C_U * std::sqrt(log_p) / root_n;
      return spec.sigma / root_n *
             (std::sqrt(2.0 * log_p) + (log_ep / 3.0 + std::sqrt(log_ep)) / c.U + c.delta);
  }
  return 0.0;
}

}  // namespace sepca

#endif  // SEPCA_ROW_STATS_HPP
