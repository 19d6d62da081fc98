#ifndef SEPCA_THEORY_HPP
#define SEPCA_THEORY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "sepca/algorithm.hpp"
#include "sepca/error.hpp"
#include "sepca/matrix.hpp"
#include "sepca/model.hpp"
#include "sepca/row_stats.hpp"
#include "sepca/special.hpp"

namespace sepca {

// ---------------------------------------------------------------------------
// Loss and support metrics

/// ||u - sign(<u, u_hat>) u_hat||^2 with sign(0) = +1. Lies in [0, 2] for unit inputs.
inline double l2_loss(std::span<const double> u, std::span<const double> u_hat) {
  if (u.size() != u_hat.size()) throw std::invalid_argument("l2_loss: length mismatch");
  const double s = dot(u, u_hat) < 0 ? -1.0 : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - s * u_hat[i];
    acc += d * d;
  }
  return acc;
}

struct SupportMetrics {
  std::size_t hamming = 0;
  double tpr = 0.0;
  double fdr = 0.0;
  bool tpr_undefined = false;  // true support empty
};

/// Hamming distance, true-positive rate and false-discovery proportion of an
/// estimated support. Empty truth gives tpr 1 (empty estimate) or 0, flagged.
inline SupportMetrics support_metrics(IndexSet truth, IndexSet estimate, std::size_t p) {
  for (std::size_t i : truth)
    if (i >= p) throw std::invalid_argument("support_metrics: index " + std::to_string(i) + " out of range");
  for (std::size_t i : estimate)
    if (i >= p) throw std::invalid_argument("support_metrics: index " + std::to_string(i) + " out of range");
  std::sort(truth.begin(), truth.end());
  truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
  std::sort(estimate.begin(), estimate.end());
  estimate.erase(std::unique(estimate.begin(), estimate.end()), estimate.end());
  IndexSet common;
  std::set_intersection(truth.begin(), truth.end(), estimate.begin(), estimate.end(), std::back_inserter(common));
  SupportMetrics m;
  m.hamming = truth.size() + estimate.size() - 2 * common.size();
  if (truth.empty()) {
    m.tpr_undefined = true;
    m.tpr = estimate.empty() ? 1.0 : 0.0;
  } else {
    m.tpr = static_cast<double>(common.size()) / static_cast<double>(truth.size());
  }
  m.fdr = estimate.empty() ? 0.0
                           : static_cast<double>(estimate.size() - common.size()) / static_cast<double>(estimate.size());
  return m;
}

// ---------------------------------------------------------------------------
// Detection boundaries

/// Higher Criticism detection boundary in the sparsity index beta.
inline double rho(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) throw std::invalid_argument("rho: beta must lie in (1/2, 1)");
  if (beta <= 0.75) return beta - 0.5;
  const double a = 1.0 - std::sqrt(1.0 - beta);
  return a * a;
}

/// beta = 1 - log s / log p, clamped into the open interval (1/2, 1).
inline double sparsity_index(std::size_t s, std::size_t p) {
  if (s < 1 || p < 2 || s > p) throw std::invalid_argument("sparsity_index: need 1 <= s <= p and p >= 2");
  const double beta = 1.0 - std::log(static_cast<double>(s)) / std::log(static_cast<double>(p));
  return std::clamp(beta, 0.5 + 1e-6, 1.0 - 1e-6);
}

/// Expected ell1 row statistic (sigma = 1) for a coordinate of size t:
/// g(t) = (1/n) sqrt(2/pi) [sum_k exp(-a_k^2) + sqrt(pi) sum_k a_k erf(a_k)],
/// a_k = sqrt(n) t v_k / sqrt(2).
inline double ell1_mean_statistic(double t, std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double c = std::sqrt(n) * t / std::numbers::sqrt2;
  double s_exp = 0.0, s_erf = 0.0;
  for (double vk : v) {
    const double a = c * vk;
    s_exp += std::exp(-a * a);
    s_erf += a * special::erf(a);
  }
  return std::sqrt(2.0 / std::numbers::pi) / n * (s_exp + std::sqrt(std::numbers::pi) * s_erf);
}

/// Root of g(t) = sqrt(2/pi) + C1 log(e p) / sqrt(n) by bracket doubling and bisection.
inline double solve_t_ell1(std::size_t p, std::span<const double> v) {
  if (p < 2) throw std::invalid_argument("solve_t_ell1: p must be >= 2");
  if (v.empty()) throw std::invalid_argument("solve_t_ell1: v is empty");
  if (std::abs(norm2(v) - 1.0) > 1e-10) throw std::invalid_argument("solve_t_ell1: v must have unit norm");
  const double n = static_cast<double>(v.size());
  const ThresholdConstants c = threshold_constants(p);
  const double target = std::sqrt(2.0 / std::numbers::pi) + c.C1 * (1.0 + std::log(static_cast<double>(p))) / std::sqrt(n);
  double lo = 0.0, hi = 1.0;
  while (ell1_mean_statistic(hi, v) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("solve_t_ell1: no bracket below t = 1e6");
  }
  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = ell1_mean_statistic(mid, v);
    if (std::abs(g - target) <= 1e-12) break;
    (g < target ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  if (std::abs(ell1_mean_statistic(mid, v) - target) > 1e-10)
    throw NumericalError("solve_t_ell1: bisection did not reach residual 1e-10");
  return mid;
}

struct BoundarySpec {
  Algorithm algorithm = Algorithm::sum;
  std::size_t n = 1;
  std::size_t p = 2;
  double sigma = 1.0;
  Vector v;                              // needed by sum, ell1, hc-sum, fdr
  std::optional<double> beta_sparsity;   // hc-sum, hc-ell2
  std::optional<std::size_t> sparsity;   // alternative source of beta_sparsity (and default k_hat)
  std::optional<std::size_t> k_hat;      // fdr; defaults to the sparsity, else 1
  double zeta = 1.02;
  double nu = std::exp(2.0);
};

inline double resolved_beta(const BoundarySpec& spec) {
  if (spec.beta_sparsity) {
    if (!(*spec.beta_sparsity > 0.5 && *spec.beta_sparsity < 1.0))
      throw std::invalid_argument("beta_crit: beta_sparsity must lie in (1/2, 1)");
    return *spec.beta_sparsity;
  }
  if (spec.sparsity) return sparsity_index(*spec.sparsity, spec.p);
  throw std::invalid_argument("beta_crit: Higher Criticism boundaries need beta_sparsity or sparsity");
}

/// Smallest |theta u_i| each algorithm detects with probability tending to one.
/// (1 - o(1)) factors are taken as 1.
inline double beta_crit(const BoundarySpec& spec) {
  if (spec.p < 2) throw std::invalid_argument("beta_crit: p must be >= 2");
  if (spec.n < 1) throw std::invalid_argument("beta_crit: n must be >= 1");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("beta_crit: sigma must be positive");
  const double log_p = std::log(static_cast<double>(spec.p));
  const double root_n = std::sqrt(static_cast<double>(spec.n));
  const auto need_v = [&] {
    if (spec.v.size() != spec.n)
      throw std::invalid_argument("beta_crit: v must have length n = " + std::to_string(spec.n));
  };
  const auto sum_family_l1 = [&] {
    need_v();
    if (!is_equisigned(spec.v)) throw std::invalid_argument("beta_crit: sum-type boundaries require equisigned v");
    const double l1 = std::abs(std::accumulate(spec.v.begin(), spec.v.end(), 0.0));
    if (!(l1 > 0.0)) throw std::invalid_argument("beta_crit: sum of v is zero");
    return l1;
  };
  switch (spec.algorithm) {
    case Algorithm::sum: {
      const double l1 = sum_family_l1();
      return spec.sigma * threshold_constants(spec.p).C_U * std::sqrt(log_p) / l1;
    }
    case Algorithm::ell2: {
      const double c2 = threshold_constants(spec.p).C2;
      return spec.sigma * std::sqrt(c2) * std::sqrt((1.0 + log_p) / root_n);
    }
    case Algorithm::ell1:
      need_v();
      return spec.sigma * solve_t_ell1(spec.p, spec.v);
    case Algorithm::hc_sum: {
      const double l1 = sum_family_l1();
      return spec.sigma * std::sqrt(rho(resolved_beta(spec))) * std::sqrt(2.0 * log_p) / l1;
    }
    case Algorithm::hc_ell2:
      return spec.sigma * rho(resolved_beta(spec)) * 2.0 * log_p / root_n;
    case Algorithm::fdr: {
      const double l1 = sum_family_l1();
      const std::size_t k = spec.k_hat.value_or(spec.sparsity.value_or(1));
      if (k < 1 || k > spec.p) throw std::invalid_argument("beta_crit: k_hat must lie in [1, p]");
      if (!(spec.zeta > 1.0) || !(spec.nu >= std::numbers::e))
        throw std::invalid_argument("beta_crit: need zeta > 1 and nu >= e");
      const double lg = std::log(spec.nu * static_cast<double>(spec.p) / static_cast<double>(k));
      return spec.sigma * std::sqrt(spec.zeta) * (1.0 + std::sqrt(2.0 * lg)) / l1;
    }
    case Algorithm::svd_baseline:
      break;
  }
  throw std::invalid_argument("beta_crit: no detection boundary for " + to_string(spec.algorithm));
}

/// Almost-sure limit of |<u_hat, u>|^2 for the plain SVD when p/n -> c.
inline double svd_overlap_limit(double theta, double sigma, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("svd_overlap_limit: c must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("svd_overlap_limit: sigma must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("svd_overlap_limit: theta must be nonnegative");
  const double phi2 = (theta / sigma) * (theta / sigma);
  if (phi2 < std::sqrt(c)) return 0.0;  // phi < c^{1/4}
  return std::max(0.0, 1.0 - c * (1.0 + phi2) / (phi2 * (c + phi2)));
}

}  // namespace sepca

#endif  // SEPCA_THEORY_HPP
