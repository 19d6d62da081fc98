#ifndef SEPCA_FDR_HPP
#define SEPCA_FDR_HPP

// FDR-type selectors: Higher Criticism thresholding of row p-values and
// complexity-penalized hard thresholding of row sums.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sepca/matrix.hpp"
#include "sepca/row_stats.hpp"
#include "sepca/selection.hpp"
#include "sepca/special.hpp"

namespace sepca {

/// Row sums y_i = sum_k X_ik, distributed N(theta u_i sum_k v_k, sigma^2).
inline Vector row_sums(const DataMatrix& x) {
  Vector y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (double e : x.row(i)) s += e;
    y[i] = s;
  }
  return y;
}

/// Null p-values of the row statistics. sum: two-sided Gaussian on y_i / sigma;
/// ell2: chi-square with n degrees of freedom on n T_i / sigma^2.
inline Vector pvalues(const DataMatrix& x, StatKind kind, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("pvalues: sigma must be positive");
  Vector p(x.rows());
  const double dn = static_cast<double>(x.cols());
  switch (kind) {
    case StatKind::sum: {
      const Vector y = row_sums(x);
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = special::erfc(std::abs(y[i]) / sigma / std::numbers::sqrt2);
      break;
    }
    case StatKind::ell2:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = row_statistic(StatKind::ell2, x.row(i));
        p[i] = special::chi2_sf(dn * t / (sigma * sigma), x.cols());
      }
      break;
    case StatKind::ell1:
      throw std::invalid_argument("pvalues: only sum and ell2 statistics have p-values");
  }
  for (double& v : p) v = std::clamp(v, 0.0, 1.0);
  return p;
}

// ---------------------------------------------------------------------------
// Higher Criticism

enum class HcRule {
  downward_closed,  // every rank up to the largest rank above the threshold
  literal,          // only the ranks above the threshold
};

struct HCResult {
  Vector pvalues;
  IndexSet sorted_index;  // ascending p-value, ties by index
  /// HC_{p,i} per sorted rank. Ranks with p_(i) > 1/2 or p_(i) == 1 hold -inf;
  /// ranks with p_(i) == 0 hold +inf.
  Vector hc_values;
  double hc_max = -std::numeric_limits<double>::infinity();  // over 1/p <= p_(i) <= 1/2
  double threshold = 0.0;                                     // sqrt(2 log log p)
  std::size_t cutoff_rank = 0;                                // number of leading ranks selected (closure rule)
  IndexSet selected;                                          // ascending
};

inline HCResult hc_select(Vector pvals, HcRule rule = HcRule::downward_closed) {
  const std::size_t p = pvals.size();
  if (p < 16) throw std::invalid_argument("hc_select: need at least 16 p-values, got " + std::to_string(p));
  for (double v : pvals)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("hc_select: p-values must lie in [0, 1]");
  HCResult r;
  const double dp = static_cast<double>(p);
  r.threshold = std::sqrt(2.0 * std::log(std::log(dp)));
  r.sorted_index.resize(p);
  std::iota(r.sorted_index.begin(), r.sorted_index.end(), std::size_t{0});
  std::stable_sort(r.sorted_index.begin(), r.sorted_index.end(),
                   [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  r.hc_values.assign(p, -std::numeric_limits<double>::infinity());
  const double root_p = std::sqrt(dp);
  for (std::size_t rank = 0; rank < p; ++rank) {
    const double q = pvals[r.sorted_index[rank]];
    if (q > 0.5) break;
    if (q == 0.0) {
      r.hc_values[rank] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double hc = root_p * (static_cast<double>(rank + 1) / dp - q) / std::sqrt(q * (1.0 - q));
    r.hc_values[rank] = hc;
    if (q >= 1.0 / dp) r.hc_max = std::max(r.hc_max, hc);
  }
  if (rule == HcRule::downward_closed) {
    for (std::size_t rank = p; rank-- > 0;) {
      if (r.hc_values[rank] > r.threshold) {
        r.cutoff_rank = rank + 1;
        break;
      }
    }
    r.selected.assign(r.sorted_index.begin(), r.sorted_index.begin() + static_cast<std::ptrdiff_t>(r.cutoff_rank));
  } else {
    for (std::size_t rank = 0; rank < p; ++rank)
      if (r.hc_values[rank] > r.threshold) {
        r.selected.push_back(r.sorted_index[rank]);
        r.cutoff_rank = rank + 1;
      }
  }
  std::sort(r.selected.begin(), r.selected.end());
  r.pvalues = std::move(pvals);
  return r;
}

/// HC-sum / HC-ell2 first stage as a SelectionResult.
inline SelectionResult select_hc(const DataMatrix& x, StatKind kind, double sigma,
                                 HcRule rule = HcRule::downward_closed) {
  SelectionResult s;
  s.algorithm = kind == StatKind::ell2 ? Algorithm::hc_ell2 : Algorithm::hc_sum;
  s.stats = row_statistics(kind, x);
  HCResult hc = hc_select(pvalues(x, kind, sigma), rule);
  double cut = 0.0;
  for (std::size_t i : hc.selected) cut = std::max(cut, hc.pvalues[i]);
  s.threshold = cut;
  s.selected = std::move(hc.selected);
  return s;
}

// ---------------------------------------------------------------------------
// Penalized hard thresholding

/// pen(k) = xi1 zeta k (1 + sqrt(2 L_k))^2 with L_k = log(nu p / k).
class FdrPenalty {
 public:
  FdrPenalty(std::size_t p, double zeta = 1.02, double nu = std::exp(2.0), double xi1 = 1.0)
      : p_(p), zeta_(zeta), nu_(nu), xi1_(xi1) {
    if (p_ < 1) throw std::invalid_argument("FdrPenalty: p must be >= 1");
    if (!(zeta_ > 1.0)) throw std::invalid_argument("FdrPenalty: zeta must exceed 1");
    if (!(nu_ >= std::numbers::e)) throw std::invalid_argument("FdrPenalty: nu must be >= e");
    if (!(xi1_ >= 1.0)) throw std::invalid_argument("FdrPenalty: xi1 must be >= 1");
  }

  /// nu = 2^{1/omega} targets false discovery rate omega.
  static FdrPenalty for_fdr_level(std::size_t p, double omega, double zeta = 1.02) {
    if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("FdrPenalty: omega must lie in (0, 1)");
    return FdrPenalty(p, zeta, std::pow(2.0, 1.0 / omega));
  }

  std::size_t p() const noexcept { return p_; }
  double zeta() const noexcept { return zeta_; }
  double nu() const noexcept { return nu_; }
  double xi1() const noexcept { return xi1_; }

  double pen(std::size_t k) const {
    check(k);
    if (k == 0) return 0.0;
    const double dk = static_cast<double>(k);
    const double a = 1.0 + std::sqrt(2.0 * log_ratio(k));
    return xi1_ * zeta_ * dk * a * a;
  }

  /// t_k = sqrt(pen(k) - pen(k-1)), k >= 1.
  double t(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("FdrPenalty::t: k must be >= 1");
    return std::sqrt(pen(k) - pen(k - 1));
  }

  /// lambda_{p,k} = sqrt(xi1 zeta) (1 + sqrt(2 L_k)), the leading-order value of t_k.
  double lambda(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("FdrPenalty::lambda: k must be >= 1");
    check(k);
    return std::sqrt(xi1_ * zeta_) * (1.0 + std::sqrt(2.0 * log_ratio(k)));
  }

 private:
  void check(std::size_t k) const {
    if (k > p_) throw std::invalid_argument("FdrPenalty: k = " + std::to_string(k) + " exceeds p = " + std::to_string(p_));
  }
  double log_ratio(std::size_t k) const { return std::log(nu_ * static_cast<double>(p_) / static_cast<double>(k)); }

  std::size_t p_;
  double zeta_, nu_, xi1_;
};

struct FdrSelection {
  SelectionResult selection;
  std::size_t k_hat = 0;
  Vector objective;  // J(k) for k = 0..p
};

/// k_hat = argmin_k sum_{i>k} |y|_(i)^2 + sigma^2 pen(k) over k = 0..p (first
/// minimizer), then keep {i : |y_i| >= sigma t_khat}.
inline FdrSelection fdr_select(const DataMatrix& x, double sigma, const FdrPenalty& penalty) {
  if (!(sigma > 0.0)) throw std::invalid_argument("fdr_select: sigma must be positive");
  if (penalty.p() != x.rows())
    throw std::invalid_argument("fdr_select: penalty built for p = " + std::to_string(penalty.p()) + " but X has " +
                                std::to_string(x.rows()) + " rows");
  const std::size_t p = x.rows();
  FdrSelection out;
  out.selection.algorithm = Algorithm::fdr;
  const Vector y = row_sums(x);
  Vector abs_y(p);
  for (std::size_t i = 0; i < p; ++i) abs_y[i] = std::abs(y[i]);
  IndexSet order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abs_y[a] > abs_y[b]; });

  // Residual sum for k = p is 0; accumulate from the smallest upwards.
  Vector tail(p + 1, 0.0);
  for (std::size_t k = p; k-- > 0;) tail[k] = tail[k + 1] + abs_y[order[k]] * abs_y[order[k]];
  out.objective.resize(p + 1);
  const double s2 = sigma * sigma;
  std::size_t best = 0;
  for (std::size_t k = 0; k <= p; ++k) {
    out.objective[k] = tail[k] + s2 * penalty.pen(k);
    if (out.objective[k] < out.objective[best]) best = k;
  }
  out.k_hat = best;
  out.selection.stats = abs_y;
  if (best == 0) {
    out.selection.threshold = std::numeric_limits<double>::infinity();
    return out;
  }
  out.selection.threshold = sigma * penalty.t(best);
  for (std::size_t i = 0; i < p; ++i)
    if (abs_y[i] >= out.selection.threshold) out.selection.selected.push_back(i);
  return out;
}

}  // namespace sepca

#endif  // SEPCA_FDR_HPP
