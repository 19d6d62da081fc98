#ifndef SEPCA_SELECTION_HPP
#define SEPCA_SELECTION_HPP

#include <cmath>
#include <stdexcept>

#include "sepca/algorithm.hpp"
#include "sepca/matrix.hpp"
#include "sepca/row_stats.hpp"
#include "sepca/svd.hpp"

namespace sepca {

/// Output of a first-stage coordinate selector.
///
/// `stats` holds the per-row statistic the selector used and `threshold` the
/// cut it applied on that scale: tau_{n,p} for the FWER selectors, sigma*t_khat
/// on |row sum| for FDR thresholding (infinity when nothing is selected), and
/// the largest selected p-value for Higher Criticism (0 when empty).
struct SelectionResult {
  IndexSet selected;  // ascending
  Vector stats;
  double threshold = 0.0;
  Algorithm algorithm = Algorithm::sum;
};

inline Algorithm algorithm_for(StatKind kind) {
  switch (kind) {
    case StatKind::sum: return Algorithm::sum;
    case StatKind::ell1: return Algorithm::ell1;
    case StatKind::ell2: return Algorithm::ell2;
  }
  return Algorithm::sum;
}

/// Selects every row with T_i >= tau_{n,p}. O(pn).
inline SelectionResult select_fwer(const DataMatrix& x, StatKind kind, double sigma,
                                   SumVariant variant = SumVariant::exact) {
  if (!(sigma > 0.0)) throw std::invalid_argument("select_fwer: sigma must be positive");
  if (x.rows() < 2) throw std::invalid_argument("select_fwer: need p >= 2 rows");
  SelectionResult r;
  r.algorithm = algorithm_for(kind);
  r.threshold = fwer_threshold({kind, x.cols(), x.rows(), sigma, variant, std::nullopt});
  r.stats = row_statistics(kind, x);
  for (std::size_t i = 0; i < r.stats.size(); ++i)
    if (r.stats[i] >= r.threshold) r.selected.push_back(i);
  return r;
}

/// Second stage: rank-1 SVD of the selected rows, embedded back into R^p.
struct Estimate {
  Vector u_hat;  // zero off the selected rows
  Vector v_hat;
  double theta_hat = 0.0;
  bool empty_selection = false;  // u_hat is the zero vector
  bool fell_back = false;        // empty selection replaced by the full SVD
  int svd_iterations = 0;
  bool svd_converged = true;
  SelectionResult selection;
};

/// With `fallback_to_full_svd`, an empty selection uses the SVD of all of X
/// instead of returning the flagged zero estimate.
inline Estimate estimate_two_stage(const DataMatrix& x, SelectionResult selection, bool fallback_to_full_svd = false) {
  Estimate e;
  for (std::size_t i : selection.selected)
    if (i >= x.rows()) throw std::out_of_range("estimate_two_stage: selected index out of range");
  if (selection.selected.empty() && !fallback_to_full_svd) {
    e.u_hat.assign(x.rows(), 0.0);
    e.v_hat.assign(x.cols(), 0.0);
    e.empty_selection = true;
    e.selection = std::move(selection);
    return e;
  }
  IndexSet rows = selection.selected;
  if (rows.empty()) {
    e.fell_back = true;
    rows.resize(x.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  const Rank1SVD svd = rows.size() == x.rows() ? rank1_svd(x) : rank1_svd(x.select_rows(rows));
  e.u_hat.assign(x.rows(), 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) e.u_hat[rows[k]] = svd.u_hat[k];
  e.v_hat = svd.v_hat;
  e.theta_hat = svd.sigma1;
  e.svd_iterations = svd.iterations;
  e.svd_converged = svd.converged;
  e.selection = std::move(selection);
  return e;
}

}  // namespace sepca

#endif  // SEPCA_SELECTION_HPP
