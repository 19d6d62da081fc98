#ifndef SEPCA_PIPELINE_HPP
#define SEPCA_PIPELINE_HPP

#include <cmath>

#include "sepca/algorithm.hpp"
#include "sepca/fdr.hpp"
#include "sepca/selection.hpp"
#include "sepca/svd.hpp"

namespace sepca {

struct AlgorithmOptions {
  SumVariant sum_variant = SumVariant::exact;
  HcRule hc_rule = HcRule::downward_closed;
  double zeta = 1.02;
  double nu = std::exp(2.0);
  double xi1 = 1.0;
  bool svd_fallback = false;  // empty selection -> full SVD
};

/// First stage only.
inline SelectionResult select(const DataMatrix& x, Algorithm alg, double sigma, const AlgorithmOptions& opt = {}) {
  switch (alg) {
    case Algorithm::sum: return select_fwer(x, StatKind::sum, sigma, opt.sum_variant);
    case Algorithm::ell1: return select_fwer(x, StatKind::ell1, sigma);
    case Algorithm::ell2: return select_fwer(x, StatKind::ell2, sigma);
    case Algorithm::hc_sum: return select_hc(x, StatKind::sum, sigma, opt.hc_rule);
    case Algorithm::hc_ell2: return select_hc(x, StatKind::ell2, sigma, opt.hc_rule);
    case Algorithm::fdr: return fdr_select(x, sigma, FdrPenalty(x.rows(), opt.zeta, opt.nu, opt.xi1)).selection;
    case Algorithm::svd_baseline: {
      SelectionResult all;
      all.algorithm = Algorithm::svd_baseline;
      all.selected.resize(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) all.selected[i] = i;
      return all;
    }
  }
  throw std::invalid_argument("select: unknown algorithm");
}

/// Selection followed by the rank-1 SVD of the selected rows.
inline Estimate run_algorithm(const DataMatrix& x, Algorithm alg, double sigma, const AlgorithmOptions& opt = {}) {
  return estimate_two_stage(x, select(x, alg, sigma, opt), opt.svd_fallback);
}

}  // namespace sepca

#endif  // SEPCA_PIPELINE_HPP
