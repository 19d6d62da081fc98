#ifndef SEPCA_ALGORITHM_HPP
#define SEPCA_ALGORITHM_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sepca {

/// The six two-stage estimators plus the plain-SVD baseline.
enum class Algorithm { sum, ell1, ell2, hc_sum, hc_ell2, fdr, svd_baseline };

inline constexpr std::array<Algorithm, 6> kSepcaAlgorithms = {Algorithm::sum,    Algorithm::ell1,    Algorithm::ell2,
                                                              Algorithm::hc_sum, Algorithm::hc_ell2, Algorithm::fdr};

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sum: return "sum";
    case Algorithm::ell1: return "ell1";
    case Algorithm::ell2: return "ell2";
    case Algorithm::hc_sum: return "hc-sum";
    case Algorithm::hc_ell2: return "hc-ell2";
    case Algorithm::fdr: return "fdr";
    case Algorithm::svd_baseline: return "svd-baseline";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::sum, Algorithm::ell1, Algorithm::ell2, Algorithm::hc_sum, Algorithm::hc_ell2,
                      Algorithm::fdr, Algorithm::svd_baseline}) {
    if (name == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected sum, ell1, ell2, hc-sum, hc-ell2, fdr or svd-baseline)");
}

/// Algorithms whose selection relies on row sums, hence on v being equisigned.
inline bool is_sum_family(Algorithm a) {
  return a == Algorithm::sum || a == Algorithm::hc_sum || a == Algorithm::fdr;
}

inline bool is_ell2_family(Algorithm a) { return a == Algorithm::ell2 || a == Algorithm::hc_ell2; }

}  // namespace sepca

#endif  // SEPCA_ALGORITHM_HPP
