#ifndef SEPCA_BENCH_HPP
#define SEPCA_BENCH_HPP

// Noise-level estimation and the Monte-Carlo experiment harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sepca/algorithm.hpp"
#include "sepca/error.hpp"
#include "sepca/matrix.hpp"
#include "sepca/model.hpp"
#include "sepca/parallel.hpp"
#include "sepca/pipeline.hpp"
#include "sepca/rng.hpp"
#include "sepca/theory.hpp"

namespace sepca {

// ---------------------------------------------------------------------------
// Noise level

struct SigmaEstimate {
  double value = 0.0;
  bool degenerate = false;  // all detail coefficients identical (e.g. constant rows)
};

inline double median_inplace(Vector& x) {
  if (x.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  const double hi = x[mid];
  if (x.size() % 2 == 1) return hi;
  const double lo = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

/// Finest-scale Haar detail coefficients d = (X_{i,2k+1} - X_{i,2k}) / sqrt(2),
/// pooled over rows; sigma_hat = 1.4826 MAD(d) sqrt(n). An odd last column is dropped.
inline SigmaEstimate estimate_sigma(const DataMatrix& x) {
  if (x.cols() < 2) throw std::invalid_argument("estimate_sigma: need at least 2 columns");
  const std::size_t pairs = x.cols() / 2;
  Vector d;
  d.reserve(x.rows() * pairs);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t k = 0; k < pairs; ++k) d.push_back((r[2 * k + 1] - r[2 * k]) / std::numbers::sqrt2);
  }
  Vector work = d;
  const double med = median_inplace(work);
  for (std::size_t k = 0; k < d.size(); ++k) work[k] = std::abs(d[k] - med);
  const double mad = median_inplace(work);
  SigmaEstimate est;
  est.value = 1.4826 * mad * std::sqrt(static_cast<double>(x.cols()));
  est.degenerate = !(est.value > 0.0);
  return est;
}

// ---------------------------------------------------------------------------
// Experiment harness

enum class SigmaMode { known, estimated };

struct ExperimentConfig {
  std::size_t p = 1000;
  double sigma = 1.0;
  std::vector<std::size_t> n_grid{500};
  Vector theta_grid{1.0};
  VProfile v_profile{VProfile::Kind::rise_fall, {}};
  USpec u_spec = ExplicitSupport{{0}, {}};
  std::vector<Algorithm> algorithms{kSepcaAlgorithms.begin(), kSepcaAlgorithms.end()};
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  SigmaMode sigma_mode = SigmaMode::known;
  AlgorithmOptions options;
  unsigned threads = 0;

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (p < 2) throw ConfigError("p must be >= 2");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (n_grid.empty() || theta_grid.empty()) throw ConfigError("n and theta grids must be nonempty");
    for (std::size_t n : n_grid)
      if (n < 2) throw ConfigError("grid values of n must be >= 2");
    for (double t : theta_grid)
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("grid values of theta must be positive");
    if (algorithms.empty()) throw ConfigError("no algorithms requested");
    const bool uses_hc = std::any_of(algorithms.begin(), algorithms.end(), [](Algorithm a) {
      return a == Algorithm::hc_sum || a == Algorithm::hc_ell2;
    });
    if (uses_hc && p < 16) throw ConfigError("Higher Criticism selectors need p >= 16");
  }
};

/// Aggregate over the trials of one (algorithm, n, theta) cell.
struct ResultRow {
  Algorithm algorithm = Algorithm::sum;
  std::size_t n = 0;
  double theta = 0.0;
  std::size_t trials = 0;
  double mean_loss = 0.0;
  double median_loss = 0.0;
  double tpr = 0.0;
  double fdr = 0.0;
  double hamming = 0.0;
  double selected_mean = 0.0;
};

/// Per-trial outcome of one algorithm.
struct TrialOutcome {
  double loss = 0.0;
  SupportMetrics support;
  std::size_t selected = 0;
};

inline TrialOutcome evaluate_trial(const DataMatrix& x, const SignalModel& model, Algorithm alg, double sigma,
                                   const AlgorithmOptions& opt) {
  const Estimate est = run_algorithm(x, alg, sigma, opt);
  TrialOutcome out;
  out.loss = l2_loss(model.u(), est.u_hat);
  out.support = support_metrics(model.support(), est.selection.selected, model.p());
  out.selected = est.selection.selected.size();
  return out;
}

/// Runs every (n, theta) cell for `trials` seeds. Each trial draws one data
/// matrix shared by all algorithms; its seed is derive_seed(seed, cell, trial)
/// with cell = n_index * |theta_grid| + theta_index. Rows come back sorted by
/// (algorithm name, n, theta).
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Vector u = make_u(cfg.p, cfg.u_spec);
  const unsigned threads = resolve_threads(cfg.threads);
  const std::size_t n_alg = cfg.algorithms.size();
  std::vector<ResultRow> rows;

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    const Vector v = make_v(cfg.v_profile, n);
    for (std::size_t ti = 0; ti < cfg.theta_grid.size(); ++ti) {
      const double theta = cfg.theta_grid[ti];
      const SignalModel model(theta, u, v, cfg.sigma, cfg.v_profile.kind != VProfile::Kind::custom || is_equisigned(v));
      const std::uint64_t cell = ni * cfg.theta_grid.size() + ti;
      std::vector<TrialOutcome> outcomes(cfg.trials * n_alg);
      parallel_for(cfg.trials, threads, [&](std::size_t t) {
        const DataMatrix x = generate_data(model, derive_seed(cfg.seed, cell, t));
        double sigma = cfg.sigma;
        if (cfg.sigma_mode == SigmaMode::estimated) {
          const SigmaEstimate est = estimate_sigma(x);
          if (est.degenerate) throw NumericalError("estimated noise level is zero");
          sigma = est.value;
        }
        for (std::size_t a = 0; a < n_alg; ++a)
          outcomes[t * n_alg + a] = evaluate_trial(x, model, cfg.algorithms[a], sigma, cfg.options);
      });
      for (std::size_t a = 0; a < n_alg; ++a) {
        ResultRow row;
        row.algorithm = cfg.algorithms[a];
        row.n = n;
        row.theta = theta;
        row.trials = cfg.trials;
        Vector losses(cfg.trials);
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          const TrialOutcome& o = outcomes[t * n_alg + a];
          losses[t] = o.loss;
          row.mean_loss += o.loss;
          row.tpr += o.support.tpr;
          row.fdr += o.support.fdr;
          row.hamming += static_cast<double>(o.support.hamming);
          row.selected_mean += static_cast<double>(o.selected);
        }
        const double dt = static_cast<double>(cfg.trials);
        row.mean_loss /= dt;
        row.tpr /= dt;
        row.fdr /= dt;
        row.hamming /= dt;
        row.selected_mean /= dt;
        row.median_loss = median_inplace(losses);
        rows.push_back(row);
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const std::string na = to_string(a.algorithm), nb = to_string(b.algorithm);
    if (na != nb) return na < nb;
    if (a.n != b.n) return a.n < b.n;
    return a.theta < b.theta;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Theory curves

struct TheoryConfig {
  std::size_t p = 1000;
  double sigma = 1.0;
  VProfile v_profile{VProfile::Kind::rise_fall, {}};
  std::vector<std::size_t> n_grid;
  std::vector<Algorithm> algorithms{kSepcaAlgorithms.begin(), kSepcaAlgorithms.end()};
  std::size_t sparsity = 1;               // drives beta for HC and the default k_hat
  std::optional<double> beta_sparsity;    // overrides the value derived from sparsity
  std::optional<std::size_t> k_hat;       // overrides sparsity for fdr
  double zeta = 1.02;
  double nu = std::exp(2.0);
};

struct TheoryRow {
  Algorithm algorithm = Algorithm::sum;
  std::size_t n = 0;
  double beta_crit = 0.0;
  bool o1_factor_dropped = false;  // boundary carries a (1 - o(1)) factor evaluated as 1
};

/// beta_crit over the n grid, v regenerated for each n. Rows ordered by
/// algorithm (as listed) then n.
inline std::vector<TheoryRow> theory_curves(const TheoryConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("theory: n grid is empty");
  std::vector<TheoryRow> rows;
  for (Algorithm alg : cfg.algorithms) {
    if (alg == Algorithm::svd_baseline) throw ConfigError("theory: svd-baseline has no detection boundary");
    for (std::size_t n : cfg.n_grid) {
      BoundarySpec spec;
      spec.algorithm = alg;
      spec.n = n;
      spec.p = cfg.p;
      spec.sigma = cfg.sigma;
      spec.v = make_v(cfg.v_profile, n);
      spec.beta_sparsity = cfg.beta_sparsity;
      spec.sparsity = cfg.sparsity;
      spec.k_hat = cfg.k_hat;
      spec.zeta = cfg.zeta;
      spec.nu = cfg.nu;
      rows.push_back({alg, n, beta_crit(spec), alg == Algorithm::fdr});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr const char* kResultCsvHeader =
    "algorithm,n,theta,trials,mean_loss,median_loss,tpr,fdr,hamming,selected_mean";

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << to_string(r.algorithm) << ',' << r.n << ',' << format_double(r.theta) << ',' << r.trials << ','
        << format_double(r.mean_loss) << ',' << format_double(r.median_loss) << ',' << format_double(r.tpr) << ','
        << format_double(r.fdr) << ',' << format_double(r.hamming) << ',' << format_double(r.selected_mean) << '\n';
  }
}

inline void write_results_jsonl(std::ostream& out, const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows) {
    out << "{\"algorithm\":\"" << to_string(r.algorithm) << "\",\"n\":" << r.n
        << ",\"theta\":" << format_double(r.theta) << ",\"trials\":" << r.trials
        << ",\"mean_loss\":" << format_double(r.mean_loss) << ",\"median_loss\":" << format_double(r.median_loss)
        << ",\"tpr\":" << format_double(r.tpr) << ",\"fdr\":" << format_double(r.fdr)
        << ",\"hamming\":" << format_double(r.hamming) << ",\"selected_mean\":" << format_double(r.selected_mean)
        << "}\n";
  }
}

inline void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows) {
  out << "algorithm,n,beta_crit,o1_factor_dropped\n";
  for (const TheoryRow& r : rows)
    out << to_string(r.algorithm) << ',' << r.n << ',' << format_double(r.beta_crit) << ','
        << (r.o1_factor_dropped ? 1 : 0) << '\n';
}

inline void write_theory_jsonl(std::ostream& out, const std::vector<TheoryRow>& rows) {
  for (const TheoryRow& r : rows)
    out << "{\"algorithm\":\"" << to_string(r.algorithm) << "\",\"n\":" << r.n
        << ",\"beta_crit\":" << format_double(r.beta_crit)
        << ",\"o1_factor_dropped\":" << (r.o1_factor_dropped ? "true" : "false") << "}\n";
}

}  // namespace sepca

#endif  // SEPCA_BENCH_HPP
