#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sepca/fdr.hpp"
#include "sepca/model.hpp"
#include "sepca/theory.hpp"

using namespace sepca;

namespace {

Vector uniform_pvalues(std::size_t p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(p);
  for (double& x : v) x = u(rng);
  return v;
}

// One column, so row sums are the entries themselves.
DataMatrix column(const Vector& y) { return DataMatrix(y.size(), 1, y); }

double pen_oracle(std::size_t k, std::size_t p, double zeta, double nu) {
  if (k == 0) return 0.0;
  const double a = 1.0 + std::sqrt(2.0 * std::log(nu * double(p) / double(k)));
  return zeta * double(k) * a * a;
}

}  // namespace

TEST(Pvalues, SumKind) {
  // Row sums 0 and 1.96 * sigma.
  const DataMatrix x = DataMatrix::from_rows({{0, 0, 0}, {1.96 * 2.0 / 3, 1.96 * 2.0 / 3, 1.96 * 2.0 / 3}});
  const Vector p = pvalues(x, StatKind::sum, 2.0);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_NEAR(p[1], std::erfc(1.96 / std::numbers::sqrt2), 1e-14);
  EXPECT_NEAR(p[1], 0.05, 1e-4);
}

TEST(Pvalues, Ell2Kind) {
  const DataMatrix x = DataMatrix::from_rows({{0, 0}, {1, 1}});
  const Vector p = pvalues(x, StatKind::ell2, 1.0);
  EXPECT_EQ(p[0], 1.0);
  // n T / sigma^2 = 2 * 2 = 4 with 2 degrees of freedom.
  EXPECT_NEAR(p[1], std::exp(-2.0), 1e-14);
  EXPECT_THROW(pvalues(x, StatKind::ell1, 1.0), std::invalid_argument);
  EXPECT_THROW(pvalues(x, StatKind::sum, 0.0), std::invalid_argument);
}

TEST(Pvalues, NullPvaluesAreUniform) {
  const std::size_t p = 4000, n = 30;
  const DataMatrix x = generate_data(SignalModel(0.0, make_u_leading(p, 1), make_v({}, n), 1.3), 77);
  for (auto kind : {StatKind::sum, StatKind::ell2}) {
    Vector pv = pvalues(x, kind, 1.3);
    std::sort(pv.begin(), pv.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < p; ++i) ks = std::max(ks, std::abs(pv[i] - (i + 0.5) / p));
    EXPECT_LT(ks, 1.63 / std::sqrt(double(p)));  // 1% Kolmogorov-Smirnov level
  }
}

TEST(HigherCriticism, PerfectUniformFitSelectsNothing) {
  const std::size_t p = 1000;
  Vector pv(p);
  for (std::size_t i = 0; i < p; ++i) pv[i] = double(i + 1) / double(p);
  const HCResult r = hc_select(pv);
  EXPECT_TRUE(r.selected.empty());
  for (std::size_t rank = 0; rank < p / 2; ++rank) EXPECT_EQ(r.hc_values[rank], 0.0);
  EXPECT_EQ(r.hc_max, 0.0);
}

TEST(HigherCriticism, SingleStrongSignal) {
  const std::size_t p = 10000;
  Vector pv(p);
  for (std::size_t i = 1; i < p; ++i) pv[i] = double(i) / double(p);
  pv[0] = 1e-12;
  std::mt19937_64 rng(1);
  std::shuffle(pv.begin(), pv.end(), rng);
  const std::size_t where = std::find(pv.begin(), pv.end(), 1e-12) - pv.begin();
  const HCResult r = hc_select(pv);
  EXPECT_EQ(r.selected, (IndexSet{where}));
  EXPECT_NEAR(r.hc_values[0], std::sqrt(double(p)) * (1.0 / p - 1e-12) / std::sqrt(1e-12 * (1 - 1e-12)), 1e-6);
  EXPECT_NEAR(r.threshold, std::sqrt(2.0 * std::log(std::log(double(p)))), 1e-15);
}

TEST(HigherCriticism, NullCalibrationScaled) {
  std::mt19937_64 rng(2024);
  const std::size_t p = 10000;
  Vector ratios;
  for (int t = 0; t < 50; ++t) {
    const HCResult r = hc_select(uniform_pvalues(p, rng));
    ratios.push_back(r.hc_max / r.threshold);
  }
  std::nth_element(ratios.begin(), ratios.begin() + 25, ratios.end());
  EXPECT_GE(ratios[25], 0.5);
  EXPECT_LE(ratios[25], 2.0);
}

TEST(HigherCriticism, DegenerateInputsGiveNoNaN) {
  for (double c : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    const HCResult r = hc_select(Vector(64, c));
    for (double h : r.hc_values) EXPECT_FALSE(std::isnan(h));
    EXPECT_FALSE(std::isnan(r.hc_max));
  }
  EXPECT_EQ(hc_select(Vector(64, 0.0)).selected.size(), 64u);
  EXPECT_TRUE(hc_select(Vector(64, 1.0)).selected.empty());
}

TEST(HigherCriticism, Errors) {
  EXPECT_THROW(hc_select(Vector(15, 0.5)), std::invalid_argument);
  Vector bad(20, 0.5);
  bad[3] = 1.5;
  EXPECT_THROW(hc_select(bad), std::invalid_argument);
  bad[3] = NAN;
  EXPECT_THROW(hc_select(bad), std::invalid_argument);
}

TEST(HigherCriticism, PermutationInvariance) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    Vector pv = uniform_pvalues(200, rng);
    for (int j = 0; j < 10; ++j) pv[j] = std::pow(pv[j], 6.0);  // a few small ones
    IndexSet perm(pv.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector shuffled(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) shuffled[i] = pv[perm[i]];
    for (auto rule : {HcRule::downward_closed, HcRule::literal}) {
      const IndexSet a = hc_select(pv, rule).selected;
      IndexSet b;
      for (std::size_t i : hc_select(shuffled, rule).selected) b.push_back(perm[i]);
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
    }
  }
}

TEST(HigherCriticism, DecreasingOnePvalueNeverShrinksSelection) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    Vector pv = uniform_pvalues(100, rng);
    for (int j = 0; j < 5; ++j) pv[rng() % 100] *= 1e-4;
    const IndexSet before = hc_select(pv).selected;
    const std::size_t j = rng() % 100;
    pv[j] *= unif(rng);
    const IndexSet after = hc_select(pv).selected;
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}

TEST(HigherCriticism, ClosureContainsLiteralAndIsDownwardClosed) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    Vector pv = uniform_pvalues(300, rng);
    for (int j = 0; j < 20; ++j) pv[rng() % 300] *= 1e-3;
    const HCResult closed = hc_select(pv, HcRule::downward_closed);
    const HCResult literal = hc_select(pv, HcRule::literal);
    EXPECT_TRUE(std::includes(closed.selected.begin(), closed.selected.end(), literal.selected.begin(),
                              literal.selected.end()));
    double max_sel = 0.0, min_unsel = 1.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (std::binary_search(closed.selected.begin(), closed.selected.end(), i)) max_sel = std::max(max_sel, pv[i]);
      else min_unsel = std::min(min_unsel, pv[i]);
    }
    if (!closed.selected.empty()) EXPECT_LE(max_sel, min_unsel);
  }
}

TEST(HigherCriticism, SelectHcOnData) {
  const std::size_t p = 500, n = 50;
  const DataMatrix x =
      generate_data(SignalModel(30.0, make_u_leading(p, 3), make_v({VProfile::Kind::uniform, {}}, n), 1.0), 9);
  const SelectionResult s = select_hc(x, StatKind::sum, 1.0);
  EXPECT_EQ(s.algorithm, Algorithm::hc_sum);
  for (std::size_t i : {0u, 1u, 2u}) EXPECT_TRUE(std::binary_search(s.selected.begin(), s.selected.end(), i));
  EXPECT_EQ(select_hc(x, StatKind::ell2, 1.0).algorithm, Algorithm::hc_ell2);
}

TEST(FdrPenalty, BasicValues) {
  const FdrPenalty pen(100);
  EXPECT_EQ(pen.pen(0), 0.0);
  const double a = 1.0 + std::sqrt(2.0 * std::log(std::exp(2.0) * 100.0));
  EXPECT_NEAR(pen.pen(1), 1.02 * a * a, 1e-12);
  EXPECT_NEAR(pen.t(1) * pen.t(1), pen.pen(1), 1e-12);
  for (std::size_t k = 0; k <= 100; ++k) EXPECT_NEAR(pen.pen(k), pen_oracle(k, 100, 1.02, std::exp(2.0)), 1e-10);
}

TEST(FdrPenalty, StrictlyIncreasing) {
  for (std::size_t p : {1u, 10u, 1000u}) {
    const FdrPenalty pen(p);
    for (std::size_t k = 1; k <= p; ++k) EXPECT_GT(pen.pen(k), pen.pen(k - 1));
  }
}

TEST(FdrPenalty, ThresholdSandwichedByLambda) {
  const FdrPenalty pen(100, 1.02, std::exp(2.0));
  const double b = 1.0;
  for (std::size_t k = 1; k <= 100; ++k) {
    const double lam = pen.lambda(k), t = pen.t(k);
    EXPECT_GE(lam - t, -1e-12) << k;
    EXPECT_LE(lam - t, 4.0 * 1.02 * b / lam) << k;
  }
}

TEST(FdrPenalty, FdrLevelAndErrors) {
  EXPECT_NEAR(FdrPenalty::for_fdr_level(10, 0.1).nu(), 1024.0, 1e-9);
  EXPECT_THROW(FdrPenalty(10, 1.0), std::invalid_argument);
  EXPECT_THROW(FdrPenalty(10, 1.02, 2.0), std::invalid_argument);
  EXPECT_THROW(FdrPenalty(10, 1.02, 10.0, 0.5), std::invalid_argument);
  EXPECT_THROW(FdrPenalty(10).pen(11), std::invalid_argument);
  EXPECT_THROW(FdrPenalty(10).t(0), std::invalid_argument);
  EXPECT_THROW(FdrPenalty::for_fdr_level(10, 1.5), std::invalid_argument);
}

TEST(FdrSelect, ZeroMatrix) {
  const FdrSelection r = fdr_select(DataMatrix(20, 5), 1.0, FdrPenalty(20));
  EXPECT_EQ(r.k_hat, 0u);
  EXPECT_TRUE(r.selection.selected.empty());
  EXPECT_TRUE(std::isinf(r.selection.threshold));
}

TEST(FdrSelect, OneHugeRowSum) {
  Vector y(50, 0.0);
  y[17] = 100.0;
  const FdrSelection r = fdr_select(column(y), 1.0, FdrPenalty(50));
  EXPECT_EQ(r.k_hat, 1u);
  EXPECT_EQ(r.selection.selected, (IndexSet{17}));
  EXPECT_EQ(oracle::brute_force_k_hat(y, 1.0, [](std::size_t k) { return pen_oracle(k, 50, 1.02, std::exp(2.0)); }),
            1u);
}

TEST(FdrSelect, MatchesBruteForceArgmin) {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> g;
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 1 + rng() % 64;
    const double sigma = 0.5 + (rng() % 100) / 50.0;
    Vector y(p);
    for (double& v : y) v = sigma * g(rng) + ((rng() % 4 == 0) ? 6.0 * sigma * g(rng) : 0.0);
    const FdrPenalty pen(p);
    const FdrSelection r = fdr_select(column(y), sigma, pen);
    EXPECT_EQ(r.k_hat, oracle::brute_force_k_hat(y, sigma, [&](std::size_t k) {
                return pen_oracle(k, p, 1.02, std::exp(2.0));
              }));
  }
}

TEST(FdrSelect, SelectionIsHardThresholdOfRowSums) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Vector y(40);
  for (double& v : y) v = g(rng);
  y[3] = 9.0;
  y[8] = -8.0;
  const FdrSelection r = fdr_select(column(y), 1.0, FdrPenalty(40));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool in = std::binary_search(r.selection.selected.begin(), r.selection.selected.end(), i);
    EXPECT_EQ(in, std::abs(y[i]) >= r.selection.threshold);
  }
  EXPECT_TRUE(std::binary_search(r.selection.selected.begin(), r.selection.selected.end(), 8u));
}

TEST(FdrSelect, TiesAreDeterministic) {
  const Vector y{5.0, -5.0, 5.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const FdrSelection a = fdr_select(column(y), 0.1, FdrPenalty(y.size()));
  const FdrSelection b = fdr_select(column(y), 0.1, FdrPenalty(y.size()));
  EXPECT_EQ(a.selection.selected, b.selection.selected);
  EXPECT_EQ(a.selection.selected, (IndexSet{0, 1, 2}));
}

TEST(FdrSelect, Errors) {
  EXPECT_THROW(fdr_select(DataMatrix(5, 2), 1.0, FdrPenalty(4)), std::invalid_argument);
  EXPECT_THROW(fdr_select(DataMatrix(5, 2), -1.0, FdrPenalty(5)), std::invalid_argument);
}

TEST(FdrSelect, ControlsFalseDiscoveriesScaled) {
  const std::size_t p = 500, s = 5;
  const double omega = 0.1;
  const FdrPenalty pen = FdrPenalty::for_fdr_level(p, omega);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const IndexSet truth{0, 1, 2, 3, 4};
  double fdp = 0.0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    Vector y(p);
    for (double& v : y) v = g(rng);
    for (std::size_t i = 0; i < s; ++i) y[i] += 5.0;
    const FdrSelection r = fdr_select(column(y), 1.0, pen);
    fdp += support_metrics(truth, r.selection.selected, p).fdr;
  }
  EXPECT_LE(fdp / trials, omega + 0.02);
}
