#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sepca/row_stats.hpp"

using namespace sepca;

namespace {
const Vector kOnes{1, 1, 1, 1};
const Vector kAlternating{1, -1, 1, -1};

// U(p) = sqrt(2) erfinv(1 - 1/p), inverted here by bisection of std::erfc.
double U_oracle(double p) {
  const double x = oracle::bisect_increasing([](double t) { return -std::erfc(t); }, -1.0 / p, 0.0, 30.0);
  return std::numbers::sqrt2 * x;
}
}  // namespace

TEST(RowStatistic, ZeroRow) {
  const Vector z(5, 0.0);
  for (auto k : {StatKind::sum, StatKind::ell1, StatKind::ell2}) EXPECT_EQ(row_statistic(k, z), 0.0);
}

TEST(RowStatistic, DirectFormula) {
  EXPECT_DOUBLE_EQ(row_statistic(StatKind::sum, kOnes), 2.0);
  EXPECT_DOUBLE_EQ(row_statistic(StatKind::ell1, kOnes), 2.0);
  EXPECT_DOUBLE_EQ(row_statistic(StatKind::ell2, kOnes), 4.0);
  EXPECT_DOUBLE_EQ(row_statistic(StatKind::sum, kAlternating), 0.0);
  EXPECT_DOUBLE_EQ(row_statistic(StatKind::ell1, kAlternating), 2.0);
}

TEST(RowStatistic, SingleColumnConsistency) {
  for (double x : {-3.0, -0.5, 0.0, 0.25, 7.0}) {
    const Vector r{x};
    EXPECT_DOUBLE_EQ(row_statistic(StatKind::ell2, r), std::pow(row_statistic(StatKind::sum, r), 2));
  }
}

TEST(RowStatistic, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(row_statistic(StatKind::sum, Vector{1.0, NAN}), std::invalid_argument);
  EXPECT_THROW(row_statistic(StatKind::ell2, Vector{INFINITY}), std::invalid_argument);
  EXPECT_THROW(row_statistic(StatKind::ell1, Vector{}), std::invalid_argument);
}

TEST(ThresholdConstants, Values) {
  const ThresholdConstants c = threshold_constants(1000);
  EXPECT_NEAR(c.K, std::numbers::e, 0);
  EXPECT_NEAR(c.C1, std::numbers::e * std::sqrt(1.0 - 2.0 / std::numbers::pi), 1e-15);
  EXPECT_NEAR(c.C2, std::numbers::sqrt2 * std::numbers::e, 1e-15);
  EXPECT_NEAR(c.U, U_oracle(1000), 1e-10);
  EXPECT_NEAR(c.delta, std::numbers::pi * std::numbers::pi / 12.0 / std::pow(std::log(1000.0), 1.5), 1e-15);
  EXPECT_NEAR(c.kappa_U, min_kappa_U(1000), 0);
  EXPECT_NEAR(c.C_U, std::numbers::sqrt2 + c.kappa_U / (3 * std::numbers::sqrt2), 1e-15);
  EXPECT_NEAR(c.C_U, 1.98436, 1e-5);
}

TEST(ThresholdConstants, KappaConfigurable) {
  EXPECT_THROW(threshold_constants(100, 0.5 * min_kappa_U(100)), std::invalid_argument);
  const ThresholdConstants c = threshold_constants(100, 3.0 * min_kappa_U(100));
  EXPECT_NEAR(c.kappa_U, 3.0 * min_kappa_U(100), 1e-15);
  EXPECT_GT(c.C_U, threshold_constants(100).C_U);
}

TEST(FwerThreshold, SumExactKnownValue) {
  const double p = 100, n = 400;
  const double U = U_oracle(p);
  const double a = std::sqrt(2.0 * std::log(p));
  const double b = (1.0 + std::log(p)) / 3.0 / U;
  const double c = std::sqrt(1.0 + std::log(p)) / U;
  const double d = std::numbers::pi * std::numbers::pi / 12.0 * std::pow(std::log(p), -1.5);
  // Each summand separately, then the total.
  EXPECT_NEAR(a, 3.034854, 1e-6);
  EXPECT_NEAR(U, 2.575829, 1e-6);
  EXPECT_NEAR(b, 0.725355, 1e-6);
  EXPECT_NEAR(c, 0.919131, 1e-6);
  EXPECT_NEAR(d, 0.083224, 1e-6);
  const double expect = (a + b + c + d) / std::sqrt(n);
  const double tau = fwer_threshold({StatKind::sum, 400, 100, 1.0});
  EXPECT_NEAR(tau, expect, 1e-12);
  EXPECT_NEAR(tau, 0.2381, 1e-4);
}

TEST(FwerThreshold, Ell1AndEll2Formulas) {
  const double p = 500, n = 900;
  const double lep = 1.0 + std::log(p);
  const double C1 = std::numbers::e * std::sqrt(1.0 - 2.0 / std::numbers::pi);
  const double C2 = std::numbers::sqrt2 * std::numbers::e;
  EXPECT_NEAR(fwer_threshold({StatKind::ell1, 900, 500, 2.0}), 2.0 * (std::sqrt(2.0 / std::numbers::pi) + C1 * lep / 30.0),
              1e-13);
  EXPECT_NEAR(fwer_threshold({StatKind::ell2, 900, 500, 2.0}), 4.0 * (1.0 + C2 * lep / std::sqrt(n)), 1e-13);
}

TEST(FwerThreshold, Ell2AlwaysAboveOne) {
  for (std::size_t p : {2u, 10u, 1000u, 1000000u})
    for (std::size_t n : {1u, 100u, 100000000u}) EXPECT_GT(fwer_threshold({StatKind::ell2, n, p, 1.0}), 1.0);
}

TEST(FwerThreshold, TableBoundFormula) {
  const ThresholdConstants c = threshold_constants(1000);
  EXPECT_NEAR(fwer_threshold({StatKind::sum, 250, 1000, 1.5, SumVariant::table_bound}),
              1.5 * c.C_U * std::sqrt(std::log(1000.0) / 250.0), 1e-14);
}

TEST(FwerThreshold, ExactVersusTableBoundGap) {
  // With minimal kappa_U the two expressions differ by a closed-form positive
  // amount: sqrt(n)(exact - table)/sigma = (1/U)(1/3 + sqrt(log ep) - sqrt(log p)) + delta_p.
  for (double p = 10; p <= 1e6; p *= 10) {
    for (std::size_t n : {100u, 10000u}) {
      const auto ip = static_cast<std::size_t>(p);
      const ThresholdConstants c = threshold_constants(ip);
      const double exact = fwer_threshold({StatKind::sum, n, ip, 1.0, SumVariant::exact});
      const double table = fwer_threshold({StatKind::sum, n, ip, 1.0, SumVariant::table_bound});
      const double gap =
          ((1.0 / 3.0 + std::sqrt(1.0 + std::log(p)) - std::sqrt(std::log(p))) / c.U + c.delta) / std::sqrt(double(n));
      EXPECT_NEAR(exact - table, gap, 1e-13) << "p=" << p << " n=" << n;
      EXPECT_GT(exact, table);
    }
  }
}

TEST(FwerThreshold, ExactSumDipsAtSmallP) {
  double prev = fwer_threshold({StatKind::sum, 100, 2, 1.0, SumVariant::exact});
  for (std::size_t p = 3; p <= 6; ++p) {
    const double t = fwer_threshold({StatKind::sum, 100, p, 1.0, SumVariant::exact});
    EXPECT_LT(t, prev) << p;
    prev = t;
  }
  for (std::size_t p = 7; p <= 5000; ++p) {
    const double t = fwer_threshold({StatKind::sum, 100, p, 1.0, SumVariant::exact});
    EXPECT_GT(t, prev) << p;
    prev = t;
  }
}

TEST(FwerThreshold, MonotoneInPSigmaAndN) {
  for (auto kind : {StatKind::sum, StatKind::ell1, StatKind::ell2}) {
    for (auto variant : {SumVariant::exact, SumVariant::table_bound}) {
      double prev = 0.0;
      // The exact sum threshold dips for p < 6, where 1/U(p) and delta_p blow up.
      const std::size_t p0 = kind == StatKind::sum && variant == SumVariant::exact ? 6 : 2;
      for (std::size_t p = p0; p < 2000000; p = p * 3 / 2 + 1) {
        const double t = fwer_threshold({kind, 100, p, 1.0, variant});
        EXPECT_GT(t, prev) << to_string(kind) << " p=" << p;
        prev = t;
      }
      prev = 0.0;
      for (double s = 0.1; s < 10; s *= 1.7) {
        const double t = fwer_threshold({kind, 100, 1000, s, variant});
        EXPECT_GT(t, prev);
        prev = t;
      }
      prev = INFINITY;
      for (std::size_t n = 1; n < 1000000; n *= 3) {
        const double t = fwer_threshold({kind, n, 1000, 1.0, variant});
        EXPECT_LT(t, prev);
        prev = t;
      }
    }
  }
}

TEST(FwerThreshold, Errors) {
  EXPECT_THROW(fwer_threshold({StatKind::sum, 10, 1, 1.0}), std::invalid_argument);
  EXPECT_THROW(fwer_threshold({StatKind::sum, 0, 10, 1.0}), std::invalid_argument);
  EXPECT_THROW(fwer_threshold({StatKind::ell2, 10, 10, 0.0}), std::invalid_argument);
  EXPECT_THROW(threshold_constants(1), std::invalid_argument);
}

TEST(FwerThreshold, NullMaximumRarelyExceedsThreshold) {
  // Scaled check of the calibration; the full-size run is in the acceptance suite.
  const std::size_t p = 200, n = 100, trials = 1000;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(double(n)));
  for (auto kind : {StatKind::sum, StatKind::ell1, StatKind::ell2}) {
    const double tau = fwer_threshold({kind, n, p, 1.0});
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      Vector v(p * n);
      for (double& x : v) x = g(rng);
      const Vector s = row_statistics(kind, DataMatrix(p, n, std::move(v)));
      if (*std::max_element(s.begin(), s.end()) >= tau) ++hits;
    }
    EXPECT_LE(hits, 5u) << to_string(kind);
  }
}
