#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "maxent/error_analysis.hpp"
#include "maxent/errors.hpp"
#include "maxent/solver.hpp"
#include "oracles.hpp"

using namespace maxent;

namespace {

StochasticMatrix two(double a, double b, double c, double d) {
  Eigen::Matrix2d w;
  w << a, b, c, d;
  return StochasticMatrix(w, StateSpace::binary());
}

StochasticMatrix eq_form(double a) { return two((1 + a) / 2, (1 - a) / 2, (1 - a) / 2, (1 + a) / 2); }

// Gain of one coefficient, written out from the normal model with erf.
double reference_gain(double w, double bias, double p_row, double n) {
  const double samp = std::sqrt(2.0 * w * (1.0 - w) / (std::numbers::pi * n * p_row));
  const double sigma = 1.0 / (2.0 * std::sqrt(n));
  const double me = sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-bias * bias / (2 * sigma * sigma)) +
                    bias * std::erf(bias / (sigma * std::numbers::sqrt2));
  return samp - me;
}

}  // namespace

TEST(FoldedNormal, HalfNormal) {
  const auto s = folded_normal_stats(0.0, 1.0);
  EXPECT_NEAR(s.mean, std::sqrt(2.0 / std::numbers::pi), 1e-15);
  EXPECT_NEAR(s.mean, 0.797885, 1e-6);
  EXPECT_NEAR(s.std, 0.602810, 1e-6);
}

TEST(FoldedNormal, FarFromFold) {
  const auto s = folded_normal_stats(10.0, 1.0);
  EXPECT_NEAR(s.mean, 10.0, 1e-6);
  EXPECT_NEAR(s.std, 1.0, 1e-6);
  const auto neg = folded_normal_stats(-10.0, 1.0);
  EXPECT_NEAR(neg.mean, 10.0, 1e-6);
}

TEST(FoldedNormal, RejectsNonPositiveVariance) {
  EXPECT_THROW(folded_normal_stats(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(folded_normal_stats(0.0, -1.0), InvalidArgument);
}

TEST(FoldedNormal, MatchesMonteCarloOnGrid) {
  std::uint64_t seed = 100;
  for (double mu : {-0.2, 0.0, 0.1, 0.5, 2.0}) {
    for (double sigma : {0.05, 0.1, 0.3, 1.0, 2.0}) {
      const auto mc = oracle::folded_normal_mc(mu, sigma, 100000, seed++);
      const auto s = folded_normal_stats(mu, sigma * sigma);
      EXPECT_NEAR(s.mean, mc.mean, 3.0 * mc.mean_se) << "mu=" << mu << " sigma=" << sigma;
      EXPECT_NEAR(s.std, mc.std, 3.0 * mc.std_se) << "mu=" << mu << " sigma=" << sigma;
    }
  }
}

TEST(FoldedNormal, SpecificPointAgainstMonteCarlo) {
  const auto mc = oracle::folded_normal_mc(0.1, 0.1, 100000, 77);
  const auto s = folded_normal_stats(0.1, 0.01);
  EXPECT_NEAR(s.mean, mc.mean, 3.0 * mc.mean_se);
  EXPECT_NEAR(s.std, mc.std, 3.0 * mc.std_se);
}

TEST(MaxEntErrorStats, UnbiasedOnClosedFormChains) {
  const auto e = maxent_error_stats(eq_form(0.2), 100);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(e(i, j).mean, 1.0 / std::sqrt(2.0 * std::numbers::pi * 100), 1e-12);
  EXPECT_NEAR(e(0, 0).mean, 0.039894, 1e-6);
}

TEST(MaxEntErrorStats, BiasFloor) {
  const auto w = two(0.9, 0.1, 0.8, 0.2);
  const double a = matrix_autocorrelation(stationary_distribution(w), w);
  const double bias = (1 + a) / 2 - 0.9;
  const auto e = maxent_error_stats(w, 10000000);
  EXPECT_NEAR(e(0, 0).mean, std::abs(bias), 1e-6);
  EXPECT_LT(e(0, 0).std, 1e-3);
}

TEST(SamplingErrorStats, Examples) {
  const auto e = sampling_error_stats(two(0.5, 0.5, 0.5, 0.5), 100);
  EXPECT_NEAR(e(0, 0).mean, std::sqrt(0.5 / (std::numbers::pi * 100 * 0.5)), 1e-15);
  EXPECT_NEAR(e(0, 0).mean, 0.056419, 1e-6);

  const auto det = sampling_error_stats(two(0.0, 1.0, 1.0, 0.0), 50);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(det(i, j).mean, 0.0);
      EXPECT_EQ(det(i, j).std, 0.0);
    }

  const auto w = two(0.7, 0.3, 0.4, 0.6);
  const auto small = sampling_error_stats(w, 30);
  const auto big = sampling_error_stats(w, 120);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(big(i, j).mean, small(i, j).mean / 2.0, 1e-15);
      EXPECT_NEAR(big(i, j).std, small(i, j).std / 2.0, 1e-15);
    }
}

TEST(ErrorStats, OnlyTwoSignStates) {
  EXPECT_THROW(maxent_error_stats(StochasticMatrix::uniform(StateSpace::ternary()), 10), UnsupportedCase);
  EXPECT_THROW(sampling_error_stats(StochasticMatrix::uniform(StateSpace({-2.0, 2.0})), 10), UnsupportedCase);
  EXPECT_THROW(maxent_error_stats(eq_form(0.1), 0), InvalidArgument);
}

TEST(AccuracyGain, ClosedFormChainsFavourMaxEnt) {
  // Unbiased MaxEnt wins while 1/(2 pi n) < (1 - A^2) / (pi n), i.e. |A| < 1/sqrt(2).
  for (double a : {-0.6, -0.2, 0.0, 0.2, 0.5, 0.7})
    for (std::size_t n : {1u, 10u, 100u, 10000u}) EXPECT_GT(accuracy_gain(eq_form(a), n)(0, 0), 0.0);
  EXPECT_LT(accuracy_gain(eq_form(0.8), 10)(0, 0), 0.0);
}

TEST(AccuracyGain, AsymmetricChainLosesAtLargeN) {
  EXPECT_LT(accuracy_gain(two(0.9, 0.1, 0.8, 0.2), 1000)(0, 0), 0.0);
  const auto w = two(0.7, 0.3, 0.4, 0.6);
  const double a = matrix_autocorrelation(stationary_distribution(w), w);
  const auto g = accuracy_gain(w, 100000000);
  EXPECT_NEAR(g(0, 0), -std::abs((1 + a) / 2 - 0.7), 1e-4);
  EXPECT_NEAR(g(1, 0), -std::abs((1 - a) / 2 - 0.4), 1e-4);
}

TEST(AccuracyGain, MatchesReferenceFormula) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const double wmm = u(rng), wpp = u(rng);
    const auto truth = two(wmm, 1 - wmm, 1 - wpp, wpp);
    const auto p = stationary_distribution(truth);
    const double a = matrix_autocorrelation(p, truth);
    for (std::size_t n : {3u, 40u, 400u}) {
      const auto g = accuracy_gain(truth, n);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          const double me = i == j ? (1 + a) / 2 : (1 - a) / 2;
          EXPECT_NEAR(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                      reference_gain(truth(i, j), me - truth(i, j), p[i], static_cast<double>(n)), 1e-12);
        }
    }
  }
}

TEST(CriticalSampleSize, ClosedFormChainReachesCap) {
  const auto nc = critical_sample_size(eq_form(0.2), 500);
  EXPECT_EQ(nc.per_coefficient, Eigen::MatrixXi::Constant(2, 2, 500));
  EXPECT_NEAR(nc.weighted, 500.0, 1e-12);
}

TEST(CriticalSampleSize, FarFromDiagonalIsSmall) {
  const auto nc = critical_sample_size(two(0.95, 0.05, 0.6, 0.4), 500);
  EXPECT_LT(nc.weighted, 10.0);
  const auto near = critical_sample_size(two(0.6, 0.4, 0.4, 0.6), 500);
  const auto far = critical_sample_size(two(0.9, 0.1, 0.8, 0.2), 500);
  EXPECT_GT(near.weighted, far.weighted);
}

TEST(CriticalSampleSize, MatchesReferenceScan) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const double wmm = u(rng), wpp = u(rng);
    const auto truth = two(wmm, 1 - wmm, 1 - wpp, wpp);
    const auto p = stationary_distribution(truth);
    const double a = matrix_autocorrelation(p, truth);
    const auto nc = critical_sample_size(truth, 300);
    double weighted = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double me = i == j ? (1 + a) / 2 : (1 - a) / 2;
        int last = 0;
        for (int n = 1; n <= 300; ++n)
          if (reference_gain(truth(i, j), me - truth(i, j), p[i], n) >= 0.0) last = n;
        EXPECT_EQ(nc.per_coefficient(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), last);
        weighted += p[i] * last / 2.0;
      }
    }
    EXPECT_NEAR(nc.weighted, weighted, 1e-9);
  }
}

TEST(EmpiricalGain, AgreesWithAnalyticModelOnTwoStates) {
  const auto truth = two(0.7, 0.3, 0.4, 0.6);
  MaxEntCache cache(StateSpace::binary());
  const auto curves = empirical_gain(truth, 100, 4000, 9, cache);
  ASSERT_EQ(curves.sizes.front(), 2u);
  ASSERT_EQ(curves.sizes.back(), 100u);
  // Compare at n = 50 and n = 100, where the normal model is reasonable.
  for (std::size_t n : {50u, 100u}) {
    const auto& g = curves.gain[n - 2];
    const auto ref = accuracy_gain(truth, n);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(g(i, j), ref(i, j), 0.01) << "n=" << n;
  }
}

TEST(EmpiricalGain, ReproducibleAndCacheIndependent) {
  Eigen::Matrix3d w;
  w << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5;
  const StochasticMatrix truth(w, StateSpace::ternary());
  MaxEntCache warm(StateSpace::ternary());
  empirical_critical_sample_size(truth, 60, 20, 1, warm);
  const auto a = empirical_critical_sample_size(truth, 60, 30, 5, warm);
  MaxEntCache cold(StateSpace::ternary());
  const auto b = empirical_critical_sample_size(truth, 60, 30, 5, cold);
  EXPECT_EQ(a.per_coefficient, b.per_coefficient);
  EXPECT_EQ(a.weighted, b.weighted);
  EXPECT_GE(a.per_coefficient.minCoeff(), 0);
  EXPECT_LE(a.per_coefficient.maxCoeff(), 60);
}

TEST(NcMap, GridIsOpenAndSymmetric) {
  const auto map = nc_map(10, 200);
  ASSERT_EQ(map.size(), 100u);
  EXPECT_DOUBLE_EQ(map.front().w_minus_minus, 0.05);
  EXPECT_DOUBLE_EQ(map.back().w_plus_plus, 0.95);
  // Relabelling the states swaps W-- and W++ and leaves n_c unchanged.
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      EXPECT_NEAR(map[i * 10 + j].weighted_nc, map[j * 10 + i].weighted_nc, 1e-9);
}

TEST(NcMap, WorkerCountDoesNotChangeResult) {
  const auto a = nc_map(16, 200, 1);
  const auto b = nc_map(16, 200, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].weighted_nc, b[i].weighted_nc);
}

TEST(MuCurve, TwoStateCurveIsNonIncreasing) {
  MuCurveConfig cfg;
  cfg.grid = 40;
  const auto curves = mu_curve(cfg);
  ASSERT_EQ(curves.size(), 1u);
  const auto& mu = curves[0].fractions;
  for (std::size_t i = 1; i < mu.size(); ++i) EXPECT_LE(mu[i], mu[i - 1]);
  EXPECT_GE(mu.front(), mu[6]);
  EXPECT_EQ(curves[0].population, 1600u);
}

TEST(MuCurve, TwoStateValueAtFifty) {
  MuCurveConfig cfg;
  cfg.sizes = {50};
  const auto mu = mu_curve(cfg)[0].fractions[0];
  EXPECT_NEAR(mu, 0.15, 0.05);
}

TEST(MuCurve, FractionsCountAtOrAbove) {
  const auto c = mu_fractions({1.0, 5.0, 5.0, 10.0}, {1, 5, 6, 11});
  EXPECT_EQ(c.fractions, (std::vector<double>{1.0, 0.75, 0.25, 0.0}));
}

TEST(MuCurve, StrataAreNestedByEntropyRate) {
  std::vector<PopulationMember> pop;
  for (int i = 0; i < 10; ++i)
    pop.push_back({StochasticMatrix::uniform(StateSpace::ternary()), static_cast<double>(i), static_cast<double>(i)});
  const auto upper = mu_curves_from_population(pop, {5}, true, StratumMode::upper);
  ASSERT_EQ(upper.size(), 6u);
  EXPECT_FALSE(upper[0].stratum.has_value());
  const std::vector<std::size_t> upper_sizes{10, 8, 6, 4, 2};
  const std::vector<double> upper_mu{0.5, 5.0 / 8, 5.0 / 6, 1.0, 1.0};
  for (std::size_t q = 1; q <= 5; ++q) {
    EXPECT_EQ(*upper[q].stratum, q);
    EXPECT_EQ(upper[q].population, upper_sizes[q - 1]);
    EXPECT_DOUBLE_EQ(upper[q].fractions[0], upper_mu[q - 1]);
  }
  const auto lower = mu_curves_from_population(pop, {5}, true, StratumMode::lower);
  EXPECT_EQ(lower[1].population, 2u);
  EXPECT_EQ(lower[5].population, 10u);
  EXPECT_DOUBLE_EQ(lower[1].fractions[0], 0.0);
}

TEST(MuCurve, TernaryPopulationIsWorkerIndependent) {
  const auto a = ternary_population(6, 40, 10, 3, 1);
  const auto b = ternary_population(6, 40, 10, 3, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].matrix.entries(), b[i].matrix.entries());
    EXPECT_EQ(a[i].weighted_nc, b[i].weighted_nc);
    EXPECT_GT(a[i].entropy_rate, 0.0);
    EXPECT_LE(a[i].entropy_rate, std::log(3.0) + 1e-12);
  }
}

TEST(MuCurve, UnsupportedSizes) {
  MuCurveConfig cfg;
  cfg.k = 4;
  EXPECT_THROW(mu_curve(cfg), UnsupportedCase);
}
