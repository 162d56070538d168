#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "rwrs/stats.hpp"

using namespace rwrs;

TEST(PairwiseSum, MatchesExactIntegers) {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(PowerSums, MergeEqualsSequential) {
  PowerSums all, a, b;
  for (int i = 0; i < 50; ++i) {
    const double y = 0.1 * i - 2;
    all.add(y);
    (i < 20 ? a : b).add(y);
  }
  a.merge(b);
  EXPECT_EQ(a.count, all.count);
  for (int p = 0; p <= PowerSums::kMaxPower; ++p) EXPECT_NEAR(a.sums[p], all.sums[p], 1e-9 * (1 + std::abs(all.sums[p])));
}

TEST(MomentEstimate, KnownSample) {
  PowerSums s;
  for (double y : {1.0, 2.0, 3.0, 4.0}) s.add(y);
  const auto m1 = moment_estimate(s, 1);
  EXPECT_DOUBLE_EQ(m1.mean, 2.5);
  EXPECT_NEAR(m1.variance, 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(m1.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
  const auto m2 = moment_estimate(s, 2);
  EXPECT_DOUBLE_EQ(m2.mean, 7.5);
}

TEST(EstimateFromSamples, AgreesWithPowerSums) {
  std::vector<double> v{0.3, -1.2, 4.4, 2.0, 0.0, 1.1};
  PowerSums s;
  for (double y : v) s.add(y);
  const auto a = estimate_from_samples(v);
  const auto b = moment_estimate(s, 1);
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
  EXPECT_NEAR(a.std_error, b.std_error, 1e-12);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(MedianOfMeans, ResistsOutlierGroup) {
  std::vector<double> v(100, 1.0);
  v[0] = 1e6;
  EXPECT_NEAR(median_of_means(v, 10), 1.0, 1e-12);
}

TEST(KsTwoSample, Extremes) {
  EXPECT_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_two_sample({1, 2, 3}, {4, 5, 6}), 1.0);
  EXPECT_NEAR(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5, 1e-12);
}

TEST(LeastSquares, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 5, 7};
  const auto fit = least_squares(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, -1.0, 1e-12);
}
