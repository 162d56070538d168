#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwrs/brownian_lab.hpp"
#include "rwrs/error.hpp"
#include "rwrs/moment_engine.hpp"

using namespace rwrs;

namespace {

// a_m by iterated Beta integrals, independent of the closed form.
double simplex_by_beta(int m) {
  double a = 1.0;
  for (int j = 0; j < m; ++j) a *= std::beta(0.25, j / 4.0 + 1.0);
  return a;
}

}  // namespace

TEST(Simplex, FirstOrderIsFour) { EXPECT_EQ(simplex_closed_form(1), 4.0); }

TEST(Simplex, ClosedFormAgainstBetaProducts) {
  for (int m = 1; m <= 40; ++m) {
    const double a = simplex_by_beta(m);
    EXPECT_NEAR(simplex_integral(m) / a, 1.0, 1e-12) << m;
    EXPECT_NEAR(simplex_closed_form(m) / (std::tgamma(m + 1.0) * a), 1.0, 1e-12) << m;
    EXPECT_NEAR(simplex_integral(m + 1) / simplex_integral(m), simplex_beta_step(m), 1e-12 * simplex_beta_step(m));
  }
  EXPECT_NEAR(simplex_closed_form(4), 4147.014, 5e-3);
  EXPECT_NEAR(std::tgamma(0.25), kGammaQuarter, 1e-14);
}

TEST(Simplex, MonteCarloOracles) {
  for (int m = 1; m <= 3; ++m) {
    const auto cube = simplex_mc_cube(m, 400000, 1);
    const auto dir = simplex_mc_dirichlet(m, 400000, 1);
    const double exact = simplex_closed_form(m);
    EXPECT_NEAR(cube.estimate, exact, 5 * cube.std_error) << m;
    EXPECT_NEAR(dir.estimate, exact, 5 * dir.std_error) << m;
  }
  EXPECT_THROW(simplex_mc_cube(0, 10, 1), Error);
  EXPECT_THROW(simplex_mc_dirichlet(2, 0, 1), Error);
}

TEST(KsMoment, FirstMomentMatchesL2Route) {
  const std::int64_t n = 4096;
  const auto mom = ks_local_time_moment(1, 1.0, 8, 20000, n, 5);
  const auto l2 = l2_inverse_moment(n, 20000, 6);
  const double other = 4.0 * l2.estimate.mean / std::sqrt(2 * std::numbers::pi);
  const double se = std::hypot(mom.std_error, 4.0 * l2.estimate.std_error / std::sqrt(2 * std::numbers::pi));
  EXPECT_NEAR(mom.value, other, 5 * se);
}

TEST(KsMoment, SigmaScaling) {
  const auto a = ks_local_time_moment(2, 1.0, 4, 500, 1024, 3);
  const auto b = ks_local_time_moment(2, 2.0, 4, 500, 1024, 3);
  EXPECT_NEAR(a.value / b.value, 4.0, 1e-9);
}

TEST(KsMoment, Errors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([] { ks_local_time_moment(2, 1.0, 0, 10, 100, 1); }), ErrorCode::ZeroReps);
  EXPECT_EQ(code([] { ks_local_time_moment(2, 1.0, 10, 0, 100, 1); }), ErrorCode::ZeroReps);
  EXPECT_EQ(code([] { ks_local_time_moment(2, 0.0, 10, 10, 100, 1); }), ErrorCode::ZeroVariance);
  EXPECT_THROW(ks_local_time_moment(5, 1.0, 10, 10, 3, 1), Error);
}

TEST(KsMoment, WorkerInvariant) {
  const auto a = ks_local_time_moment(3, 1.0, 4, 2100, 512, 8, {1});
  const auto b = ks_local_time_moment(3, 1.0, 4, 2100, 512, 8, {3});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Sandwich, Formula) {
  SandwichComponents c;
  c.l2_inverse = Estimate{2.0, 0.0, 0.1, 100};
  c.vk_inverse = {Estimate{3.0, 0.0, 0.0, 100}, Estimate{5.0, 0.0, 0.0, 100}};
  const double base = simplex_closed_form(3) * std::pow(2 * std::numbers::pi, -1.5);
  const auto s = moment_sandwich(3, 1.0, c);
  EXPECT_NEAR(s.lower, 8.0 * base, 1e-12 * s.lower);
  EXPECT_NEAR(s.upper, 30.0 * base, 1e-12 * s.upper);
  EXPECT_NEAR(s.lower_std_error, s.lower * 3 * 0.05, 1e-12 * s.lower);
  EXPECT_TRUE(s.upper_is_proxy);
}

TEST(Sandwich, MissingPieces) {
  SandwichComponents c;
  try {
    moment_sandwich(1, 1.0, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingComponents);
  }
  c.l2_inverse = Estimate{1.0, 0.0, 0.0, 1};
  EXPECT_NO_THROW(moment_sandwich(1, 1.0, c));
  try {
    moment_sandwich(3, 1.0, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingComponents);
  }
}

TEST(Carleman, ConstantValues) {
  const std::vector<double> ones(16, 1.0);
  const auto s = carleman_partial(ones, 0.01);
  ASSERT_EQ(s.partial.size(), 16u);
  EXPECT_DOUBLE_EQ(s.partial.back(), 16.0);
  EXPECT_NEAR(s.growth_exponent, 1.0, 1e-12);
  EXPECT_NEAR(s.companion[1], 1.0 + std::pow(2.0, -0.635), 1e-15);
}

TEST(Carleman, UpperBoundSeriesGrowsSublinearly) {
  std::vector<double> v;
  for (int m = 1; m <= 100; ++m) v.push_back(std::exp(log_moment_upper_bound(m, 2.0, 0.01)));
  const auto s = carleman_partial(v, 0.01);
  EXPECT_GT(s.growth_exponent, 0.2);
  EXPECT_LT(s.growth_exponent, 0.6);
  EXPECT_NEAR(log_moment_upper_bound(1, 2.0, 0.0), std::log(2.0) - std::lgamma(1.25), 1e-14);
}

TEST(GrowthRatio, PureTrend) {
  for (int m = 1; m <= 8; ++m) EXPECT_NEAR(growth_ratio(m, std::pow(3.0 * m, 0.75 * m)), std::pow(3.0, 0.75), 1e-9);
  EXPECT_THROW(growth_ratio(0, 1.0), Error);
}

TEST(MomentCsv, Header) {
  MomentEstimate e;
  e.m = 2;
  EXPECT_EQ(moment_csv(std::span(&e, 1)).rfind("m,closed_form,estimate,stderr,lower,upper\n", 0), 0u);
}
