#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwrs/brownian_lab.hpp"
#include "rwrs/error.hpp"
#include "rwrs/exact_oracle.hpp"
#include "rwrs/limit_suite.hpp"

using namespace rwrs;

TEST(DoubleFactorial, Values) {
  EXPECT_EQ(double_factorial_ratio(1), 1.0);
  EXPECT_EQ(double_factorial_ratio(2), 3.0);
  EXPECT_EQ(double_factorial_ratio(3), 15.0);
}

TEST(LocalLimit, AgreesWithExactLaw) {
  const auto model = rademacher_model();
  const std::int64_t n_list[] = {8, 12};
  const std::int64_t a_list[] = {0, 1, 2};
  LimitTargets t;
  t.l2_inverse = Estimate{1.0, 0.0, 0.01, 10};
  const auto table = local_limit_check(model, a_list, n_list, 200000, 4, t);
  ASSERT_EQ(table.rows.size(), 6u);
  for (auto n : n_list) {
    const auto law = exact_Z_pmf(model, n);
    for (auto a : a_list) {
      const auto* row = table.find(n, "n34_prob_at:" + std::to_string(a));
      ASSERT_NE(row, nullptr);
      const double exact = std::pow(double(n), 0.75) * law.probability(a);
      EXPECT_NEAR(row->value, exact, 5 * row->std_error + 1e-12);
      if (a == 1) {
        EXPECT_TRUE(row->congruence_zero);
        EXPECT_EQ(row->value, 0.0);
        EXPECT_EQ(row->target, 0.0);
      } else {
        EXPECT_NEAR(row->target, 2.0 / std::sqrt(2 * std::numbers::pi), 1e-12);
      }
    }
  }
}

TEST(TwoTime, AgreesWithExactJoint) {
  const auto model = rademacher_model();
  const std::int64_t n_list[] = {8};
  const auto table = two_time_local_limit(model, 0, 0, n_list, 200000, 2, std::nullopt);
  ASSERT_EQ(table.rows.size(), 1u);
  const std::int64_t times[] = {4, 8}, values[] = {0, 0};
  const double exact = std::pow(8.0, 1.5) * exact_joint_prob(model, times, values).get_d();
  EXPECT_NEAR(table.rows[0].value, exact, 5 * table.rows[0].std_error);
  EXPECT_EQ(table.rows[0].provenance, "missing");
}

TEST(FixedTimeDet, SingleTimeIsInverseNorm) {
  const double t[] = {1.0};
  const auto det = fixed_time_det_moment(t, 2048, 20000, 3);
  const auto l2 = l2_inverse_moment(2048, 20000, 4);
  EXPECT_NEAR(det.mean, l2.estimate.mean, 5 * std::hypot(det.std_error, l2.estimate.std_error));
  const double bad[] = {0.5, 0.5};
  EXPECT_THROW(fixed_time_det_moment(bad, 2048, 10, 3), Error);
}

TEST(Lln, TargetsScaleWithMassAndSigma) {
  const auto model = rademacher_model();
  LimitTargets t;
  t.local_time_moments = {Estimate{1.5, 0, 0.01, 1}, Estimate{3.0, 0, 0.02, 1}};
  const std::int64_t n_list[] = {64};
  const Observable f{{0, 1.0}, {1, 1.0}};
  const auto table = lln_experiment(model, f, n_list, 500, 3, 1, t);
  EXPECT_EQ(table.rows.size(), 3u);
  EXPECT_NEAR(table.find(64, "lln_m1")->target, 2 * 1.5, 1e-12);
  EXPECT_NEAR(table.find(64, "lln_m2")->target, 4 * 3.0, 1e-12);
  EXPECT_EQ(table.find(64, "lln_m3")->provenance, "missing");
  const auto centered = lln_experiment(model, indicator_difference(0, 1), n_list, 100, 1, 1, t);
  EXPECT_EQ(centered.rows[0].target, 0.0);
}

TEST(Lln, FirstMomentMatchesExactSum) {
  // E[sum_{k<n} f(Z_k)] from the oracle laws.
  const auto model = rademacher_model();
  const Observable f{{0, 1.0}};
  const std::int64_t n = 12;
  const auto laws = exact_Z_pmfs_upto(model, n);
  double expect = 0;
  for (std::int64_t k = 0; k < n; ++k) expect += laws[k].probability(0);
  expect *= std::pow(double(n), -0.25);
  const std::int64_t n_list[] = {n};
  const auto table = lln_experiment(model, f, n_list, 100000, 1, 9, {});
  EXPECT_NEAR(table.rows[0].value, expect, 5 * table.rows[0].std_error);
}

TEST(Clt, TargetsAndRejection) {
  const auto model = rademacher_model();
  const std::int64_t n_list[] = {32};
  LimitTargets t;
  t.local_time_moments = {Estimate{1.2, 0, 0, 1}, Estimate{2.0, 0, 0, 1}};
  t.sigma2_f = Estimate{1.5, 0, 0, 1};
  const auto table = clt_experiment(model, indicator_difference(0, 1), n_list, 400, 4, 1, t);
  EXPECT_EQ(table.find(32, "clt_m1")->target, 0.0);
  EXPECT_NEAR(table.find(32, "clt_m2")->target, 1.5 * 1.2, 1e-12);
  EXPECT_NEAR(table.find(32, "clt_m4")->target, 3 * 1.5 * 1.5 * 2.0, 1e-12);
  try {
    clt_experiment(model, Observable{{0, 1.0}}, n_list, 10, 2, 1, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ObservableNotCentered);
  }
}

TEST(Ratio, CheckpointsAndIntegral) {
  const auto model = rademacher_model();
  RatioObservable f{Observable{{0, 1.0}, {1, 1.0}}, std::nullopt};
  EXPECT_EQ(f.integral(model), 2.0);
  RatioObservable g{Observable{{0, 1.0}, {1, 1.0}}, 1};
  EXPECT_NEAR(g.integral(model), 1.0, 1e-15);
  EXPECT_EQ(g.name(), "ratio_xi1");
  const auto r = ratio_ergodic_experiment(model, f, 1024, 20, 1);
  EXPECT_EQ(r.checkpoints, (std::vector<std::int64_t>{16, 64, 256, 1024}));
  EXPECT_EQ(r.table.rows.size(), 4u);
  EXPECT_EQ(r.paths.size(), 20u);
}

TEST(Ratio, SelfRatioNearOne) {
  const auto model = rademacher_model();
  RatioObservable f{Observable{{0, 1.0}}, std::nullopt};
  const auto r = ratio_ergodic_experiment(model, f, 1 << 16, 40, 2);
  EXPECT_NEAR(r.table.rows.back().value, 1.0, 0.1);
}

TEST(Ratio, WorkerInvariant) {
  const auto model = rademacher_model();
  RatioObservable f{Observable{{0, 1.0}, {1, 1.0}}, std::nullopt};
  const auto a = ratio_ergodic_experiment(model, f, 4096, 12, 5, {1});
  const auto b = ratio_ergodic_experiment(model, f, 4096, 12, 5, {3});
  for (std::size_t i = 0; i < a.paths.size(); ++i)
    for (std::size_t c = 0; c < a.checkpoints.size(); ++c) {
      const double x = a.paths[i].ratios[c], y = b.paths[i].ratios[c];
      EXPECT_TRUE((std::isnan(x) && std::isnan(y)) || x == y);
    }
}

TEST(Functional, RowsAndRange) {
  const auto model = rademacher_model();
  const std::int64_t n_list[] = {64, 256};
  const auto table = functional_limit_check(model, n_list, 2000, 256, 1);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& row : table.rows) {
    EXPECT_GE(row.value, 0.0);
    EXPECT_LE(row.value, 1.0);
  }
  EXPECT_LT(table.rows[1].value, 0.2);
  EXPECT_EQ(scaled_endpoint_samples(model, 64, 300, 1).size(), 300u);
}

TEST(Convergence, Csv) {
  ConvergenceTable t{"x", {{4, "s", 1.0, 0.1, 10, 2.0, 0.2, "p", false}}};
  const auto csv = convergence_csv(t);
  EXPECT_EQ(csv.rfind("n,statistic,value,stderr,reps,target,target_stderr,provenance\n", 0), 0u);
  EXPECT_NE(csv.find("4,s,1,0.10000000000000001,10,2,"), std::string::npos);
  EXPECT_EQ(t.find(5, "s"), nullptr);
}
