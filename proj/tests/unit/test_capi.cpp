#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rwrs/rwrs.h"

TEST(CApi, VersionAndNames) {
  EXPECT_STRNE(rwrs_version(), "");
  EXPECT_STREQ(rwrs_status_name(RWRS_OK), "Ok");
  EXPECT_STREQ(rwrs_status_name(RWRS_NOT_CENTERED), "NotCentered");
  EXPECT_STREQ(rwrs_status_name(RWRS_BUFFER_TOO_SMALL), "BufferTooSmall");
  EXPECT_EQ(rwrs_exit_code(RWRS_CONFIG_PARSE), 2);
  EXPECT_EQ(rwrs_exit_code(RWRS_UNKNOWN_EXPERIMENT), 3);
  EXPECT_EQ(rwrs_exit_code(RWRS_IO_FAILURE), 4);
  EXPECT_EQ(rwrs_exit_code(RWRS_EMPTY_DIRECTORY), 6);
  EXPECT_EQ(rwrs_exit_code(RWRS_ZERO_REPS), 5);
}

TEST(CApi, ModelLifecycle) {
  rwrs_model* m = nullptr;
  ASSERT_EQ(rwrs_model_create_rademacher(&m), RWRS_OK);
  int64_t d = 0, alpha = 0, alpha0 = 0;
  ASSERT_EQ(rwrs_model_periodicity(m, &d, &alpha, &alpha0), RWRS_OK);
  EXPECT_EQ(d, 2);
  EXPECT_EQ(alpha, 1);
  EXPECT_EQ(alpha0, 1);
  double s2 = 0;
  ASSERT_EQ(rwrs_model_sigma_xi_sq(m, &s2), RWRS_OK);
  EXPECT_EQ(s2, 1.0);
  rwrs_model_destroy(m);
  rwrs_model_destroy(nullptr);
}

TEST(CApi, ModelErrors) {
  const int64_t v[] = {0, 1}, num[] = {1, 1}, den[] = {2, 2};
  const int64_t sv[] = {-1, 1};
  rwrs_model* m = nullptr;
  EXPECT_EQ(rwrs_model_create(v, num, den, 2, sv, num, den, 2, &m), RWRS_NOT_CENTERED);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(rwrs_last_error()).find("NotCentered"), std::string::npos);
  EXPECT_EQ(rwrs_model_parse("(-1,1,2) (1,1,2)", "(-1,1,2", &m), RWRS_CONFIG_PARSE);
  EXPECT_EQ(rwrs_model_create_rademacher(nullptr), RWRS_INVALID_ARGUMENT);
  ASSERT_EQ(rwrs_model_parse("(-1,1,2) (1,1,2)", "(-3,1,4) (1,3,4)", &m), RWRS_OK);
  int64_t d = 0;
  rwrs_model_periodicity(m, &d, nullptr, nullptr);
  EXPECT_EQ(d, 4);
  rwrs_model_destroy(m);
}

TEST(CApi, ExactPmfBuffer) {
  rwrs_model* m = nullptr;
  ASSERT_EQ(rwrs_model_create_rademacher(&m), RWRS_OK);
  size_t count = 0;
  EXPECT_EQ(rwrs_exact_pmf(m, 2, -1, nullptr, nullptr, 0, &count), RWRS_BUFFER_TOO_SMALL);
  EXPECT_EQ(count, 3u);
  std::vector<int64_t> values(count);
  std::vector<double> probs(count);
  ASSERT_EQ(rwrs_exact_pmf(m, 2, -1, values.data(), probs.data(), count, &count), RWRS_OK);
  EXPECT_EQ(values, (std::vector<int64_t>{-2, 0, 2}));
  EXPECT_EQ(probs, (std::vector<double>{0.25, 0.5, 0.25}));
  EXPECT_EQ(rwrs_exact_pmf(m, 40, -1, values.data(), probs.data(), count, &count), RWRS_CAP_EXCEEDED);
  rwrs_model_destroy(m);
}

TEST(CApi, Estimators) {
  rwrs_model* m = nullptr;
  ASSERT_EQ(rwrs_model_create_rademacher(&m), RWRS_OK);
  double mean = 0, se = 0;
  ASSERT_EQ(rwrs_batch_estimate(m, 8, 50000, "indicator:0", nullptr, nullptr, 0, 1, 1, &mean, &se), RWRS_OK);
  EXPECT_NEAR(mean, 1759.0 / 8192.0, 5 * se);  // P(Z_8 = 0)
  EXPECT_EQ(rwrs_batch_estimate(m, 8, 10, "nonsense", nullptr, nullptr, 0, 1, 1, &mean, &se), RWRS_UNKNOWN_STATISTIC);

  const int64_t fs[] = {0, 1};
  const double fw[] = {1.0, -1.0};
  double sigma2 = 0, tail = 0;
  ASSERT_EQ(rwrs_sigma2_f(m, fs, fw, 2, 1, 0, 100, 1, 1, &sigma2, &tail), RWRS_OK);
  EXPECT_DOUBLE_EQ(sigma2, 1.375);
  const double gw[] = {1.0, 1.0};
  EXPECT_EQ(rwrs_sigma2_f(m, fs, gw, 2, 1, 0, 100, 1, 1, &sigma2, &tail), RWRS_OBSERVABLE_NOT_CENTERED);

  double c = 0;
  ASSERT_EQ(rwrs_simplex_closed_form(1, &c), RWRS_OK);
  EXPECT_EQ(c, 4.0);
  ASSERT_EQ(rwrs_l2_inverse_moment(2, 4, 1, 1, &mean, &se), RWRS_OK);
  EXPECT_NEAR(mean, std::pow(2.0, 0.25), 1e-12);
  EXPECT_EQ(rwrs_ks_local_time_moment(2, 1.0, 0, 10, 64, 1, 1, &mean, &se), RWRS_ZERO_REPS);
  ASSERT_EQ(rwrs_ks_local_time_moment(1, 1.0, 4, 100, 64, 1, 1, &mean, &se), RWRS_OK);
  EXPECT_GT(mean, 0.0);
  rwrs_model_destroy(m);
}

TEST(CApi, RunAndReport) {
  const std::string dir = testing::TempDir() + "rwrs_capi_run";
  const std::string out = "experiment.out=" + dir;
  const char* overrides[] = {out.c_str(), "params.k=3"};
  rwrs_result* r = nullptr;
  ASSERT_EQ(rwrs_run_text("[experiment]\nname = exact-dist\n", overrides, 2, &r), RWRS_OK);
  EXPECT_EQ(rwrs_result_exit_code(r), 0);
  EXPECT_NE(std::string(rwrs_result_text(r)).find("PASS exact_total_one"), std::string::npos);
  rwrs_result_destroy(r);

  ASSERT_EQ(rwrs_run_text("[experiment]\nname = bogus\n", overrides, 2, &r), RWRS_OK);
  EXPECT_EQ(rwrs_result_exit_code(r), 3);
  rwrs_result_destroy(r);

  ASSERT_EQ(rwrs_report(dir.c_str(), &r), RWRS_OK);
  EXPECT_EQ(rwrs_result_exit_code(r), 0);
  EXPECT_NE(std::string(rwrs_result_text(r)).find("OVERALL PASS"), std::string::npos);
  rwrs_result_destroy(r);

  EXPECT_EQ(rwrs_report("/nonexistent/capi", &r), RWRS_IO_FAILURE);
  EXPECT_EQ(rwrs_run_file(nullptr, nullptr, 0, &r), RWRS_INVALID_ARGUMENT);
}
