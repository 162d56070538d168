#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "rwrs/error.hpp"
#include "rwrs/exact_oracle.hpp"
#include "rwrs/green_kubo.hpp"

using namespace rwrs;

namespace {

// Block k straight from the definition: double sum over a, b for every lag.
double block_by_definition(const ModelConfig& model, const Observable& f, std::int64_t k) {
  const std::int64_t d = model.periodicity.d;
  double total = 0;
  for (std::int64_t l = 0; l < d; ++l) {
    const auto law = exact_Z_pmf(model, std::llabs(l + d * k));
    for (const auto& [a, fa] : f)
      for (const auto& [b, fb] : f) total += fa * fb * law.probability(a - b);
  }
  return total;
}

GreenKuboOptions exact_only(std::int64_t horizon) {
  GreenKuboOptions o;
  o.exact_horizon = horizon;
  o.mc_horizon = 0;
  return o;
}

}  // namespace

TEST(GreenKubo, RademacherLowBlocks) {
  const auto model = rademacher_model();
  const auto f = indicator_difference(0, 1);
  EXPECT_DOUBLE_EQ(block_by_definition(model, f, 0), 1.0);
  EXPECT_DOUBLE_EQ(block_by_definition(model, f, -1), 0.0);
  EXPECT_DOUBLE_EQ(block_by_definition(model, f, 1), 0.375);

  const auto r = sigma2_f(model, f, exact_only(1));
  ASSERT_EQ(r.blocks.size(), 3u);
  EXPECT_EQ(r.blocks[0].k, 0);
  EXPECT_EQ(r.blocks[1].k, -1);
  EXPECT_EQ(r.blocks[2].k, 1);
  EXPECT_DOUBLE_EQ(r.blocks[0].value, 1.0);
  EXPECT_DOUBLE_EQ(r.blocks[1].value, 0.0);
  EXPECT_DOUBLE_EQ(r.blocks[2].value, 0.375);
  EXPECT_DOUBLE_EQ(r.sigma2, 1.375);
}

TEST(GreenKubo, ExactBlocksMatchDefinition) {
  const auto lazy = validate_model(LatticePmf::from_rationals({{-1, 1, 4}, {0, 1, 2}, {1, 1, 4}}),
                                   LatticePmf::from_rationals({{-1, 1, 3}, {0, 1, 3}, {1, 1, 3}}));
  const Observable f{{-1, 0.5}, {0, 1.0}, {2, -1.5}};
  for (const auto& model : {rademacher_model(), lazy}) {
    const std::int64_t kmax = model.periodicity.d == 2 ? 4 : 8;
    const auto laws = exact_Z_pmfs_upto(model, 9);
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
      if (std::llabs(k) * model.periodicity.d + model.periodicity.d - 1 > 9) continue;
      EXPECT_NEAR(block_term_exact(model, f, k, laws), block_by_definition(model, f, k), 1e-13) << "k=" << k;
    }
  }
}

TEST(GreenKubo, LagKernel) {
  const auto h = lag_kernel(indicator_difference(0, 1));
  EXPECT_DOUBLE_EQ(h.at(0), 2.0);
  EXPECT_DOUBLE_EQ(h.at(1), -1.0);
  EXPECT_DOUBLE_EQ(h.at(-1), -1.0);
  EXPECT_EQ(h.size(), 3u);
}

TEST(GreenKubo, BlockLags) {
  const auto model = rademacher_model();
  EXPECT_EQ(block_lags(model, 0), (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(block_lags(model, -1), (std::vector<std::int64_t>{2, 1}));
  EXPECT_EQ(block_lags(model, 3), (std::vector<std::int64_t>{6, 7}));
}

TEST(GreenKubo, ZeroObservable) {
  GreenKuboOptions o;
  o.exact_horizon = 3;
  o.mc_horizon = 6;
  o.mc_budget = 100;
  const auto r = sigma2_f(rademacher_model(), Observable{}, o);
  EXPECT_EQ(r.sigma2, 0.0);
  for (const auto& b : r.blocks) EXPECT_EQ(b.value, 0.0);
}

TEST(GreenKubo, RejectsUncenteredObservable) {
  try {
    sigma2_f(rademacher_model(), Observable{{0, 1.0}}, exact_only(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ObservableNotCentered);
  }
  auto o = exact_only(2);
  o.enforce_centered = false;
  const auto r = sigma2_f(rademacher_model(), Observable{{0, 1.0}}, o);
  EXPECT_FALSE(r.centered);
}

TEST(GreenKubo, SigmaZeroA) {
  const auto model = rademacher_model();
  const auto a = sigma2_0a(model, 1, exact_only(3));
  const auto b = sigma2_f(model, indicator_difference(0, 1), exact_only(3));
  EXPECT_EQ(a.sigma2, b.sigma2);
  EXPECT_THROW(sigma2_0a(model, 0, exact_only(3)), Error);
}

TEST(GreenKubo, MonteCarloBlockNearExact) {
  const auto model = rademacher_model();
  const auto f = indicator_difference(0, 1);
  GreenKuboOptions o;
  o.cap = 4;
  o.mc_budget = 100000;
  o.seed = 3;
  const auto mc = block_term(model, f, 3, o);
  EXPECT_EQ(mc.source, BlockSource::MonteCarlo);
  const double exact = block_by_definition(model, f, 3);
  EXPECT_NEAR(mc.value, exact, 5 * mc.std_error + 1e-12);
  o.cap = -1;
  const auto ex = block_term(model, f, 3, o);
  EXPECT_EQ(ex.source, BlockSource::Exact);
  EXPECT_NEAR(ex.value, exact, 1e-14);
}

TEST(GreenKubo, MixedSeriesAndCsv) {
  GreenKuboOptions o;
  o.exact_horizon = 4;
  o.mc_horizon = 20;
  o.mc_budget = 20000;
  o.workers = 2;
  const auto r = sigma2_f(rademacher_model(), indicator_difference(0, 1), o);
  EXPECT_EQ(r.blocks.size(), 41u);
  EXPECT_EQ(r.truncation_index, 20);
  EXPECT_GT(r.sigma2_std_error, 0.0);
  EXPECT_TRUE(std::isfinite(r.sigma2));
  const auto csv = green_kubo_csv(r);
  EXPECT_EQ(csv.rfind("k,value,source,stderr\n", 0), 0u);
  EXPECT_NE(csv.find(",mc,"), std::string::npos);
  EXPECT_NE(csv.find(",exact,"), std::string::npos);
}

TEST(GreenKubo, WorkerCountInvariant) {
  GreenKuboOptions a;
  a.exact_horizon = 2;
  a.mc_horizon = 10;
  a.mc_budget = 5000;
  a.workers = 1;
  auto b = a;
  b.workers = 3;
  const auto ra = sigma2_f(rademacher_model(), indicator_difference(0, 1), a);
  const auto rb = sigma2_f(rademacher_model(), indicator_difference(0, 1), b);
  EXPECT_EQ(ra.sigma2, rb.sigma2);
  EXPECT_EQ(ra.sigma2_std_error, rb.sigma2_std_error);
}
