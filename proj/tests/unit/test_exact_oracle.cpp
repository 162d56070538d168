#include <gtest/gtest.h>

#include "rwrs/error.hpp"
#include "rwrs/exact_oracle.hpp"

using namespace rwrs;

namespace {

mpq_class q(long n, unsigned long d) {
  mpq_class r(n, d);
  r.canonicalize();
  return r;
}

ModelConfig lazy_model() {
  return validate_model(LatticePmf::from_rationals({{-1, 1, 4}, {0, 1, 2}, {1, 1, 4}}),
                        LatticePmf::from_rationals({{1, 3, 4}, {-3, 1, 4}}));
}

}  // namespace

TEST(ExactPmf, RademacherSmallTimes) {
  const auto m = rademacher_model();
  const auto z1 = exact_Z_pmf(m, 1);
  EXPECT_EQ(z1.atoms.size(), 2u);
  EXPECT_EQ(z1.at(1), q(1, 2));
  EXPECT_EQ(z1.at(-1), q(1, 2));

  const auto z2 = exact_Z_pmf(m, 2);
  EXPECT_EQ(z2.at(0), q(1, 2));
  EXPECT_EQ(z2.at(2), q(1, 4));
  EXPECT_EQ(z2.at(-2), q(1, 4));

  const auto z3 = exact_Z_pmf(m, 3);
  EXPECT_EQ(z3.at(3), q(3, 16));
  EXPECT_EQ(z3.at(1), q(5, 16));
  EXPECT_EQ(z3.total(), 1);
}

TEST(ExactPmf, ZeroTime) {
  const auto z0 = exact_Z_pmf(rademacher_model(), 0);
  EXPECT_EQ(z0.at(0), 1);
}

TEST(ExactPmf, GroupedMatchesNaive) {
  for (const auto& model : {rademacher_model(), lazy_model()}) {
    for (std::int64_t k = 0; k <= 8; ++k) {
      const auto a = exact_Z_pmf(model, k);
      const auto b = exact_Z_pmf_naive(model, k);
      EXPECT_EQ(a.atoms, b.atoms) << "k=" << k;
    }
  }
}

TEST(ExactPmf, UptoMatchesSingle) {
  const auto model = lazy_model();
  const auto all = exact_Z_pmfs_upto(model, 7);
  ASSERT_EQ(all.size(), 8u);
  for (std::int64_t k = 0; k <= 7; ++k) EXPECT_EQ(all[k].atoms, exact_Z_pmf(model, k).atoms);
}

TEST(ExactPmf, MassOnlyOnCongruentLevels) {
  const auto model = lazy_model();
  for (std::int64_t k = 1; k <= 10; ++k) {
    const auto law = exact_Z_pmf(model, k);
    EXPECT_EQ(law.total(), 1);
    for (const auto& [v, p] : law.atoms) EXPECT_TRUE(model.congruent(k, v)) << k << " " << v;
  }
}

TEST(ExactJoint, RademacherPair) {
  const std::int64_t t[] = {1, 2}, v[] = {1, 0};
  EXPECT_EQ(exact_joint_prob(rademacher_model(), t, v), q(1, 4));
}

TEST(ExactJoint, MarginalisesToSingleLaw) {
  const auto model = rademacher_model();
  const auto z4 = exact_Z_pmf(model, 4);
  mpq_class sum = 0;
  for (std::int64_t a = -3; a <= 3; a += 2) {
    const std::int64_t t[] = {3, 4}, v[] = {a, 0};
    sum += exact_joint_prob(model, t, v);
  }
  EXPECT_EQ(sum, z4.at(0));
}

TEST(ACoefficient, DirectSum) {
  const auto model = rademacher_model();
  const Observable f = indicator_difference(0, 1);
  const auto law = exact_Z_pmf(model, 3);
  // Only a = 1 lies in alpha + 2Z for k = 1.
  double direct = 0;
  for (const auto& [b, fb] : f) direct += f.at(1) * fb * law.probability(b - 1);
  EXPECT_NEAR(A_coefficient(model, f, 1, law), direct, 1e-15);
  EXPECT_NEAR(A_coefficient(model, f, 1, 3), direct, 1e-15);
}

TEST(ExactPmf, Errors) {
  const auto model = rademacher_model();
  try {
    exact_Z_pmf(model, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CapExceeded);
  }
  const std::pair<std::int64_t, double> xi[] = {{-1, 0.5}, {1, 0.5}};
  const auto floating = validate_model(LatticePmf::from_rationals({{-1, 1, 2}, {1, 1, 2}}), LatticePmf::from_doubles(xi));
  try {
    exact_Z_pmf(floating, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonRationalModel);
  }
}

TEST(ExactPmf, Csv) {
  const auto csv = exact_pmf_csv(exact_Z_pmf(rademacher_model(), 2));
  EXPECT_NE(csv.find("-2,1,4"), std::string::npos);
  EXPECT_NE(csv.find("0,1,2"), std::string::npos);
}
