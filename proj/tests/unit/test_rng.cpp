#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rwrs/rng.hpp"

using namespace rwrs;

TEST(Philox, KnownAnswerZero) {
  const auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const std::uint32_t f = 0xffffffffu;
  const auto r = philox4x32_10({f, f, f, f}, {f, f});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto r = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdccebu);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(CounterRng, SameStreamSameNumbers) {
  const StreamId id{42, experiment_id("x"), 7};
  CounterRng a(id, Purpose::Steps), b(id, Purpose::Steps);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, PurposesAndReplicatesDiffer) {
  const StreamId id{42, experiment_id("x"), 7};
  CounterRng steps(id, Purpose::Steps), scenery(id, Purpose::Scenery), other(id.with_replicate(8), Purpose::Steps);
  const auto s = steps();
  EXPECT_NE(s, scenery());
  EXPECT_NE(s, other());
}

TEST(CounterRng, RandomAccessIgnoresPosition) {
  CounterRng rng({1, 2, 3}, Purpose::Scenery);
  const auto before = rng.at(1000);
  for (int i = 0; i < 57; ++i) rng();
  EXPECT_EQ(rng.at(1000), before);
  EXPECT_NE(rng.at(1000), rng.at(1001));
}

TEST(CounterRng, UniformInUnitInterval) {
  CounterRng rng({9, 9, 9}, Purpose::Aux);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(NormalAt, StandardMoments) {
  CounterRng rng({5, 6, 7}, Purpose::Scenery);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = normal_at(rng, static_cast<std::uint64_t>(i));
    s1 += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(ExperimentId, StableAndDistinct) {
  EXPECT_EQ(experiment_id("lln"), experiment_id("lln"));
  std::set<std::uint64_t> ids;
  for (const char* name : {"lln", "clt", "green_kubo", "l2_inverse", "vk_distance", "delta_endpoint"})
    ids.insert(experiment_id(name));
  EXPECT_EQ(ids.size(), 6u);
}

TEST(SplitMix, NotIdentity) {
  EXPECT_NE(splitmix64(0), 0u);
  EXPECT_NE(splitmix64(1), splitmix64(2));
}
