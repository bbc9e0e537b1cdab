#include <gtest/gtest.h>

#include "gke/error.hpp"
#include "gke/oracle.hpp"
#include "support/fixtures.hpp"

namespace gke {
namespace {

using testing::U;

PrivatePair pp(const Group& g, long r, long x) { return {g.scalar(r), g.scalar(x)}; }

TEST(ExponentOracle, FixtureChainLogs) {
  const Group& g = testing::tiny();
  ExponentOracle o(g);
  EXPECT_FALSE(o.started());
  EXPECT_THROW(o.key(), Error);
  o.ika(Variant::kP1, U(1), {{U(1), pp(g, 2, 3)}, {U(2), pp(g, 5, 7)}, {U(3), pp(g, 8, 6)}}, pp(g, 9, 10));
  EXPECT_EQ(o.epoch(), 1u);
  EXPECT_TRUE(o.two_key());
  EXPECT_EQ(o.log_key(), g.scalar(26));
  EXPECT_EQ(o.key().value(), 3);
  EXPECT_EQ(o.R().value(), 16);
  EXPECT_EQ(o.S()->value(), 18);
  EXPECT_EQ(o.pairs().at(U(1)).r, g.scalar(9));

  o.rekey(U(2), pp(g, 4, 1), {});
  EXPECT_EQ(o.key().value(), 12);
  EXPECT_EQ(o.R().value(), 9);
  EXPECT_EQ(o.S()->value(), 4);

  o.join(U(3), pp(g, 5, 7), {{U(4), pp(g, 3, 2)}});
  EXPECT_EQ(o.epoch(), 3u);
  EXPECT_EQ(o.key().value(), 16);
  EXPECT_EQ(o.R().value(), 8);
  EXPECT_EQ(o.S()->value(), 12);
  EXPECT_EQ(o.pairs().size(), 4u);
}

TEST(ExponentOracle, DistributedChainHasNoS) {
  const Group& g = testing::tiny();
  ExponentOracle o(g);
  o.ika(Variant::kP2, U(1), {{U(1), pp(g, 2, 3)}, {U(2), pp(g, 5, 7)}, {U(3), pp(g, 8, 6)}}, pp(g, 9, 10));
  EXPECT_FALSE(o.two_key());
  EXPECT_FALSE(o.S().has_value());
  EXPECT_EQ(o.log_s_or_r(), o.log_r());
  EXPECT_EQ(o.key().value(), 3);
}

TEST(ExponentOracle, RecoveryOffsetVanishesOnlyForTheRightPair) {
  const Group& g = testing::tiny();
  ExponentOracle o(g);
  o.ika(Variant::kP1, U(1), {{U(1), pp(g, 2, 3)}, {U(2), pp(g, 5, 7)}, {U(3), pp(g, 8, 6)}}, pp(g, 9, 10));
  const PrivatePair u2 = pp(g, 5, 7);
  EXPECT_TRUE(o.recovery_offset(u2, u2).is_zero());
  // log S = 3, log R = 2: offset = 3 * dx + 2 * dr.
  EXPECT_EQ(o.recovery_offset(u2, pp(g, 6, 7)), g.scalar(2));
  EXPECT_EQ(o.recovery_offset(u2, pp(g, 5, 8)), g.scalar(3));
  EXPECT_TRUE(o.recovery_offset(u2, pp(g, 8, 5)).is_zero());  // 3 * -2 + 2 * 3
}

TEST(ExponentOracle, EvictionDropsPairs) {
  const Group& g = testing::tiny();
  ExponentOracle o(g);
  o.ika(Variant::kP1, U(1), {{U(1), pp(g, 2, 3)}, {U(2), pp(g, 5, 7)}, {U(3), pp(g, 8, 6)}}, pp(g, 9, 10));
  o.rekey(U(2), pp(g, 4, 1), {U(3)});
  EXPECT_FALSE(o.pairs().contains(U(3)));
  EXPECT_EQ(o.key().value(), 12);
}

}  // namespace
}  // namespace gke
