#include "scenerylab/lattice.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace scenerylab;

TEST(SiteKey, PackingRoundTripAndOrder) {
  Site a;
  a.c = {1, -2, 3, 0, 0};
  EXPECT_EQ(unpack_site(pack_site(a)).c, a.c);

  // canonical order = numeric order of the little-endian packed integer:
  // the highest coordinate word is the most significant
  Site lo, hi;
  lo.c = {100, 0, 0, 0, 0};
  hi.c = {0, 1, 0, 0, 0};
  EXPECT_TRUE(key_less(pack_site(lo), pack_site(hi)));
  // negative coordinates compare as two's complement bit patterns
  Site neg;
  neg.c = {-1, 0, 0, 0, 0};
  EXPECT_TRUE(key_less(pack_site(lo), pack_site(neg)));
}

TEST(SiteCountMap, IncrementAndExtract) {
  SiteCountMap map(4);
  Site a, b;
  a.c = {0, 0, 0, 0, 0};
  b.c = {5, -7, 0, 0, 0};
  EXPECT_EQ(map.increment(pack_site(a)), 0u);
  EXPECT_EQ(map.increment(pack_site(a)), 1u);
  EXPECT_EQ(map.increment(pack_site(b)), 0u);
  EXPECT_EQ(map.count(pack_site(a)), 2u);
  EXPECT_EQ(map.count(pack_site(b)), 1u);
  Site missing;
  missing.c = {9, 9, 0, 0, 0};
  EXPECT_EQ(map.count(pack_site(missing)), 0u);

  auto entries = map.extract_sorted();
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_TRUE(key_less(entries[0].first, entries[1].first));
}

TEST(SiteCountMap, GrowsPastInitialCapacity) {
  SiteCountMap map(2);
  for (int i = 0; i < 5000; ++i) {
    Site s;
    s.c = {i, -i, 2 * i, 0, 0};
    map.increment(pack_site(s));
  }
  EXPECT_EQ(map.size(), 5000u);
  EXPECT_EQ(map.extract_sorted().size(), 5000u);
}

TEST(StepLaw, SimpleAndLazyInvariants) {
  for (int d = 2; d <= 5; ++d) {
    StepLaw simple = StepLaw::simple(d);
    EXPECT_EQ(simple.support().size(), std::size_t(2 * d));
    EXPECT_FALSE(simple.aperiodic());
    EXPECT_TRUE(simple.is_axis_law());
    EXPECT_TRUE(simple.rational());

    StepLaw lazy = StepLaw::lazy(d);
    EXPECT_TRUE(lazy.aperiodic());
    EXPECT_DOUBLE_EQ(lazy.hold_prob(), 0.5);
    // covariance I/(2d), det (2d)^-d, never hard-coded downstream
    for (int i = 0; i < d; ++i) {
      EXPECT_DOUBLE_EQ(lazy.covariance(i, i), 1.0 / (2.0 * d));
      for (int j = 0; j < d; ++j)
        if (i != j) EXPECT_DOUBLE_EQ(lazy.covariance(i, j), 0.0);
    }
    EXPECT_NEAR(lazy.det_covariance(), std::pow(2.0 * d, -d), 1e-15);
  }
  EXPECT_NEAR(StepLaw::lazy(2).det_covariance(), 1.0 / 16.0, 1e-18);
}

TEST(StepLaw, RejectsBadLaws) {
  // d = 1 is outside the model
  EXPECT_THROW(StepLaw::simple(1), std::invalid_argument);

  // asymmetric support
  std::vector<StepProb> asym;
  {
    StepProb sp;
    sp.step.c[0] = 1;
    sp.p = 0.75;
    asym.push_back(sp);
    StepProb sm;
    sm.step.c[0] = -1;
    sm.p = 0.25;
    asym.push_back(sm);
  }
  EXPECT_THROW(StepLaw(2, asym, "asym"), std::invalid_argument);

  // probabilities not summing to one
  std::vector<StepProb> bad;
  {
    StepProb sp;
    sp.step.c[0] = 1;
    sp.p = 0.4;
    bad.push_back(sp);
    StepProb sm;
    sm.step.c[0] = -1;
    sm.p = 0.4;
    bad.push_back(sm);
  }
  EXPECT_THROW(StepLaw(2, bad, "short"), std::invalid_argument);

  // degenerate covariance: all mass on one axis in d = 2
  std::vector<StepProb> degenerate;
  {
    StepProb sp;
    sp.step.c[0] = 1;
    sp.p = 0.5;
    degenerate.push_back(sp);
    StepProb sm;
    sm.step.c[0] = -1;
    sm.p = 0.5;
    degenerate.push_back(sm);
  }
  EXPECT_THROW(StepLaw(2, degenerate, "flat"), std::invalid_argument);

  // requesting the aperiodic contract on the periodic simple walk
  std::vector<StepProb> nn;
  for (int i = 0; i < 2; ++i)
    for (int sgn : {1, -1}) {
      StepProb sp;
      sp.step.c[i] = sgn;
      sp.p = 0.25;
      nn.push_back(sp);
    }
  EXPECT_THROW(StepLaw(2, nn, "nn", /*require_aperiodic=*/true),
               std::invalid_argument);
  EXPECT_NO_THROW(StepLaw(2, nn, "nn"));
}

TEST(StepLaw, HashDistinguishesLaws) {
  EXPECT_NE(StepLaw::simple(2).hash(), StepLaw::simple(3).hash());
  EXPECT_NE(StepLaw::simple(3).hash(), StepLaw::lazy(3).hash());
  EXPECT_EQ(StepLaw::lazy(4).hash(), StepLaw::lazy(4).hash());
}

TEST(StepLaw, DrawStepCoversSupportWithRightFrequencies) {
  StepLaw law = StepLaw::lazy(2);
  // thresholds are cumulative on the u64 scale; spot-check the boundaries
  std::uint64_t mid = law.thresholds()[0] - 1;
  Site hold = law.draw_step(mid);
  EXPECT_EQ(hold.c[0], 0);
  EXPECT_EQ(hold.c[1], 0);
  Site last = law.draw_step(~0ull);
  bool in_support = false;
  for (const auto& sp : law.support())
    in_support |= sp.step == last;
  EXPECT_TRUE(in_support);
}
