#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wvn/dense_sequence.hpp"

namespace wvn {
namespace {

using testing::fin;
using testing::fixture;
using testing::kNegInf;
using testing::kPosInf;
using testing::set_from_gaps;

TEST(DenseSequence, SinglePointRepeats) {
  auto m = set_from_gaps({{kNegInf, fin(5)}, {fin(5), kPosInf}});
  EXPECT_EQ(dense_sequence(m, 3), (std::vector<double>{5, 5, 5}));
}

TEST(DenseSequence, UnitIntervalStartsWithEndpointsThenMidpoint) {
  EXPECT_EQ(dense_sequence(fixture("unit-interval"), 3), (std::vector<double>{0, 1, 0.5}));
}

TEST(DenseSequence, NaturalsInIncreasingOrder) {
  EXPECT_EQ(dense_sequence(fixture("naturals"), 4), (std::vector<double>{0, 1, 2, 3}));
}

TEST(DenseSequence, IsPrefixStable) {
  for (const char* name : {"reals", "example-a", "example-b", "half-line", "quarter-holes", "table-holes"}) {
    const auto m = fixture(name);
    const auto longer = dense_sequence(m, 500);
    const auto shorter = dense_sequence(m, 137);
    ASSERT_EQ(longer.size(), 500U) << name;
    EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin())) << name;
  }
}

const std::vector<std::string> kFixtures = {"reals",        "naturals",      "example-a",       "example-b",
                                            "unit-interval", "half-line",     "quarter-holes",   "half-holes",
                                            "geometric-holes", "table-holes"};

TEST(DenseSequence, EveryPointLiesInM) {
  for (const auto& name : kFixtures) {
    const auto m = fixture(name);
    for (double mu : dense_sequence(m, 4000)) {
      ASSERT_TRUE(contains(m, mu)) << name << " mu=" << mu;
    }
  }
}

// Endpoints of the gaps closest to 0 are hit exactly; interior points of M
// near 0 are approached.
TEST(DenseSequence, ApproachesEndpointsAndInteriorPoints) {
  for (const auto& name : kFixtures) {
    const auto m = fixture(name);
    const auto mus = dense_sequence(m, 4000);
    auto nearest = [&](double p) {
      double best = INFINITY;
      for (double mu : mus) best = std::min(best, std::abs(mu - p));
      return best;
    };
    for (const auto& g : ordered_gaps(m, 3)) {
      for (const ExtReal& e : {g.lo, g.hi}) {
        if (e.is_finite() && std::abs(e.value) < 6) {
          EXPECT_EQ(nearest(e.value), 0.0) << name << " endpoint " << e.value;
        }
      }
    }
    for (double x = -4; x <= 4; x += 0.0625) {
      if (distance_to_set(m, x) == 0.0) {
        EXPECT_LT(nearest(x), 0.07) << name << " x=" << x;
      }
    }
  }
}

TEST(DenseSequence, ResolutionImprovesWithCount) {
  const auto m = fixture("unit-interval");
  auto mesh = [&](std::size_t count) {
    auto mus = dense_sequence(m, count);
    std::sort(mus.begin(), mus.end());
    double gap = 0;
    for (std::size_t i = 1; i < mus.size(); ++i) gap = std::max(gap, mus[i] - mus[i - 1]);
    return gap;
  };
  EXPECT_DOUBLE_EQ(mesh(3), 0.5);
  EXPECT_DOUBLE_EQ(mesh(5), 0.25);
  EXPECT_DOUBLE_EQ(mesh(9), 0.125);
  EXPECT_DOUBLE_EQ(mesh(1025), 1.0 / 1024);
}

TEST(Components, SortedByDistanceFromZero) {
  const auto comps = components(fixture("example-a"), 4);
  ASSERT_EQ(comps.size(), 3U);
  EXPECT_EQ(comps[0].lo.value, -1.0);
  EXPECT_EQ(comps[0].hi.value, 1.0);
  EXPECT_TRUE(comps[1].lo.is_neg_inf());
  EXPECT_TRUE(comps[2].hi.is_pos_inf());
}

}  // namespace
}  // namespace wvn
