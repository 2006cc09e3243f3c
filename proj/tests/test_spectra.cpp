#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "test_support.hpp"
#include "wvn/spectra.hpp"

namespace wvn {
namespace {

using testing::fin;
using testing::fixture;
using testing::kNegInf;
using testing::kPosInf;
using testing::set_from_gaps;

TEST(Pairing, FormulaInstances) {
  EXPECT_EQ(pairing_encode(1, 1), 1U);
  EXPECT_EQ(pairing_encode(3, 2), 12U);
  EXPECT_EQ(pairing_decode(12), (PairingIndex{3, 2}));
  EXPECT_EQ(pairing_decode(1), (PairingIndex{1, 1}));
}

TEST(Pairing, ExhaustiveBijectionUpTo2To20) {
  constexpr Index kLimit = Index{1} << 20U;
  std::vector<bool> hit(kLimit + 1, false);
  for (std::uint64_t k = 1; k <= 21; ++k) {
    for (std::uint64_t m = 1;; ++m) {
      const Index n = pairing_encode(k, m);
      if (n > kLimit) break;
      ASSERT_FALSE(hit[n]) << n;
      hit[n] = true;
      ASSERT_EQ(pairing_decode(n), (PairingIndex{k, m}));
    }
  }
  for (Index n = 1; n <= kLimit; ++n) {
    ASSERT_TRUE(hit[n]) << n;
    const auto [k, m] = pairing_decode(n);
    ASSERT_EQ(pairing_encode(k, m), n);
  }
}

TEST(Pairing, InverseOnSubgridUpTo2To40) {
  constexpr Index kLimit = Index{1} << 40U;
  for (std::uint64_t k = 1; k <= 41; ++k) {
    const Index max_m = ((kLimit >> (k - 1)) + 1) / 2;
    for (Index m = 1; m <= max_m; m = m < 64 ? m + 1 : m * 3 + 1) {
      const Index n = pairing_encode(k, m);
      ASSERT_LE(n, kLimit);
      ASSERT_EQ(pairing_decode(n), (PairingIndex{k, m}));
    }
    ASSERT_EQ(pairing_decode(pairing_encode(k, max_m)), (PairingIndex{k, max_m}));
  }
  for (Index n = kLimit - 100000; n <= kLimit; ++n) {
    const auto [k, m] = pairing_decode(n);
    ASSERT_EQ(pairing_encode(k, m), n);
  }
}

TEST(Pairing, OverflowIsReported) {
  EXPECT_EQ(pairing_encode(64, 1), Index{1} << 63U);
  EXPECT_EQ(pairing_encode(1, Index{1} << 63U), std::numeric_limits<Index>::max());
  for (auto [k, m] : {std::pair<Index, Index>{65, 1}, {64, 2}, {2, (Index{1} << 62U) + 1}, {1, (Index{1} << 63U) + 1}}) {
    try {
      pairing_encode(k, m);
      FAIL() << k << "," << m;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::pairing_overflow);
    }
  }
  EXPECT_THROW(pairing_decode(0), Error);
}

TEST(Synth, UnitIntervalFollowsPairingGrid) {
  const auto op = synth_with_ess_spectrum(fixture("unit-interval"), {});
  // slots 1..6 decode to rows 1,2,1,3,1,2; mu = 0, 1, 1/2.
  EXPECT_EQ(op.truncation(6), (std::vector<double>{0, 1, 0, 0.5, 0, 1}));
}

TEST(Synth, SinglePointWithPowersOfTwo) {
  auto m = set_from_gaps({{kNegInf, fin(0)}, {fin(0), kPosInf}});
  std::vector<double> outliers;
  for (int k = 1; k <= 64; ++k) outliers.push_back(std::ldexp(1.0, k));
  const auto op = synth_with_ess_spectrum(m, outliers);
  for (Index n = 1; n <= 4096; ++n) {
    const auto [k, mm] = pairing_decode(n);
    EXPECT_EQ(op.eigenvalue(n), mm == 1 ? std::ldexp(1.0, static_cast<int>(k)) : 0.0) << n;
  }
}

TEST(Synth, RealsHaveZeroDefects) {
  const auto m = fixture("reals");
  const auto op = synth_with_ess_spectrum(m, {});
  const auto p = defect_sequence(op, m, 1000);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
}

TEST(Synth, RuleIsPureAndTruncationIsPrefix) {
  const auto m = fixture("example-b");
  const auto op = synth_with_ess_spectrum(m, defect_outliers(m, 0.5, 1));
  const auto t = op.truncation(300);
  for (Index n = 1; n <= 300; ++n) {
    EXPECT_EQ(op.eigenvalue(n), t[n - 1]);
    EXPECT_EQ(op.eigenvalue(n), op.eigenvalue(n));
  }
  const auto copy = op;
  EXPECT_EQ(copy.truncation(300), t);
}

TEST(Synth, OutlierInsideSetIsRejected) {
  try {
    synth_with_ess_spectrum(fixture("unit-interval"), {2.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::outlier_inside_set);
  }
  try {
    synth_with_ess_spectrum(fixture("unit-interval"), {2.0}, [](std::uint64_t k) { return k == 5 ? 1.0 : -1.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::outlier_inside_set);
  }
}

TEST(Synth, ColumnRuleFillsRowsAfterList) {
  const auto op = synth_with_ess_spectrum(fixture("unit-interval"), {5.0},
                                          [](std::uint64_t k) { return 10.0 + static_cast<double>(k); });
  EXPECT_EQ(op.eigenvalue(pairing_encode(1, 1)), 5.0);
  EXPECT_EQ(op.eigenvalue(pairing_encode(2, 1)), 12.0);
  EXPECT_EQ(op.eigenvalue(pairing_encode(7, 1)), 17.0);
}

TEST(DefectOutliers, DistanceMatchesDefect) {
  for (auto [name, scale] : {std::pair<const char*, double>{"unit-interval", 1.0}, {"example-a", 1.0}, {"example-b", 0.5}}) {
    const auto m = fixture(name);
    for (double power : {1.0, 2.0}) {
      const auto outs = defect_outliers(m, scale, power);
      for (std::size_t k = 1; k <= outs.size(); ++k) {
        // lo + d is rounded at the magnitude of lo.
        EXPECT_NEAR(distance_to_set(m, outs[k - 1]), scale / std::pow(static_cast<double>(k), power), 1e-15) << name;
      }
    }
  }
  try {
    defect_outliers(fixture("reals"), 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_host_gap);
  }
}

TEST(DefectSequence, NegativeOutliersOverHalfLine) {
  const auto m = fixture("half-line");
  std::vector<double> outs;
  for (int k = 1; k <= 64; ++k) outs.push_back(-k);
  const auto op = synth_with_ess_spectrum(m, outs);
  const auto p = defect_sequence(op, m, 4096);
  for (std::uint64_t k = 1; k <= 13; ++k) {
    EXPECT_EQ(p.values[pairing_encode(k, 1) - 1], static_cast<double>(k));
  }
  ASSERT_EQ(p.checkpoints.back(), 4096U);
  EXPECT_EQ(p.tail_sup.back(), 13.0);
  for (std::size_t i = 1; i < p.tail_sup.size(); ++i) EXPECT_GE(p.tail_sup[i], 12.0);
}

TEST(DefectSequence, CheckpointsAreDyadicPlusN) {
  const auto m = fixture("unit-interval");
  const auto p = defect_sequence(synth_with_ess_spectrum(m, {}), m, 100);
  EXPECT_EQ(p.checkpoints, (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 100}));
}

TEST(DefectSequence, DecayingDefectsGiveDecayingTailSup) {
  for (auto [name, scale] : {std::pair<const char*, double>{"unit-interval", 1.0}, {"example-b", 0.5}}) {
    const auto m = fixture(name);
    const auto op = synth_with_ess_spectrum(m, defect_outliers(m, scale, 1));
    const auto p = defect_sequence(op, m, 1 << 14);
    for (std::size_t i = 1; i < p.tail_sup.size(); ++i) EXPECT_LE(p.tail_sup[i], p.tail_sup[i - 1]);
    // The last outlier slot visible from index 2^13 on is row 15.
    EXPECT_DOUBLE_EQ(p.tail_sup.back(), scale / 15);
  }
}

TEST(DefectSequence, FixedDefectNeverDecays) {
  const auto m = fixture("quarter-holes");
  // Centers of the holes (k - 1/4, k + 1/4): defect 1/4 each.
  std::vector<double> outs;
  for (int k = 1; k <= 64; ++k) outs.push_back(k + 1);
  const auto p = defect_sequence(synth_with_ess_spectrum(m, outs), m, 4096);
  for (double s : p.tail_sup) EXPECT_GE(s, 0.25);
}

TEST(EssSpectrum, ClusterOfEqualValues) {
  const auto est = ess_spectrum_estimate(std::vector<double>(50, 0.0), 0.1, 3);
  ASSERT_EQ(est.size(), 1U);
  EXPECT_DOUBLE_EQ(est[0].lo, -0.1);
  EXPECT_DOUBLE_EQ(est[0].hi, 0.1);
}

TEST(EssSpectrum, IsolatedValuesGiveNothing) {
  std::vector<double> eigs;
  for (int i = 1; i <= 500; ++i) eigs.push_back(i);
  EXPECT_TRUE(ess_spectrum_estimate(eigs, 0.1, 2).empty());
}

TEST(EssSpectrum, RejectsBadParameters) {
  EXPECT_THROW(ess_spectrum_estimate({0, 0}, 0.0, 2), Error);
  EXPECT_THROW(ess_spectrum_estimate({0, 0}, 0.1, 1), Error);
}

TEST(EssSpectrum, UnitIntervalCoverIgnoresFinitelyManyOutliers) {
  const auto m = fixture("unit-interval");
  // Seven outliers packed within 0.06 of 2: one short of the threshold.
  const std::vector<double> outs{2.0, 2.01, 2.02, 2.03, 2.04, 2.05, 2.06, -1.5, 3.5};
  for (const auto& op : {synth_with_ess_spectrum(m, {}), synth_with_ess_spectrum(m, outs)}) {
    const auto est = ess_spectrum_estimate(op.truncation(4096), 0.05, 8);
    EXPECT_LE(hausdorff_in_window(est, m, -2, 3), 0.1);
    for (const auto& iv : est) {
      EXPECT_GE(iv.lo, -0.05);
      EXPECT_LE(iv.hi, 1.05);
    }
  }
}

// Outliers 1 + 1/k accumulate at 1, so at finite N they form a genuine
// cluster just outside [0,1]; it moves toward 1 as eps shrinks.
TEST(EssSpectrum, AccumulatingOutliersClusterNearTheirLimit) {
  const auto m = fixture("unit-interval");
  const auto op = synth_with_ess_spectrum(m, defect_outliers(m, 1.0, 1));
  const auto at = [&](std::size_t n, double eps) {
    return hausdorff_in_window(ess_spectrum_estimate(op.truncation(n), eps, 8), m, -2, 3);
  };
  EXPECT_DOUBLE_EQ(at(4096, 0.05), 0.175);
  EXPECT_DOUBLE_EQ(at(1 << 20, 0.05), 0.175);
  EXPECT_LT(at(1 << 20, 0.01), 0.06);
}

// Hausdorff distance to M on a fixed window shrinks as N grows and eps
// shrinks. Bounds are per window: the dyadic order reaches depth 1/8 on
// [-1,1] of the three-component set only after row 18.
TEST(EssSpectrum, ConvergesOnWindows) {
  struct Case {
    const char* name;
    double lo, hi, bound;
  };
  for (const auto& c : {Case{"unit-interval", -2, 3, 0.025}, Case{"example-a", -1, 1, 0.11},
                        Case{"naturals", -1, 3.5, 0.025}}) {
    const auto m = fixture(c.name);
    const auto op = synth_with_ess_spectrum(m, {});
    const double coarse = hausdorff_in_window(ess_spectrum_estimate(op.truncation(256), 0.1, 4), m, c.lo, c.hi);
    const double fine = hausdorff_in_window(ess_spectrum_estimate(op.truncation(1 << 20), 0.02, 4), m, c.lo, c.hi);
    EXPECT_LT(fine, coarse) << c.name;
    EXPECT_LE(fine, c.bound) << c.name;
  }
}

TEST(Hausdorff, IntervalUnions) {
  const std::vector<Interval> a{{0, 1}};
  const std::vector<Interval> b{{0, 0.4}, {0.6, 1}};
  EXPECT_DOUBLE_EQ(directed_hausdorff(b, a), 0.0);
  EXPECT_DOUBLE_EQ(directed_hausdorff(a, b), 0.1);
  EXPECT_DOUBLE_EQ(hausdorff(a, {{0, 0}, {1, 1}}), 0.5);
  EXPECT_EQ(hausdorff({}, {}), 0.0);
  EXPECT_TRUE(std::isinf(hausdorff(a, {})));
}

TEST(Hausdorff, WindowRestriction) {
  const auto w = restrict_to_window(fixture("naturals"), -1, 3.5);
  EXPECT_EQ(w, (std::vector<Interval>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
  const auto r = restrict_to_window(fixture("example-a"), -3, 4);
  EXPECT_EQ(r, (std::vector<Interval>{{-3, -2}, {-1, 1}, {3, 4}}));
}

}  // namespace
}  // namespace wvn
