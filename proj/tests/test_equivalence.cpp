#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "test_support.hpp"
#include "wvn/counterexample.hpp"
#include "wvn/equivalence.hpp"

namespace wvn {
namespace {

using testing::fixture;

struct DecayPair {
  DiagonalOperator a;
  DiagonalOperator b;
};

DecayPair decay_pair(const ClosedSet& m, double scale, double pa, double pb) {
  return {synth_decaying_defects(m, scale, pa, "A"), synth_decaying_defects(m, scale, pb, "B")};
}

const EquivalenceCertificate& as_equivalence(const Certificate& c) {
  return std::get<EquivalenceCertificate>(c);
}

TEST(PerturbationEntries, IdentityIsZero) {
  const auto m = fixture("unit-interval");
  const auto a = synth_with_ess_spectrum(m, {});
  const auto match = bottleneck_match(a.truncation(64), a.truncation(64));
  for (double k : perturbation_entries(a, a, match)) EXPECT_EQ(k, 0.0);
}

TEST(PerturbationEntries, SmallExample) {
  const std::vector<double> xs{0, 1, 2};
  const std::vector<double> ys{0.1, 0.9, 2.2};
  const auto k = perturbation_entries(xs, ys, bottleneck_match(xs, ys));
  ASSERT_EQ(k.size(), 3U);
  EXPECT_NEAR(k[0], 0.1, 1e-15);
  EXPECT_NEAR(k[1], -0.1, 1e-15);
  EXPECT_NEAR(k[2], 0.2, 1e-15);
  EXPECT_THROW(perturbation_entries(xs, {1.0, 2.0}, bottleneck_match(xs, ys)), Error);
}

TEST(PerturbationEntries, OutlierSlotsOfCounterexampleMoveByQuarterD) {
  const auto pair = build_counterexample(fixture("half-holes"));
  const auto xs = pair.a.truncation(15);
  const auto ys = pair.b.truncation(15);
  const auto match = bottleneck_match(xs, ys);
  const auto k = perturbation_entries(xs, ys, match);
  for (std::size_t n = 0; n < 15; ++n) {
    EXPECT_EQ(std::abs(k[n]), match.deviations[n]);
    const bool y_outlier = pairing_decode(n + 1).m == 1;
    const bool x_outlier = pairing_decode(match.permutation[n] + 1).m == 1;
    if (y_outlier || x_outlier) {
      EXPECT_GE(std::abs(k[n]), 0.125);
    }
  }
}

TEST(Certify, DecayingDefectsGiveEquivalentEvidence) {
  struct Case {
    const char* name;
    double scale;
  };
  for (const auto& c : {Case{"reals", 1.0}, Case{"unit-interval", 1.0}, Case{"example-a", 1.0}, Case{"example-b", 0.5}}) {
    const auto m = fixture(c.name);
    const auto p = decay_pair(m, c.scale, 1, 2);
    const auto cert = certify_equivalence(p.a, p.b, m);
    const auto& e = as_equivalence(cert);
    EXPECT_EQ(e.verdict, Verdict::equivalent_evidence) << c.name;
    EXPECT_LT(e.perturbation_tail.back(), 0.05) << c.name;
    EXPECT_LT(e.perturbation_tail.back(), e.perturbation_tail.front() / 2) << c.name;
  }
}

TEST(Certify, IdenticalOperatorsAtAnyEpsilon) {
  for (const char* name : {"reals", "unit-interval", "example-b"}) {
    const auto m = fixture(name);
    const auto a = synth_with_ess_spectrum(m, {});
    CertifyConfig cfg;
    cfg.epsilon = 1e-300;
    const auto cert = certify_equivalence(a, a, m, cfg);
    const auto& e = as_equivalence(cert);
    EXPECT_EQ(e.verdict, Verdict::equivalent_evidence) << name;
    for (double t : e.perturbation_tail) EXPECT_EQ(t, 0.0);
  }
}

TEST(Certify, CounterexampleGivesObstruction) {
  const auto m = fixture("half-holes");
  const auto pair = build_counterexample(m);
  const auto cert = certify_equivalence(pair.a, pair.b, m);
  ASSERT_TRUE(std::holds_alternative<ObstructionCertificate>(cert));
  const auto& o = std::get<ObstructionCertificate>(cert);
  EXPECT_EQ(o.bound, 0.125);
  EXPECT_EQ(o.verdict, Verdict::obstructed);
  for (double b : o.bottlenecks) EXPECT_GE(b, o.bound - kBoundSlack);
}

TEST(Certify, DecayDecidesOverObstructedSets) {
  // d_M > 0: the decay test still applies, with a pair-specific warning.
  const auto m = fixture("half-holes");
  const auto a = synth_with_ess_spectrum(m, {});
  const auto cert = certify_equivalence(a, a, m);
  ASSERT_TRUE(std::holds_alternative<EquivalenceCertificate>(cert));
  EXPECT_EQ(verdict_of(cert), Verdict::equivalent_evidence);
  const auto& w = as_equivalence(cert).warnings;
  EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) { return s.find("specific to this pair") != s.npos; }));

  // Global bottleneck exactly d_M/4 = 1/4 (1.5 against 1.25) but a decaying tail.
  const auto u = fixture("unit-interval");
  const auto p = decay_pair(u, 1.0, 1, 2);
  const auto cu = certify_equivalence(p.a, p.b, u);
  EXPECT_EQ(verdict_of(cu), Verdict::equivalent_evidence);
  EXPECT_EQ(as_equivalence(cu).bottlenecks.front(), 0.25);

  // Outliers a constant 0.01 apart: no decay and no obstruction.
  const double stuck = defect_host_gap(m, 0.2).lo.value + 0.1;
  const auto sa = synth_with_ess_spectrum(m, std::vector<double>(64, stuck));
  const auto sb = synth_with_ess_spectrum(m, std::vector<double>(64, stuck + 0.01));
  const auto c = certify_equivalence(sa, sb, m);
  EXPECT_EQ(verdict_of(c), Verdict::inconclusive);
  EXPECT_NEAR(as_equivalence(c).perturbation_tail.back(), 0.01, 1e-12);
}

TEST(Certify, StoredMatchingsReproduceTails) {
  const auto m = fixture("example-b");
  const auto p = decay_pair(m, 0.5, 1, 2);
  const auto cert = certify_equivalence(p.a, p.b, m);
  const auto& e = as_equivalence(cert);
  for (std::size_t i = 0; i < e.checkpoints.size(); ++i) {
    const std::size_t n = e.checkpoints[i];
    const auto k = perturbation_entries(p.a, p.b, e.profile[i].matching);
    double tail = 0.0;
    for (std::size_t j = tail_start(n); j < n; ++j) tail = std::max(tail, std::abs(k[j]));
    EXPECT_EQ(tail, e.perturbation_tail[i]);
  }
  const auto cert2 = certify_equivalence(p.a, p.b, m);
  const auto& again = as_equivalence(cert2);
  EXPECT_EQ(again.perturbation_tail, e.perturbation_tail);
  EXPECT_EQ(again.hash_a, e.hash_a);
  EXPECT_EQ(again.hash_b, e.hash_b);
}

TEST(Certify, SwappingOperatorsKeepsBottlenecksAndVerdicts) {
  const auto m = fixture("unit-interval");
  const auto fast = decay_pair(m, 1.0, 2, 3);
  const auto ab = certify_equivalence(fast.a, fast.b, m);
  const auto ba = certify_equivalence(fast.b, fast.a, m);
  EXPECT_EQ(verdict_of(ab), Verdict::equivalent_evidence);
  EXPECT_EQ(verdict_of(ba), Verdict::equivalent_evidence);
  EXPECT_EQ(as_equivalence(ab).bottlenecks, as_equivalence(ba).bottlenecks);

  const auto slow = decay_pair(m, 1.0, 1, 2);
  EXPECT_EQ(as_equivalence(certify_equivalence(slow.a, slow.b, m)).bottlenecks,
            as_equivalence(certify_equivalence(slow.b, slow.a, m)).bottlenecks);

  const auto h = fixture("half-holes");
  const auto pair = build_counterexample(h);
  const auto o1 = certify_equivalence(pair.a, pair.b, h);
  const auto o2 = certify_equivalence(pair.b, pair.a, h);
  EXPECT_EQ(verdict_of(o1), Verdict::obstructed);
  EXPECT_EQ(verdict_of(o2), Verdict::obstructed);
  EXPECT_EQ(std::get<ObstructionCertificate>(o1).bottlenecks, std::get<ObstructionCertificate>(o2).bottlenecks);
}

TEST(Certify, DifferentEssentialSpectraAreNeverEquivalent) {
  const auto m = fixture("unit-interval");
  const auto a = synth_with_ess_spectrum(m, {});
  // Same eigenvalues except the dense part lives on [0, 2].
  const auto wide = testing::set_from_gaps({{testing::kNegInf, testing::fin(0)}, {testing::fin(2), testing::kPosInf}});
  const auto b = synth_with_ess_spectrum(wide, {});
  CertifyConfig cfg;
  cfg.epsilon = 10;
  for (const ClosedSet* set : {&m, &wide}) {
    const auto cert = certify_equivalence(a, b, *set, cfg);
    EXPECT_NE(verdict_of(cert), Verdict::equivalent_evidence);
    const auto& w = std::visit([](const auto& c) { return c.warnings; }, cert);
    EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) { return s.find("SpectrumMismatch") != s.npos; }));
  }
}

TEST(Certify, CsvExport) {
  const auto m = fixture("unit-interval");
  const auto a = synth_with_ess_spectrum(m, {});
  CertifyConfig cfg;
  cfg.checkpoints = {4, 8};
  const auto csv = certificate_csv(certify_equivalence(a, a, m, cfg));
  EXPECT_EQ(csv, "N,bottleneck,tail_bottleneck\n4,0,0\n8,0,0\n");
}

TEST(ContentHash, DependsOnEveryBit) {
  EXPECT_EQ(content_hash({}), "cbf29ce484222325");
  EXPECT_NE(content_hash({0.0}), content_hash({-0.0}));
  EXPECT_NE(content_hash({1.0, 2.0}), content_hash({2.0, 1.0}));
  EXPECT_EQ(content_hash({1.0, 2.0}).size(), 16U);
}

}  // namespace
}  // namespace wvn
