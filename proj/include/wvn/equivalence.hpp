#pragma once

// Compact-perturbation evidence on truncations: the diagonal K = B - u A u*
// for the permutation unitary of a matching, and the decay / obstruction
// verdicts built from it.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "wvn/closed_set.hpp"
#include "wvn/hole_defect.hpp"
#include "wvn/matching.hpp"
#include "wvn/spectra.hpp"

namespace wvn {

// Entry n is y_n - x_perm[n]; its modulus is the matching deviation.
inline std::vector<double> perturbation_entries(const std::vector<double>& xs, const std::vector<double>& ys,
                                                const MatchingResult& m) {
  check_lengths(xs.size(), ys.size());
  check_lengths(m.permutation.size(), ys.size());
  std::vector<double> k(ys.size());
  for (std::size_t n = 0; n < ys.size(); ++n) k[n] = ys[n] - xs[m.permutation[n]];
  return k;
}

inline std::vector<double> perturbation_entries(const DiagonalOperator& a, const DiagonalOperator& b,
                                                const MatchingResult& m) {
  return perturbation_entries(a.truncation(m.permutation.size()), b.truncation(m.permutation.size()), m);
}

// FNV-1a over the IEEE bit patterns, as 16 hex digits.
inline std::string content_hash(const std::vector<double>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto b = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (b >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

enum class Verdict : std::uint8_t { equivalent_evidence, inconclusive, obstructed };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent_evidence: return "equivalent-evidence";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::obstructed: return "obstructed";
  }
  return "inconclusive";
}

struct CertifyConfig {
  std::vector<std::size_t> checkpoints{256, 1024, 4096};
  double epsilon = 0.05;
  // The tail must shrink by at least this factor from first to last checkpoint.
  double decay_factor = 2.0;
  // Essential-spectrum sanity check.
  double spectrum_eps = 0.05;
  std::size_t spectrum_threshold = 8;
  double spectrum_tolerance = 0.25;
};

// Slack on the d_M / 4 comparison for rounding of the truncated eigenvalues.
inline constexpr double kBoundSlack = 1e-12;

struct EquivalenceCertificate {
  std::string set_name;
  double d_m = 0.0;
  std::vector<std::size_t> checkpoints;
  std::vector<double> bottlenecks;
  // Tail sup of |K| entries (y-indices > N/2) per checkpoint.
  std::vector<double> perturbation_tail;
  std::vector<TailProfileEntry> profile;
  Verdict verdict = Verdict::inconclusive;
  double epsilon = 0.05;
  double decay_factor = 2.0;
  std::string hash_a;
  std::string hash_b;
  std::vector<std::string> warnings;
};

struct ObstructionCertificate {
  std::string set_name;
  double d_m = 0.0;
  double bound = 0.0;  // d_M / 4
  std::vector<std::size_t> checkpoints;
  std::vector<double> bottlenecks;
  std::vector<MatchMethod> methods;
  Verdict verdict = Verdict::obstructed;
  std::string hash_a;
  std::string hash_b;
  std::vector<std::string> warnings;
};

using Certificate = std::variant<EquivalenceCertificate, ObstructionCertificate>;

inline Verdict verdict_of(const Certificate& c) {
  return std::visit([](const auto& x) { return x.verdict; }, c);
}

// Optimal bottleneck with the exact matcher up to its size limit and sorted
// pairing beyond it.
inline MatchingResult optimal_match(const std::vector<double>& xs, const std::vector<double>& ys) {
  return xs.size() <= kExactMatcherLimit ? bottleneck_match(xs, ys) : sorted_match(xs, ys);
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

inline std::vector<Interval> hull_window(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* s : {&a, &b}) {
    for (const auto& iv : *s) {
      lo = std::min(lo, iv.lo);
      hi = std::max(hi, iv.hi);
    }
  }
  if (lo > hi) return {};
  return {{lo, hi}};
}

// Warnings for estimates that accumulate away from M at the coarsest
// checkpoint. Coverage of M is not required there: a truncation of size N
// holds only mu_1 .. mu_{log2 N + 1}.
inline void check_against_set(const std::vector<double>& xs, const std::vector<double>& ys, const ClosedSet& m,
                              const CertifyConfig& cfg, std::vector<std::string>& warnings) {
  const auto ea = ess_spectrum_estimate(xs, cfg.spectrum_eps, cfg.spectrum_threshold);
  const auto eb = ess_spectrum_estimate(ys, cfg.spectrum_eps, cfg.spectrum_threshold);
  const auto window = hull_window(ea, eb);
  if (window.empty()) {
    warnings.push_back("SpectrumMismatch: no accumulation detected at N=" + std::to_string(xs.size()));
    return;
  }
  const double pad = cfg.spectrum_tolerance + 1.0;
  const auto near = restrict_to_window(m, window[0].lo - pad, window[0].hi + pad);
  for (const auto& [name, est] : {std::pair<const char*, const std::vector<Interval>*>{"A", &ea}, {"B", &eb}}) {
    const double h = directed_hausdorff(*est, near);
    if (h > cfg.spectrum_tolerance) {
      warnings.push_back(std::string("SpectrumMismatch: essential-spectrum estimate of ") + name + " at N=" +
                         std::to_string(xs.size()) + " reaches " + fmt(h) + " away from M");
    }
  }
}

// Hausdorff distance between the two estimates at the largest checkpoint.
inline double estimate_disagreement(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const CertifyConfig& cfg) {
  return hausdorff(ess_spectrum_estimate(xs, cfg.spectrum_eps, cfg.spectrum_threshold),
                   ess_spectrum_estimate(ys, cfg.spectrum_eps, cfg.spectrum_threshold));
}

}  // namespace detail

// Tail matching profile and the decay verdict. With d_M > 0 a pair that does
// not decay gets an obstruction certificate when every optimal bottleneck
// reaches d_M / 4, otherwise an inconclusive one.
inline Certificate certify_equivalence(const DiagonalOperator& a, const DiagonalOperator& b, const ClosedSet& m,
                                       const CertifyConfig& cfg = {}) {
  check_checkpoints(cfg.checkpoints);
  if (!(cfg.epsilon > 0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  const WvnVerdict wvn = compute_d_m(m);
  const std::size_t largest = cfg.checkpoints.back();
  const auto xs_all = a.truncation(largest);
  const auto ys_all = b.truncation(largest);
  auto prefix = [](const std::vector<double>& v, std::size_t n) {
    return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  };

  std::vector<std::string> warnings;
  const std::size_t first = cfg.checkpoints.front();
  detail::check_against_set(prefix(xs_all, first), prefix(ys_all, first), m, cfg, warnings);
  const double disagreement = detail::estimate_disagreement(xs_all, ys_all, cfg);
  const bool spectra_agree = disagreement <= cfg.spectrum_tolerance;
  if (!spectra_agree) {
    warnings.push_back("SpectrumMismatch: estimates of A and B differ by " + detail::fmt(disagreement) + " at N=" +
                       std::to_string(largest));
  }

  auto decay_certificate = [&](std::vector<std::string> notes) {
    EquivalenceCertificate c;
    c.set_name = m.name();
    c.d_m = wvn.d_m;
    c.checkpoints = cfg.checkpoints;
    c.epsilon = cfg.epsilon;
    c.decay_factor = cfg.decay_factor;
    c.hash_a = content_hash(xs_all);
    c.hash_b = content_hash(ys_all);
    c.warnings = std::move(notes);
    for (std::size_t n : cfg.checkpoints) {
      c.profile.push_back(tail_profile_at(prefix(xs_all, n), prefix(ys_all, n)));
      c.bottlenecks.push_back(c.profile.back().bottleneck);
      c.perturbation_tail.push_back(c.profile.back().tail_bottleneck);
    }
    const double t0 = c.perturbation_tail.front();
    const double t1 = c.perturbation_tail.back();
    const bool decays = t1 * c.decay_factor <= t0 && t1 < c.epsilon;
    c.verdict = decays && spectra_agree ? Verdict::equivalent_evidence : Verdict::inconclusive;
    return c;
  };

  if (wvn.holds) return decay_certificate(std::move(warnings));

  // d_M > 0 rules out equivalence for some pairs over M, not for every pair:
  // a decaying tail is still evidence about this pair. A compact K may have
  // large norm, so the d_M / 4 bound obstructs only pairs that do not decay.
  auto decayed = decay_certificate(warnings);
  if (decayed.verdict == Verdict::equivalent_evidence) {
    decayed.warnings.push_back("d_M = " + detail::fmt(wvn.d_m) + " > 0: evidence is specific to this pair");
    return decayed;
  }

  ObstructionCertificate o;
  o.set_name = m.name();
  o.d_m = wvn.d_m;
  o.bound = wvn.d_m / 4;
  o.checkpoints = cfg.checkpoints;
  o.hash_a = decayed.hash_a;
  o.hash_b = decayed.hash_b;
  o.warnings = std::move(warnings);
  bool all_reach = true;
  for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    o.bottlenecks.push_back(decayed.profile[i].bottleneck);
    o.methods.push_back(decayed.profile[i].global_method);
    if (o.bottlenecks.back() < o.bound - kBoundSlack) all_reach = false;
  }
  if (all_reach) return o;

  decayed.warnings.push_back("optimal bottleneck fell below d_M/4 = " + detail::fmt(o.bound) + " without tail decay");
  return decayed;
}

// "N,bottleneck,tail_bottleneck" rows; the tail column is empty for
// obstruction certificates.
inline std::string certificate_csv(const Certificate& cert) {
  std::string out = "N,bottleneck,tail_bottleneck\n";
  char buf[96];
  std::visit(
      [&](const auto& c) {
        for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g,", c.checkpoints[i], c.bottlenecks[i]);
          out += buf;
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, EquivalenceCertificate>) {
            if (i < c.perturbation_tail.size()) {
              std::snprintf(buf, sizeof buf, "%.17g", c.perturbation_tail[i]);
              out += buf;
            }
          }
          out += "\n";
        }
      },
      cert);
  return out;
}

}  // namespace wvn
