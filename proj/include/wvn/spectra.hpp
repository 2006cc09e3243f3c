#pragma once

// Diagonal self-adjoint operator models, the pairing-grid synthesis of an
// operator with prescribed essential spectrum, defect profiles, and a
// counting estimate of the essential spectrum of a truncation.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wvn/closed_set.hpp"
#include "wvn/dense_sequence.hpp"
#include "wvn/error.hpp"

namespace wvn {

using Index = std::uint64_t;

// Slot <k, m> of the pairing grid.
struct PairingIndex {
  std::uint64_t k = 1;
  std::uint64_t m = 1;

  friend bool operator==(const PairingIndex&, const PairingIndex&) = default;
};

// Largest k for which some slot <k, m> is representable as an Index.
inline constexpr std::uint64_t kMaxPairingRow = 64;

// 2^(k-1) (2m - 1), or PairingOverflow when it does not fit in an Index.
inline Index pairing_encode(std::uint64_t k, std::uint64_t m) {
  if (k == 0 || m == 0) throw Error(ErrorCode::invalid_argument, "pairing indices start at 1");
  if (k > kMaxPairingRow || m > (std::numeric_limits<Index>::max() >> 1U) + 1) {
    throw Error(ErrorCode::pairing_overflow, "<" + std::to_string(k) + "," + std::to_string(m) + "> exceeds 2^64 - 1");
  }
  const Index odd = 2 * m - 1;
  if (odd > (std::numeric_limits<Index>::max() >> (k - 1))) {
    throw Error(ErrorCode::pairing_overflow, "<" + std::to_string(k) + "," + std::to_string(m) + "> exceeds 2^64 - 1");
  }
  return odd << (k - 1);
}

inline PairingIndex pairing_decode(Index n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "operator indices start at 1");
  const auto tz = static_cast<std::uint64_t>(std::countr_zero(n));
  return {tz + 1, ((n >> tz) + 1) / 2};
}

// An operator diag(lambda_1, lambda_2, ...). The rule is pure and shared
// between copies. A finite operator (from a stored list) has a maximal index.
class DiagonalOperator {
 public:
  using Rule = std::function<double(Index)>;

  DiagonalOperator(std::string label, Rule rule, std::optional<ClosedSetSpec> source = std::nullopt,
                   std::optional<Index> size = std::nullopt)
      : label_(std::move(label)),
        rule_(std::make_shared<const Rule>(std::move(rule))),
        source_(std::move(source)),
        size_(size) {}

  static DiagonalOperator from_eigenvalues(std::string label, std::vector<double> values) {
    auto data = std::make_shared<const std::vector<double>>(std::move(values));
    const Index size = data->size();
    return DiagonalOperator(
        std::move(label), [data](Index n) { return (*data)[n - 1]; }, std::nullopt, size);
  }

  const std::string& label() const { return label_; }
  const std::optional<ClosedSetSpec>& source() const { return source_; }
  std::optional<Index> size() const { return size_; }

  double eigenvalue(Index n) const {
    if (n == 0) throw Error(ErrorCode::invalid_argument, "operator indices start at 1");
    if (size_ && n > *size_) {
      throw Error(ErrorCode::invalid_argument, "index " + std::to_string(n) + " beyond stored eigenvalues of '" +
                                                   label_ + "' (" + std::to_string(*size_) + ")");
    }
    return (*rule_)(n);
  }

  // lambda_1 .. lambda_N in index order.
  std::vector<double> truncation(std::size_t n) const {
    if (size_ && n > *size_) {
      throw Error(ErrorCode::invalid_argument, "truncation " + std::to_string(n) + " exceeds stored eigenvalues of '" +
                                                   label_ + "' (" + std::to_string(*size_) + ")");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (*rule_)(i + 1);
    return out;
  }

 private:
  std::string label_;
  std::shared_ptr<const Rule> rule_;
  std::optional<ClosedSetSpec> source_;
  std::optional<Index> size_;
};

// Operator with value column[k-1] at slot <k,1> and dense[k-1] at <k,m>, m >= 2.
// Rows without a column entry fall back to the dense value.
inline DiagonalOperator make_pairing_operator(std::string label, std::vector<double> column, std::vector<double> dense,
                                              std::optional<ClosedSetSpec> source = std::nullopt) {
  if (dense.size() < kMaxPairingRow) {
    throw Error(ErrorCode::invalid_argument, "pairing operator needs a dense value for every row k <= 64");
  }
  struct Grid {
    std::vector<double> column;
    std::vector<double> dense;
  };
  auto grid = std::make_shared<const Grid>(Grid{std::move(column), std::move(dense)});
  return DiagonalOperator(
      std::move(label),
      [grid](Index n) {
        const auto [k, m] = pairing_decode(n);
        if (m == 1 && k <= grid->column.size()) return grid->column[k - 1];
        return grid->dense[k - 1];
      },
      std::move(source));
}

using ColumnRule = std::function<double(std::uint64_t)>;

// Slot <k,1> holds outliers[k-1] when given, else column_rule(k) when given,
// else mu_k; slots <k,m>, m >= 2, hold mu_k from dense_sequence(M). Every
// outlier that can be addressed (k <= 64) must lie outside M.
inline DiagonalOperator synth_with_ess_spectrum(const ClosedSet& m, const std::vector<double>& outliers,
                                                const ColumnRule& column_rule = nullptr,
                                                std::string label = "synth") {
  auto dense = dense_sequence(m, kMaxPairingRow);
  std::vector<double> column;
  for (std::uint64_t k = 1; k <= kMaxPairingRow; ++k) {
    double v;
    if (k <= outliers.size()) {
      v = outliers[k - 1];
    } else if (column_rule) {
      v = column_rule(k);
    } else {
      break;
    }
    if (contains(m, v)) {
      throw Error(ErrorCode::outlier_inside_set, "outlier " + std::to_string(k) + " = " + std::to_string(v) +
                                                     " lies in " + (m.name().empty() ? "M" : m.name()));
    }
    column.push_back(v);
  }
  return make_pairing_operator(std::move(label), std::move(column), std::move(dense), m.spec());
}

// The gap nearest to 0 with a finite left end and half-width >= scale.
inline std::optional<Gap> find_host_gap(const ClosedSet& m, double scale) {
  std::optional<Gap> best;
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Gap& g) {
    if (!g.lo.is_finite() || !(g.half_width() >= scale)) return;
    const double dist = g.lo.value >= 0 ? g.lo.value : (g.hi.is_finite() && g.hi.value <= 0 ? -g.hi.value : 0.0);
    if (dist < best_dist) {
      best_dist = dist;
      best = g;
    }
  };
  for (const auto& g : ordered_gaps(m, kMaxPairingRow)) consider(g);
  return best;
}

inline Gap defect_host_gap(const ClosedSet& m, double scale) {
  const auto g = find_host_gap(m, scale);
  if (!g) throw Error(ErrorCode::no_host_gap, "no gap with a finite left end and half-width >= " + std::to_string(scale));
  return *g;
}

// Outliers lambda_k = lo + scale / k^power in the host gap, so that
// dist(lambda_k, M) = scale / k^power for k = 1..count.
inline std::vector<double> defect_outliers(const ClosedSet& m, double scale, double power,
                                           std::size_t count = kMaxPairingRow) {
  if (!(scale > 0) || !(power > 0)) throw Error(ErrorCode::invalid_argument, "defect scale and power must be positive");
  const Gap host = defect_host_gap(m, scale);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    out.push_back(host.lo.value + scale / std::pow(static_cast<double>(k), power));
  }
  return out;
}

// Slot <k,1> at distance scale / k^power from an anchor: the left end of a
// host gap when M has one, otherwise mu_1 (M without such a gap, e.g. R, has
// no room outside it). mu_1 fills every odd slot, so a matching can always
// pair a perturbed value with an unperturbed copy of its anchor.
inline DiagonalOperator synth_decaying_defects(const ClosedSet& m, double scale, double power,
                                               std::string label = "synth") {
  if (find_host_gap(m, scale)) {
    return synth_with_ess_spectrum(m, defect_outliers(m, scale, power), nullptr, std::move(label));
  }
  if (!(scale > 0) || !(power > 0)) throw Error(ErrorCode::invalid_argument, "defect scale and power must be positive");
  auto dense = dense_sequence(m, kMaxPairingRow);
  std::vector<double> column(kMaxPairingRow);
  for (std::size_t k = 1; k <= kMaxPairingRow; ++k) {
    column[k - 1] = dense[0] + scale / std::pow(static_cast<double>(k), power);
  }
  return make_pairing_operator(std::move(label), std::move(column), std::move(dense), m.spec());
}

struct DefectProfile {
  std::vector<double> values;
  std::vector<std::size_t> checkpoints;
  // tail_sup[i] = max of values[m - 1 ..] for m = checkpoints[i].
  std::vector<double> tail_sup;
};

// a_n = dist(lambda_n, M) for n <= N, with tail suprema at m = 1, 2, 4, ..., N.
inline DefectProfile defect_sequence(const DiagonalOperator& op, const ClosedSet& m, std::size_t n) {
  DefectProfile p;
  const auto eigs = op.truncation(n);
  p.values.reserve(n);
  for (double x : eigs) p.values.push_back(distance_to_set(m, x));
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = std::max(suffix[i + 1], p.values[i]);
  for (std::size_t c = 1; c <= n; c *= 2) p.checkpoints.push_back(c);
  if (n > 0 && p.checkpoints.back() != n) p.checkpoints.push_back(n);
  for (std::size_t c : p.checkpoints) p.tail_sup.push_back(suffix[c - 1]);
  return p;
}

// ---------------------------------------------------------------------------
// Closed intervals and distances between finite unions of them.

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Union of [e - eps, e + eps] over eigenvalues e with at least `threshold`
// eigenvalues (itself included) within eps; merged, sorted, disjoint.
inline std::vector<Interval> ess_spectrum_estimate(std::vector<double> eigs, double eps, std::size_t threshold) {
  if (!(eps > 0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  if (threshold < 2) throw Error(ErrorCode::invalid_argument, "threshold must be at least 2");
  std::sort(eigs.begin(), eigs.end());
  std::vector<Interval> out;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    while (eigs[i] - eigs[lo] > eps) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < eigs.size() && eigs[hi + 1] - eigs[i] <= eps) ++hi;
    if (hi - lo + 1 < threshold) continue;
    const Interval iv{eigs[i] - eps, eigs[i] + eps};
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// M intersected with [lo, hi], as sorted disjoint closed intervals.
inline std::vector<Interval> restrict_to_window(const ClosedSet& m, double lo, double hi) {
  // Enough tail members to pass the window on either side.
  std::size_t terms = 4;
  for (const auto& t : m.spec().tails) {
    const double reach = (std::max(std::abs(lo), std::abs(hi)) - t.beta) / t.alpha + 3;
    if (reach > static_cast<double>(terms)) terms = static_cast<std::size_t>(reach);
  }
  auto comps = components(m, terms);
  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& c : comps) {
    const double a = c.lo.is_finite() ? std::max(c.lo.value, lo) : lo;
    const double b = c.hi.is_finite() ? std::min(c.hi.value, hi) : hi;
    if (a <= b) out.push_back({a, b});
  }
  return out;
}

inline std::vector<Interval> clip(const std::vector<Interval>& set, double lo, double hi) {
  std::vector<Interval> out;
  for (const auto& iv : set) {
    const double a = std::max(iv.lo, lo);
    const double b = std::min(iv.hi, hi);
    if (a <= b) out.push_back({a, b});
  }
  return out;
}

// Distance from x to a nonempty sorted union of intervals.
inline double distance_to_union(const std::vector<Interval>& set, double x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : set) {
    if (x < iv.lo) {
      best = std::min(best, iv.lo - x);
    } else if (x > iv.hi) {
      best = std::min(best, x - iv.hi);
    } else {
      return 0.0;
    }
  }
  return best;
}

// sup over x in `from` of dist(x, to). The maximum of dist(., to) on an
// interval is attained at its ends or at the midpoint of a hole of `to`.
inline double directed_hausdorff(const std::vector<Interval>& from, const std::vector<Interval>& to) {
  if (from.empty()) return 0.0;
  if (to.empty()) return std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (const auto& iv : from) {
    best = std::max({best, distance_to_union(to, iv.lo), distance_to_union(to, iv.hi)});
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      const double mid = to[i].hi + (to[i + 1].lo - to[i].hi) / 2;
      if (iv.lo < mid && mid < iv.hi) best = std::max(best, distance_to_union(to, mid));
    }
  }
  return best;
}

inline double hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// Hausdorff distance between (estimate within window) and (M within window).
inline double hausdorff_in_window(const std::vector<Interval>& estimate, const ClosedSet& m, double lo, double hi) {
  return hausdorff(clip(estimate, lo, hi), restrict_to_window(m, lo, hi));
}

}  // namespace wvn
