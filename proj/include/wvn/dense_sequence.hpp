#pragma once

// Deterministic enumeration of a countable dense subset of a closed set.
//
// The set is split into its maximal closed intervals (components), ordered by
// distance from 0 (ties: leftmost first). Stage s visits components
// 0..s and emits the level (s - i) dyadic points of component i:
//   bounded [p, q]   level 0: p, q;  level l: p + (q - p)(2j - 1)/2^l
//   [p, +inf)        level 0: p;     level l: p + t, t in 2^-(l-1) Z, 0 < t <= l, t new
//   (-inf, q]        mirror of the above around q
//   (-inf, +inf)     level 0: 0;     level l: t, -t for the same new t
// Degenerate components emit only at level 0. If every component is a single
// point and all have been emitted, the sequence repeats from its start.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "wvn/closed_set.hpp"

namespace wvn {

struct Component {
  ExtReal lo;
  ExtReal hi;

  bool degenerate() const { return lo.is_finite() && hi.is_finite() && lo.value == hi.value; }

  double distance_from_zero() const {
    if (hi.is_finite() && hi.value < 0) return -hi.value;
    if (lo.is_finite() && lo.value > 0) return lo.value;
    return 0.0;
  }
};

// Gaps in left-to-right order, with `tail_terms` members of each tail family.
inline std::vector<Gap> ordered_gaps(const ClosedSet& m, std::size_t tail_terms) {
  std::vector<Gap> out;
  if (const TailRule* t = m.tail(Direction::neg_inf)) {
    for (std::size_t i = tail_terms; i-- > 0;) {
      auto [lo, hi] = tail_gap(*t, static_cast<double>(t->k0) + static_cast<double>(i));
      out.push_back({ExtReal::finite(lo), ExtReal::finite(hi)});
    }
  }
  out.insert(out.end(), m.finite_gaps().begin(), m.finite_gaps().end());
  if (const TailRule* t = m.tail(Direction::pos_inf)) {
    for (std::size_t i = 0; i < tail_terms; ++i) {
      auto [lo, hi] = tail_gap(*t, static_cast<double>(t->k0) + static_cast<double>(i));
      out.push_back({ExtReal::finite(lo), ExtReal::finite(hi)});
    }
  }
  return out;
}

// The components of M that can be certified from `tail_terms` members of each
// tail family, sorted by distance from 0. Components beyond the last
// generated tail gap are omitted.
inline std::vector<Component> components(const ClosedSet& m, std::size_t tail_terms) {
  const auto gaps = ordered_gaps(m, tail_terms);
  std::vector<Component> out;
  if (gaps.empty()) {
    out.push_back({ExtReal::neg_infinity(), ExtReal::pos_infinity()});
    return out;
  }
  if (!gaps.front().lo.is_neg_inf() && m.tail(Direction::neg_inf) == nullptr) {
    out.push_back({ExtReal::neg_infinity(), gaps.front().lo});
  }
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    // Rounding of tail endpoints can make touching gaps overlap by an ulp;
    // no double lies in M there.
    if (gaps[i].hi <= gaps[i + 1].lo) out.push_back({gaps[i].hi, gaps[i + 1].lo});
  }
  if (!gaps.back().hi.is_pos_inf() && m.tail(Direction::pos_inf) == nullptr) {
    out.push_back({gaps.back().hi, ExtReal::pos_infinity()});
  }
  std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    return std::make_tuple(a.distance_from_zero(), a.lo) < std::make_tuple(b.distance_from_zero(), b.lo);
  });
  return out;
}

namespace detail {

// Offsets t > 0 first emitted at `level` for a half-line anchored at 0.
template <class Emit>
bool half_line_level(int level, Emit&& emit) {
  const double step = std::ldexp(1.0, -(level - 1));
  for (long long j = 1;; ++j) {
    const double t = step * static_cast<double>(j);
    if (t > level) break;
    if (level == 1 || t > level - 1 || (j % 2) == 1) {
      if (!emit(t)) return false;
    }
  }
  return true;
}

// Emits the level-`level` points of `c`; `emit` returns false to stop early.
template <class Emit>
bool component_level(const Component& c, int level, Emit&& emit) {
  // No new doubles appear past this depth for any interval we build.
  if (level > 60) return true;
  if (c.lo.is_finite() && c.hi.is_finite()) {
    const double p = c.lo.value;
    const double q = c.hi.value;
    if (level == 0) {
      if (!emit(p)) return false;
      return p == q || emit(q);
    }
    if (p == q) return true;
    const double denom = std::ldexp(1.0, level);
    const long long count = 1LL << (level - 1);
    for (long long j = 1; j <= count; ++j) {
      const double x = p + (q - p) * (static_cast<double>(2 * j - 1) / denom);
      if (!emit(std::clamp(x, p, q))) return false;
    }
    return true;
  }
  if (c.lo.is_finite()) {
    const double p = c.lo.value;
    if (level == 0) return emit(p);
    return half_line_level(level, [&](double t) { return emit(p + t); });
  }
  if (c.hi.is_finite()) {
    const double q = c.hi.value;
    if (level == 0) return emit(q);
    return half_line_level(level, [&](double t) { return emit(q - t); });
  }
  if (level == 0) return emit(0.0);
  return half_line_level(level, [&](double t) { return emit(t) && emit(-t); });
}

}  // namespace detail

// mu_1, ..., mu_count. Every entry lies in M; repetitions are allowed.
inline std::vector<double> dense_sequence(const ClosedSet& m, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  out.reserve(count);
  // Stage s always emits from component s while it exists, so count + 1
  // components per side are enough.
  const auto comps = components(m, count + 2);
  auto emit = [&](double x) {
    out.push_back(x);
    return out.size() < count;
  };
  for (std::size_t stage = 0; out.size() < count; ++stage) {
    const std::size_t before = out.size();
    bool more = true;
    for (std::size_t i = 0; i <= stage && i < comps.size() && more; ++i) {
      more = detail::component_level(comps[i], static_cast<int>(stage - i), emit);
    }
    if (!more) break;
    if (out.size() == before && stage >= comps.size()) {
      // Finitely many isolated points, all emitted: cycle.
      const std::size_t period = out.size();
      while (out.size() < count) out.push_back(out[out.size() - period]);
    }
  }
  return out;
}

}  // namespace wvn
