#pragma once

// Closed subsets of the real line, described by their complement: an ordered
// list of open gaps plus at most one parametric gap family per direction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wvn/error.hpp"
#include "wvn/exact.hpp"

namespace wvn {

// Gap endpoint. Infinities are explicit tags, never the result of arithmetic.
struct ExtReal {
  enum class Kind : std::uint8_t { neg_inf, finite, pos_inf };

  Kind kind = Kind::finite;
  double value = 0.0;

  static constexpr ExtReal neg_infinity() { return {Kind::neg_inf, 0.0}; }
  static constexpr ExtReal pos_infinity() { return {Kind::pos_inf, 0.0}; }
  static constexpr ExtReal finite(double v) { return {Kind::finite, v}; }

  constexpr bool is_finite() const { return kind == Kind::finite; }
  constexpr bool is_neg_inf() const { return kind == Kind::neg_inf; }
  constexpr bool is_pos_inf() const { return kind == Kind::pos_inf; }

  constexpr ExtReal negated() const {
    switch (kind) {
      case Kind::neg_inf: return pos_infinity();
      case Kind::pos_inf: return neg_infinity();
      case Kind::finite: break;
    }
    return finite(-value);
  }

  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.kind == b.kind && (a.kind != Kind::finite || a.value == b.value);
  }

  friend constexpr bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.kind == Kind::finite && a.value < b.value;
  }
  friend constexpr bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
};

struct Gap {
  ExtReal lo;
  ExtReal hi;

  bool bounded() const { return lo.is_finite() && hi.is_finite(); }

  double half_width() const {
    if (!bounded()) return std::numeric_limits<double>::infinity();
    return (hi.value - lo.value) / 2;
  }

  friend bool operator==(const Gap&, const Gap&) = default;
};

enum class Direction : std::uint8_t { pos_inf, neg_inf };

inline Direction opposite(Direction d) {
  return d == Direction::pos_inf ? Direction::neg_inf : Direction::pos_inf;
}

enum class RadiusKind : std::uint8_t { constant, harmonic, geometric, table };

// A gap family c(k) +- r(k), k >= k0, with c(k) = alpha*k + beta. For the
// -inf direction the family is reflected: gap k is -c(k) +- r(k).
struct TailRule {
  Direction direction = Direction::pos_inf;
  double alpha = 1.0;
  double beta = 0.0;
  std::int64_t k0 = 1;
  RadiusKind kind = RadiusKind::constant;
  double rho = 0.0;
  double q = 0.0;
  std::vector<double> table;
  double limit = 0.0;

  friend bool operator==(const TailRule&, const TailRule&) = default;
};

struct ClosedSetSpec {
  std::string name;
  std::vector<Gap> finite_gaps;
  std::vector<TailRule> tails;

  friend bool operator==(const ClosedSetSpec&, const ClosedSetSpec&) = default;
};

// ---------------------------------------------------------------------------
// Tail-rule arithmetic, generic over double and Rational. Indices are carried
// in the number type itself.

template <class T>
T tail_center(const TailRule& rule, const T& k) {
  using tr = number_traits<T>;
  return tr::from_double(rule.alpha) * k + tr::from_double(rule.beta);
}

template <class T>
T tail_radius(const TailRule& rule, const T& k) {
  using tr = number_traits<T>;
  const T rho = tr::from_double(rule.rho);
  switch (rule.kind) {
    case RadiusKind::constant:
      return rho;
    case RadiusKind::harmonic:
      return rho / k;
    case RadiusKind::geometric:
      return rho * tr::pow_int(tr::from_double(rule.q), k);
    case RadiusKind::table: {
      const T offset = k - T(rule.k0);
      const T size = T(static_cast<std::int64_t>(rule.table.size()));
      if (offset < size) {
        return tr::from_double(rule.table[static_cast<std::size_t>(tr::to_int64(offset))]);
      }
      // Beyond the stored prefix: r(k) = L + (t_last - L) * k_last / k.
      const T last = tr::from_double(rule.table.back());
      const T lim = tr::from_double(rule.limit);
      const T k_last = T(rule.k0) + size - T(1);
      return lim + (last - lim) * k_last / k;
    }
  }
  return rho;
}

// Declared limsup of the radius sequence.
inline double tail_radius_limsup(const TailRule& rule) {
  switch (rule.kind) {
    case RadiusKind::constant: return rule.rho;
    case RadiusKind::harmonic:
    case RadiusKind::geometric: return 0.0;
    case RadiusKind::table: return rule.limit;
  }
  return 0.0;
}

// Gap k in positive orientation, i.e. before reflection of a -inf rule.
template <class T>
std::pair<T, T> oriented_tail_gap(const TailRule& rule, const T& k) {
  const T c = tail_center(rule, k);
  const T r = tail_radius(rule, k);
  return {c - r, c + r};
}

// Gap k in real coordinates.
template <class T>
std::pair<T, T> tail_gap(const TailRule& rule, const T& k) {
  auto [lo, hi] = oriented_tail_gap(rule, k);
  if (rule.direction == Direction::pos_inf) return {lo, hi};
  return {T(-hi), T(-lo)};
}

// Index of the gap of `rule` containing the oriented coordinate x, if any.
template <class T>
std::optional<T> oriented_tail_gap_index(const TailRule& rule, const T& x) {
  using tr = number_traits<T>;
  // r(k) < alpha, so only the two indices around (x - beta) / alpha can hold x.
  const T guess = tr::floor((x - tr::from_double(rule.beta)) / tr::from_double(rule.alpha));
  for (int d = -1; d <= 2; ++d) {
    const T k = guess + T(d);
    if (k < T(rule.k0)) continue;
    auto [lo, hi] = oriented_tail_gap(rule, k);
    if (lo < x && x < hi) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

// A closed set whose description passed validation. Immutable.
class ClosedSet {
 public:
  const ClosedSetSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  const std::vector<Gap>& finite_gaps() const { return spec_.finite_gaps; }

  const TailRule* tail(Direction d) const {
    for (const auto& t : spec_.tails) {
      if (t.direction == d) return &t;
    }
    return nullptr;
  }

 private:
  explicit ClosedSet(ClosedSetSpec spec) : spec_(std::move(spec)) {}
  friend ClosedSet validate(ClosedSetSpec spec);

  ClosedSetSpec spec_;
};

namespace detail {

inline void check_tail_rule(const TailRule& rule) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::malformed_tail_rule, what);
  };
  if (!(rule.alpha > 0) || !std::isfinite(rule.alpha)) fail("centers must strictly increase (alpha > 0)");
  if (!std::isfinite(rule.beta)) fail("beta must be finite");
  if (rule.k0 < 1) fail("start index k0 must be >= 1");

  const Rational alpha(rule.alpha);
  switch (rule.kind) {
    case RadiusKind::constant: {
      if (!(rule.rho > 0) || !std::isfinite(rule.rho)) fail("radius must be positive");
      if (2 * Rational(rule.rho) > alpha) fail("constant-radius gaps overlap (2*rho > alpha)");
      break;
    }
    case RadiusKind::harmonic: {
      if (!(rule.rho > 0) || !std::isfinite(rule.rho)) fail("radius must be positive");
      const Rational k0(rule.k0);
      if (Rational(rule.rho) / k0 + Rational(rule.rho) / (k0 + 1) > alpha) {
        fail("harmonic-radius gaps overlap at the start index");
      }
      break;
    }
    case RadiusKind::geometric: {
      if (!(rule.rho > 0) || !std::isfinite(rule.rho)) fail("radius must be positive");
      if (!(rule.q > 0 && rule.q < 1)) fail("geometric ratio must lie in (0,1)");
      const Rational r0 = tail_radius(rule, Rational(rule.k0));
      if (r0 * (1 + Rational(rule.q)) > alpha) fail("geometric-radius gaps overlap at the start index");
      break;
    }
    case RadiusKind::table: {
      if (rule.table.empty()) fail("table radius needs a non-empty prefix");
      if (!(rule.limit >= 0) || !std::isfinite(rule.limit)) fail("table limit must be finite and >= 0");
      for (double t : rule.table) {
        if (!(t > 0) || !std::isfinite(t)) fail("table radii must be positive");
      }
      for (std::size_t i = 0; i + 1 < rule.table.size(); ++i) {
        if (Rational(rule.table[i]) + Rational(rule.table[i + 1]) > alpha) {
          fail("table gaps " + std::to_string(i) + " and " + std::to_string(i + 1) + " overlap");
        }
      }
      const Rational bound = Rational(std::max(rule.table.back(), rule.limit));
      if (2 * bound > alpha) fail("table extension gaps may overlap (2*max(last, limit) > alpha)");
      break;
    }
  }
}

}  // namespace detail

// Sorts the finite gaps and checks every structural invariant.
// Touching gaps are allowed: their common endpoint belongs to the set.
inline ClosedSet validate(ClosedSetSpec spec) {
  for (const auto& g : spec.finite_gaps) {
    if (g.lo.is_pos_inf() || g.hi.is_neg_inf() || !(g.lo < g.hi) ||
        (g.lo.is_finite() && !std::isfinite(g.lo.value)) ||
        (g.hi.is_finite() && !std::isfinite(g.hi.value))) {
      throw Error(ErrorCode::invalid_argument, "gap endpoints must satisfy lo < hi");
    }
    if (g.lo.is_neg_inf() && g.hi.is_pos_inf()) {
      throw Error(ErrorCode::empty_set, "a gap covers the whole real line");
    }
  }

  std::sort(spec.finite_gaps.begin(), spec.finite_gaps.end(),
            [](const Gap& a, const Gap& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < spec.finite_gaps.size(); ++i) {
    if (spec.finite_gaps[i + 1].lo < spec.finite_gaps[i].hi) {
      throw Error(ErrorCode::overlapping_gaps, "gaps " + std::to_string(i) + " and " +
                                                   std::to_string(i + 1) + " overlap");
    }
  }

  if (spec.tails.size() > 2 ||
      (spec.tails.size() == 2 && spec.tails[0].direction == spec.tails[1].direction)) {
    throw Error(ErrorCode::malformed_tail_rule, "at most one tail rule per direction");
  }
  for (const auto& t : spec.tails) detail::check_tail_rule(t);
  std::sort(spec.tails.begin(), spec.tails.end(),
            [](const TailRule& a, const TailRule& b) { return a.direction < b.direction; });

  std::optional<Rational> plus_start;
  std::optional<Rational> minus_end;
  for (const auto& t : spec.tails) {
    auto [lo, hi] = tail_gap(t, Rational(t.k0));
    if (t.direction == Direction::pos_inf) {
      plus_start = lo;
      for (const auto& g : spec.finite_gaps) {
        if (g.hi.is_pos_inf() || (g.hi.is_finite() && Rational(g.hi.value) > lo)) {
          throw Error(ErrorCode::overlapping_gaps, "+inf tail must lie beyond every finite gap");
        }
      }
    } else {
      minus_end = hi;
      for (const auto& g : spec.finite_gaps) {
        if (g.lo.is_neg_inf() || (g.lo.is_finite() && Rational(g.lo.value) < hi)) {
          throw Error(ErrorCode::overlapping_gaps, "-inf tail must lie beyond every finite gap");
        }
      }
    }
  }
  if (plus_start && minus_end && *plus_start < *minus_end) {
    throw Error(ErrorCode::overlapping_gaps, "the two tail families overlap");
  }
  // With the single exception handled above, open gaps that do not overlap
  // always leave a point of the line uncovered, so the set is nonempty here.
  return ClosedSet(std::move(spec));
}

// The reflected set {-x : x in M}.
inline ClosedSetSpec mirrored(const ClosedSetSpec& spec) {
  ClosedSetSpec out;
  out.name = spec.name;
  for (const auto& g : spec.finite_gaps) out.finite_gaps.push_back({g.hi.negated(), g.lo.negated()});
  std::reverse(out.finite_gaps.begin(), out.finite_gaps.end());
  for (auto t : spec.tails) {
    t.direction = opposite(t.direction);
    out.tails.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership and distance.

namespace detail {

template <class T>
T endpoint(const ExtReal& e) {
  return number_traits<T>::from_double(e.value);
}

// Open gap (lo, hi) of the set that contains x, as (lo, hi) with nullopt for an
// infinite side. Returns false when x lies in the set.
template <class T>
bool find_gap(const ClosedSet& m, const T& x, std::optional<T>& lo, std::optional<T>& hi) {
  for (const auto& g : m.finite_gaps()) {
    const bool above_lo = g.lo.is_neg_inf() || (g.lo.is_finite() && endpoint<T>(g.lo) < x);
    const bool below_hi = g.hi.is_pos_inf() || (g.hi.is_finite() && x < endpoint<T>(g.hi));
    if (above_lo && below_hi) {
      lo = g.lo.is_finite() ? std::optional<T>(endpoint<T>(g.lo)) : std::nullopt;
      hi = g.hi.is_finite() ? std::optional<T>(endpoint<T>(g.hi)) : std::nullopt;
      return true;
    }
  }
  for (const auto& t : m.spec().tails) {
    const T oriented = t.direction == Direction::pos_inf ? x : T(-x);
    if (auto k = oriented_tail_gap_index(t, oriented)) {
      auto [a, b] = tail_gap(t, *k);
      lo = a;
      hi = b;
      return true;
    }
  }
  return false;
}

}  // namespace detail

template <class T>
bool contains(const ClosedSet& m, const T& x) {
  std::optional<T> lo, hi;
  return !detail::find_gap(m, x, lo, hi);
}

inline bool contains(const ClosedSet& m, double x) { return contains<double>(m, x); }

// dist(x, M). Zero exactly on M; inside an unbounded gap it is the distance to
// the finite endpoint.
template <class T>
T distance_to_set(const ClosedSet& m, const T& x) {
  std::optional<T> lo, hi;
  if (!detail::find_gap(m, x, lo, hi)) return T(0);
  if (lo && hi) return std::min<T>(T(x - *lo), T(*hi - x));
  if (lo) return T(x - *lo);
  return T(*hi - x);
}

inline double distance_to_set(const ClosedSet& m, double x) { return distance_to_set<double>(m, x); }

}  // namespace wvn
