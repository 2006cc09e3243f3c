#pragma once

// The "large holes at infinity" quantity: the capped supremal distance to M
// from points outside both M and [-n, n], and its limit d_M as n grows.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "wvn/closed_set.hpp"

namespace wvn {

struct WvnVerdict {
  double d_m = 0.0;
  bool exact = true;
  bool holds = false;
  // Cross-check table: (n, truncated_defect(M, n)) on a grid beyond the
  // convergence radius for `convergence_tolerance`.
  double convergence_tolerance = 1e-9;
  double convergence_radius = 0.0;
  std::vector<std::pair<double, double>> convergence;
  bool consistent = true;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup of dist(x, M) over x in (p, q), a sub-interval of the gap (lo, hi).
// The distance is the tent min(x - lo, hi - x).
inline double piece_sup(const ExtReal& lo, const ExtReal& hi, double p, double q) {
  if (!std::isfinite(p) || !std::isfinite(q)) return kInf;
  if (lo.is_neg_inf()) return hi.value - p;
  if (hi.is_pos_inf()) return q - lo.value;
  const double mid = lo.value + (hi.value - lo.value) / 2;
  if (p < mid && mid < q) return (hi.value - lo.value) / 2;
  if (q <= mid) return q - lo.value;
  return hi.value - p;
}

// Contribution of one gap: the part of it outside [-n, n].
inline double clipped_gap_sup(const ExtReal& lo, const ExtReal& hi, double n) {
  const double a = lo.is_neg_inf() ? -kInf : lo.value;
  const double b = hi.is_pos_inf() ? kInf : hi.value;
  double best = 0.0;
  const double left_q = std::min(b, -n);
  if (a < left_q) best = std::max(best, piece_sup(lo, hi, a, left_q));
  const double right_p = std::max(a, n);
  if (right_p < b) best = std::max(best, piece_sup(lo, hi, right_p, b));
  return best;
}

// sup of r(k) over from <= k <= to (to may be +inf); 0 on an empty range.
inline double sup_radius(const TailRule& rule, double from, double to) {
  if (from > to) return 0.0;
  switch (rule.kind) {
    case RadiusKind::constant:
      return rule.rho;
    case RadiusKind::harmonic:
    case RadiusKind::geometric:
      return tail_radius(rule, from);
    case RadiusKind::table: {
      const double k0 = static_cast<double>(rule.k0);
      const double k_last = k0 + static_cast<double>(rule.table.size()) - 1;
      double best = 0.0;
      for (double k = std::max(from, k0); k <= std::min(to, k_last); k += 1) {
        best = std::max(best, rule.table[static_cast<std::size_t>(k - k0)]);
      }
      const double ext_from = std::max(from, k_last + 1);
      if (ext_from <= to) {
        if (rule.table.back() >= rule.limit) {
          best = std::max(best, tail_radius(rule, ext_from));
        } else {
          best = std::max(best, std::isfinite(to) ? tail_radius(rule, to) : rule.limit);
        }
      }
      return best;
    }
  }
  return 0.0;
}

// First k >= k0 with pred(k) true, for pred monotone in k; `guess` is a
// starting point within a few steps of the answer.
inline double first_index(double k0, double guess, const std::function<bool(double)>& pred) {
  double k = std::max(k0, std::floor(guess));
  while (k > k0 && pred(k - 1)) k -= 1;
  while (!pred(k) && k + 1 != k) k += 1;
  return k;
}

// Contribution of a tail family; [-n, n] is symmetric so the oriented
// (positive) picture is used for either direction.
inline double tail_defect(const TailRule& rule, double n) {
  const double k0 = static_cast<double>(rule.k0);
  auto lo = [&](double k) { return oriented_tail_gap(rule, k).first; };
  auto hi = [&](double k) { return oriented_tail_gap(rule, k).second; };
  auto index_guess = [&](double x) { return (x - rule.beta) / rule.alpha - 2; };

  const double k_left = first_index(k0, index_guess(-n), [&](double k) { return hi(k) > -n; });
  const double k_right = first_index(k0, index_guess(n), [&](double k) { return lo(k) >= n; });

  double best = std::max(sup_radius(rule, k0, k_left - 1), sup_radius(rule, k_right, kInf));
  for (double k : {k_left, k_right - 1}) {
    if (k >= k_left && k < k_right) {
      // Rounded endpoints far from 0 can widen the gap; r(k) bounds it exactly.
      const double piece = clipped_gap_sup(ExtReal::finite(lo(k)), ExtReal::finite(hi(k)), n);
      best = std::max(best, std::min(piece, tail_radius(rule, k)));
    }
  }
  return best;
}

}  // namespace detail

// min{ sup_{x not in M, |x| > n} dist(x, M), 1 }, with sup over the empty set
// taken as 0. Closed form per gap; no sampling.
inline double truncated_defect(const ClosedSet& m, double n) {
  n = std::max(n, 0.0);
  double best = 0.0;
  for (const auto& g : m.finite_gaps()) {
    best = std::max(best, detail::clipped_gap_sup(g.lo, g.hi, n));
    if (best >= 1.0) return 1.0;
  }
  for (const auto& t : m.spec().tails) best = std::max(best, detail::tail_defect(t, n));
  return std::min(best, 1.0);
}

// Limit of the defect contributed by one direction (uncapped).
inline double directional_hole(const ClosedSet& m, Direction d) {
  for (const auto& g : m.finite_gaps()) {
    if (d == Direction::pos_inf && g.hi.is_pos_inf()) return detail::kInf;
    if (d == Direction::neg_inf && g.lo.is_neg_inf()) return detail::kInf;
  }
  if (const TailRule* t = m.tail(d)) return tail_radius_limsup(*t);
  return 0.0;
}

// A radius N such that |truncated_defect(M, n) - d_M| < eps for every n >= N.
inline double convergence_radius(const ClosedSet& m, double eps) {
  double radius = 0.0;
  for (const auto& g : m.finite_gaps()) {
    if (g.lo.is_finite()) radius = std::max(radius, std::abs(g.lo.value));
    if (g.hi.is_finite()) radius = std::max(radius, std::abs(g.hi.value));
  }
  for (const auto& t : m.spec().tails) {
    const double k0 = static_cast<double>(t.k0);
    // Radii at indices >= k_eps are below limsup + eps.
    double k_eps = k0;
    switch (t.kind) {
      case RadiusKind::constant:
        break;
      case RadiusKind::harmonic:
        k_eps = std::max(k0, std::floor(t.rho / eps) + 2);
        break;
      case RadiusKind::geometric:
        k_eps = std::max(k0, std::floor(std::log(eps / t.rho) / std::log(t.q)) + 2);
        break;
      case RadiusKind::table: {
        for (std::size_t i = 0; i < t.table.size(); ++i) {
          if (t.table[i] >= t.limit + eps) k_eps = std::max(k_eps, k0 + static_cast<double>(i) + 1);
        }
        const double k_last = k0 + static_cast<double>(t.table.size()) - 1;
        if (t.table.back() > t.limit) {
          k_eps = std::max(k_eps, std::floor((t.table.back() - t.limit) * k_last / eps) + 2);
        }
        break;
      }
    }
    // The closed forms above can be off by one after rounding.
    const double target = tail_radius_limsup(t) + eps;
    while (t.kind != RadiusKind::constant && tail_radius(t, k_eps) >= target) k_eps += 1;
    const auto first = oriented_tail_gap(t, k0);
    double dir_radius = std::max(0.0, -first.first);
    // One extra gap: at large magnitudes the gaps can be narrower than an ulp
    // and rounding may shift which index straddles n.
    if (k_eps > k0) dir_radius = std::max(dir_radius, oriented_tail_gap(t, k_eps).second);
    radius = std::max(radius, dir_radius);
  }
  return radius;
}

// d_M and the Weyl-von Neumann classification. d_M is read off the rule
// parameters; the truncated defect is evaluated beyond the convergence radius
// as an independent cross-check.
inline WvnVerdict compute_d_m(const ClosedSet& m, double tolerance = 1e-9) {
  WvnVerdict v;
  const double hole = std::max(directional_hole(m, Direction::pos_inf),
                               directional_hole(m, Direction::neg_inf));
  v.d_m = std::min(hole, 1.0);
  v.exact = true;
  v.holds = v.d_m == 0.0;
  v.convergence_tolerance = tolerance;
  v.convergence_radius = convergence_radius(m, tolerance);
  const double base = std::max(v.convergence_radius, 1.0);
  for (double factor : {1.0, 1.5, 2.0, 10.0, 100.0}) {
    const double n = base * factor;
    const double td = truncated_defect(m, n);
    v.convergence.emplace_back(n, td);
    if (!(std::abs(td - v.d_m) < tolerance)) v.consistent = false;
  }
  return v;
}

}  // namespace wvn
