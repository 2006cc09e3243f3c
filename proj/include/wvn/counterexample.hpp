#pragma once

// The non-equivalent pair over a set with large holes at infinity.
//
// Outliers 1 < l_1 < l_2 < ... sit in gaps toward one infinity with
// l_{k+1} > 2 l_k and dist(l_k, M) > d_M / 2. A carries l_k at slot <k,1>,
// B carries l_{k+1} - d_M/4 there; both carry mu_k at <k,m>, m >= 2. Every
// pairing of the two diagonals then moves some outlier by at least d_M / 4.
//
// All selection and separation arithmetic is exact (rationals); the
// operators hold the nearest doubles.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wvn/closed_set.hpp"
#include "wvn/dense_sequence.hpp"
#include "wvn/equivalence.hpp"
#include "wvn/error.hpp"
#include "wvn/exact.hpp"
#include "wvn/hole_defect.hpp"
#include "wvn/matching.hpp"
#include "wvn/spectra.hpp"

namespace wvn {

// Relative slack on the half-width requirement: a gap qualifies when its
// half-width exceeds (d_M / 2)(1 + 1e-9).
inline constexpr double kHalfWidthSlack = 1e-9;
// Tail indices scanned past the doubling threshold before giving up.
inline constexpr std::int64_t kTailScanLimit = 1 << 16;

struct LambdaChoice {
  std::vector<Rational> lambdas;  // real coordinates
  Direction direction = Direction::pos_inf;
  Rational d_m;
  // Both half-lines have unbounded complement; the +inf side was taken.
  bool both_directions = false;
};

namespace detail {

inline Rational to_rational(double x) { return number_traits<Rational>::from_double(x); }

inline bool direction_qualifies(const ClosedSet& m, Direction d, double d_m) {
  return directional_hole(m, d) > d_m / 2 * (1 + kHalfWidthSlack);
}

// Walks gaps of `p` left to right on (1, +inf).
inline std::vector<Rational> walk_positive(const ClosedSet& p, const Rational& d_m, std::size_t count) {
  const Rational h_star = d_m / 2 * (Rational(1) + to_rational(kHalfWidthSlack));
  std::vector<Rational> out;
  Rational floor_value = 1;  // each new lambda must exceed this
  std::size_t gap_cursor = 0;
  std::optional<Rational> tail_cursor;
  const TailRule* tail = p.tail(Direction::pos_inf);

  while (out.size() < count) {
    std::optional<Rational> pick;
    for (; gap_cursor < p.finite_gaps().size() && !pick; ++gap_cursor) {
      const Gap& g = p.finite_gaps()[gap_cursor];
      if (!g.lo.is_finite()) continue;
      const Rational lo = to_rational(g.lo.value);
      if (g.hi.is_pos_inf()) {
        // Stay on this gap for every remaining lambda.
        pick = std::max(floor_value, Rational(lo + 1)) + Rational(1, 2);
        break;
      }
      const Rational hi = to_rational(g.hi.value);
      const Rational mid = (lo + hi) / 2;
      if ((hi - lo) / 2 > h_star && mid > floor_value) pick = mid;
    }
    if (!pick && tail != nullptr) {
      const Rational alpha = to_rational(tail->alpha);
      const Rational beta = to_rational(tail->beta);
      // First index with center above the floor.
      Rational k = number_traits<Rational>::floor((floor_value - beta) / alpha) + 1;
      k = std::max(k, Rational(tail->k0));
      if (tail_cursor) k = std::max(k, *tail_cursor);
      for (std::int64_t step = 0; step < kTailScanLimit; ++step, k += 1) {
        if (tail_radius(*tail, k) > h_star && tail_center(*tail, k) > floor_value) {
          pick = tail_center(*tail, k);
          tail_cursor = k + 1;
          break;
        }
      }
    }
    if (!pick) {
      throw Error(ErrorCode::tail_exhausted, "only " + std::to_string(out.size()) + " of " +
                                                 std::to_string(count) + " outliers found");
    }
    out.push_back(*pick);
    floor_value = 2 * *pick;
  }
  return out;
}

}  // namespace detail

// lambda_1..lambda_count with lambda_1 > 1 (|.| for -inf), doubling, and
// dist > d_M / 2, taken toward +inf when that side has holes of size
// > d_M / 2 and mirrored otherwise.
inline LambdaChoice choose_lambdas(const ClosedSet& m, std::size_t count) {
  const WvnVerdict v = compute_d_m(m);
  if (v.holds) throw Error(ErrorCode::not_obstructed, "d_M = 0: no large holes at infinity");
  LambdaChoice c;
  c.d_m = detail::to_rational(v.d_m);
  const bool pos = detail::direction_qualifies(m, Direction::pos_inf, v.d_m);
  const bool neg = detail::direction_qualifies(m, Direction::neg_inf, v.d_m);
  c.both_directions = pos && neg;
  c.direction = pos ? Direction::pos_inf : Direction::neg_inf;
  if (pos) {
    c.lambdas = detail::walk_positive(m, c.d_m, count);
  } else {
    const ClosedSet p = validate(mirrored(m.spec()));
    c.lambdas = detail::walk_positive(p, c.d_m, count);
    for (auto& l : c.lambdas) l = -l;
  }
  return c;
}

struct CounterexamplePair {
  ClosedSet m;
  Rational d_m;
  Direction direction;
  bool both_directions;
  std::vector<Rational> lambdas;  // K + 1 values, real coordinates
  std::vector<double> dense;      // mu_1 .. mu_64
  DiagonalOperator a;
  DiagonalOperator b;

  std::size_t rows() const { return lambdas.size() - 1; }
  double d_m_value() const { return number_traits<Rational>::to_double(d_m); }

  // Orientation sign: +1 toward +inf, -1 toward -inf.
  int sign() const { return direction == Direction::pos_inf ? 1 : -1; }

  // Exact value of B at slot <k,1>: l_{k+1} - d_M/4, mirrored for -inf.
  Rational b_outlier(std::size_t k) const { return lambdas[k] - Rational(sign()) * d_m / 4; }
};

inline CounterexamplePair build_counterexample(const ClosedSet& m, std::size_t rows = kMaxPairingRow) {
  if (rows == 0 || rows > kMaxPairingRow) throw Error(ErrorCode::invalid_argument, "rows must be in 1..64");
  LambdaChoice c = choose_lambdas(m, rows + 1);
  auto dense = dense_sequence(m, kMaxPairingRow);
  std::vector<double> col_a;
  std::vector<double> col_b;
  const Rational shift = Rational(c.direction == Direction::pos_inf ? 1 : -1) * c.d_m / 4;
  for (std::size_t k = 1; k <= rows; ++k) {
    col_a.push_back(number_traits<Rational>::to_double(c.lambdas[k - 1]));
    col_b.push_back(number_traits<Rational>::to_double(c.lambdas[k] - shift));
  }
  const std::string name = m.name().empty() ? "M" : m.name();
  auto a = make_pairing_operator("counterexample-A(" + name + ")", col_a, dense, m.spec());
  auto b = make_pairing_operator("counterexample-B(" + name + ")", col_b, dense, m.spec());
  return CounterexamplePair{m, c.d_m, c.direction, c.both_directions, std::move(c.lambdas), std::move(dense),
                            std::move(a), std::move(b)};
}

// The three selection conditions, evaluated exactly.
struct LambdaConditions {
  bool first_above_one = true;   // |l_1| > 1
  bool doubling = true;          // |l_{k+1}| > 2 |l_k|
  bool far_from_set = true;      // dist(l_k, M) > d_M / 2
  bool growth = true;            // |l_k| > 2^(k-1) |l_1| > 2^(k-1)
  Rational min_distance_margin;  // min dist(l_k, M) - d_M / 2
};

inline LambdaConditions check_lambda_conditions(const ClosedSet& m, const std::vector<Rational>& lambdas,
                                                const Rational& d_m, std::size_t kmax) {
  LambdaConditions r;
  kmax = std::min(kmax, lambdas.size());
  Rational pow2 = 1;
  for (std::size_t k = 0; k < kmax; ++k) {
    const Rational l = abs(lambdas[k]);
    if (k == 0 && !(l > 1)) r.first_above_one = false;
    if (k + 1 < kmax && !(abs(lambdas[k + 1]) > 2 * l)) r.doubling = false;
    if (!(l > pow2) || (k > 0 && !(l > pow2 * abs(lambdas[0])))) r.growth = false;
    pow2 *= 2;
    const Rational margin = distance_to_set<Rational>(m, lambdas[k]) - d_m / 2;
    if (!(margin > 0)) r.far_from_set = false;
    if (k == 0 || margin < r.min_distance_margin) r.min_distance_margin = margin;
  }
  return r;
}

struct SeparationReport {
  std::size_t kmax = 0;
  // max over k = k'+1 of | |l_{k'+1} - d/4 - l_k| - d/4 |; zero when exact.
  Rational adjacent_error;
  // min over k != k'+1 of |l_{k'+1} - d/4 - l_k| - d/4 (> 0), with witness.
  Rational outlier_margin;
  std::pair<std::size_t, std::size_t> outlier_witness{0, 0};
  // min over k and the dense samples of |l_k - mu| - d/4 (> 0), with witness.
  Rational dense_margin;
  std::pair<std::size_t, std::size_t> dense_witness{0, 0};
};

// Checks, for 1 <= k, k' <= kmax, that B's outlier at row k' is at least
// d/4 from A's outlier at row k (equal exactly when k = k'+1) and that every
// dense value is more than d/4 from every A outlier.
inline SeparationReport separation_check(const CounterexamplePair& pair, std::size_t kmax) {
  if (kmax == 0 || kmax > pair.rows()) {
    throw Error(ErrorCode::invalid_argument, "kmax must be in 1.." + std::to_string(pair.rows()));
  }
  const Rational quarter = pair.d_m / 4;
  SeparationReport r;
  r.kmax = kmax;
  bool first_other = true;
  for (std::size_t kp = 1; kp <= kmax; ++kp) {
    const Rational bv = pair.b_outlier(kp);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const Rational gap = abs(bv - pair.lambdas[k - 1]);
      if (k == kp + 1) {
        r.adjacent_error = std::max(r.adjacent_error, Rational(abs(gap - quarter)));
        if (gap != quarter) {
          throw Error(ErrorCode::separation_violated, "k=" + std::to_string(k) + ", k'=" + std::to_string(kp) +
                                                          ": adjacent separation differs from d_M/4");
        }
      } else {
        const Rational margin = gap - quarter;
        if (!(margin > 0)) {
          throw Error(ErrorCode::separation_violated,
                      "k=" + std::to_string(k) + ", k'=" + std::to_string(kp) + ": separation " + to_string(gap) +
                          " does not exceed d_M/4");
        }
        if (first_other || margin < r.outlier_margin) {
          r.outlier_margin = margin;
          r.outlier_witness = {k, kp};
          first_other = false;
        }
      }
    }
  }
  bool first_dense = true;
  for (std::size_t k = 1; k <= kmax; ++k) {
    for (std::size_t i = 0; i < pair.dense.size(); ++i) {
      const Rational margin = abs(pair.lambdas[k - 1] - detail::to_rational(pair.dense[i])) - quarter;
      if (!(margin > 0)) {
        throw Error(ErrorCode::separation_violated,
                    "k=" + std::to_string(k) + ", mu_" + std::to_string(i + 1) + " within d_M/4");
      }
      if (first_dense || margin < r.dense_margin) {
        r.dense_margin = margin;
        r.dense_witness = {k, i + 1};
        first_dense = false;
      }
    }
  }
  return r;
}

// Optimal bottleneck between the truncations of A and B at each checkpoint;
// BoundViolated if one falls below d_M / 4.
inline ObstructionCertificate obstruction_bound(const CounterexamplePair& pair,
                                                const std::vector<std::size_t>& checkpoints) {
  check_checkpoints(checkpoints);
  ObstructionCertificate o;
  o.set_name = pair.m.name();
  o.d_m = pair.d_m_value();
  o.bound = number_traits<Rational>::to_double(pair.d_m / 4);
  o.checkpoints = checkpoints;
  const auto xs_all = pair.a.truncation(checkpoints.back());
  const auto ys_all = pair.b.truncation(checkpoints.back());
  o.hash_a = content_hash(xs_all);
  o.hash_b = content_hash(ys_all);
  for (std::size_t n : checkpoints) {
    const std::vector<double> xs(xs_all.begin(), xs_all.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<double> ys(ys_all.begin(), ys_all.begin() + static_cast<std::ptrdiff_t>(n));
    const auto r = optimal_match(xs, ys);
    o.bottlenecks.push_back(r.bottleneck);
    o.methods.push_back(r.method);
    if (r.bottleneck < o.bound - kBoundSlack) {
      throw Error(ErrorCode::bound_violated, "N=" + std::to_string(n) + ": bottleneck " + detail::fmt(r.bottleneck) +
                                                 " below d_M/4 = " + detail::fmt(o.bound));
    }
  }
  if (pair.both_directions) o.warnings.push_back("both half-lines qualify; outliers taken toward +inf");
  return o;
}

}  // namespace wvn
