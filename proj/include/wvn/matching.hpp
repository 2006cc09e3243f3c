#pragma once

// Bottleneck matching between two equal-size multisets of reals.
//
// Conventions: permutation[n] is the (0-based) index into xs paired with
// ys[n]; deviations[n] = |xs[permutation[n]] - ys[n]|.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wvn/error.hpp"
#include "wvn/spectra.hpp"

namespace wvn {

enum class MatchMethod : std::uint8_t { sorted, threshold_search, brute_force, tail_refined };

inline std::string_view to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::sorted: return "sorted";
    case MatchMethod::threshold_search: return "threshold-search";
    case MatchMethod::brute_force: return "brute-force";
    case MatchMethod::tail_refined: return "tail-refined";
  }
  return "sorted";
}

struct MatchingResult {
  std::vector<std::size_t> permutation;
  std::vector<double> deviations;
  double bottleneck = 0.0;
  MatchMethod method = MatchMethod::sorted;
};

// The exact threshold search is used up to this size; beyond it the sorted
// pairing, which is optimal on the line, stands in.
inline constexpr std::size_t kExactMatcherLimit = 2048;

inline double deviation(double x, double y) { return std::abs(x - y); }

inline void check_lengths(std::size_t nx, std::size_t ny) {
  if (nx != ny) {
    throw Error(ErrorCode::length_mismatch, std::to_string(nx) + " vs " + std::to_string(ny) + " eigenvalues");
  }
  if (nx == 0) throw Error(ErrorCode::invalid_argument, "matching needs at least one eigenvalue");
}

inline MatchingResult make_matching(const std::vector<double>& xs, const std::vector<double>& ys,
                                    std::vector<std::size_t> permutation, MatchMethod method) {
  MatchingResult r;
  r.permutation = std::move(permutation);
  r.method = method;
  r.deviations.resize(ys.size());
  for (std::size_t n = 0; n < ys.size(); ++n) {
    r.deviations[n] = deviation(xs[r.permutation[n]], ys[n]);
    r.bottleneck = std::max(r.bottleneck, r.deviations[n]);
  }
  return r;
}

namespace detail {

inline std::vector<std::size_t> stable_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

// Sorted x values with their original indices. The x's within cap of y form
// a contiguous run [first, last) because rounding of x - y is monotone in x.
struct SortedLine {
  std::vector<std::size_t> order;
  std::vector<double> values;

  explicit SortedLine(const std::vector<double>& xs) : order(stable_order(xs)) {
    values.reserve(xs.size());
    for (std::size_t i : order) values.push_back(xs[i]);
  }

  std::pair<std::size_t, std::size_t> window(double y, double cap) const {
    const auto first = std::partition_point(values.begin(), values.end(),
                                            [&](double x) { return x < y && deviation(x, y) > cap; });
    const auto last = std::partition_point(first, values.end(),
                                           [&](double x) { return x <= y || deviation(x, y) <= cap; });
    return {static_cast<std::size_t>(first - values.begin()), static_cast<std::size_t>(last - values.begin())};
  }
};

// Hopcroft-Karp on the graph y_n -- x (|x - y_n| <= t), with each y's
// neighbours a contiguous run of the sorted line. Returns the matching
// (sorted position per y) when it is perfect.
inline std::optional<std::vector<std::size_t>> perfect_matching_within(const SortedLine& line,
                                                                       const std::vector<double>& ys, double t) {
  const std::size_t n = ys.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::pair<std::size_t, std::size_t>> adj(n);
  for (std::size_t j = 0; j < n; ++j) {
    adj[j] = line.window(ys[j], t);
    if (adj[j].first == adj[j].second) return std::nullopt;
  }
  std::vector<std::size_t> match_y(n, kNone);
  std::vector<std::size_t> match_x(n, kNone);
  std::vector<std::size_t> dist(n);
  std::vector<std::size_t> cursor(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);

  // Greedy start: lowest free x in each run.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t x = adj[j].first; x < adj[j].second; ++x) {
      if (match_x[x] == kNone) {
        match_x[x] = j;
        match_y[j] = x;
        break;
      }
    }
  }

  auto bfs = [&] {
    queue.clear();
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (match_y[j] == kNone) {
        dist[j] = 0;
        queue.push_back(j);
      } else {
        dist[j] = kNone;
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t j = queue[head];
      for (std::size_t x = adj[j].first; x < adj[j].second; ++x) {
        const std::size_t k = match_x[x];
        if (k == kNone) {
          found = true;
        } else if (dist[k] == kNone) {
          dist[k] = dist[j] + 1;
          queue.push_back(k);
        }
      }
    }
    return found;
  };

  // Iterative layered DFS; cursor[j] remembers the next x to try from j.
  std::vector<std::size_t> stack;
  auto augment = [&](std::size_t root) {
    stack.assign(1, root);
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      bool advanced = false;
      for (; cursor[j] < adj[j].second; ++cursor[j]) {
        const std::size_t x = cursor[j];
        const std::size_t k = match_x[x];
        if (k == kNone) {
          // Flip the path root .. j .. x.
          std::size_t free_x = x;
          for (std::size_t s = stack.size(); s-- > 0;) {
            const std::size_t yj = stack[s];
            const std::size_t prev = match_y[yj];
            match_y[yj] = free_x;
            match_x[free_x] = yj;
            free_x = prev;
          }
          return true;
        }
        if (dist[k] == dist[j] + 1) {
          ++cursor[j];
          stack.push_back(k);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        dist[j] = kNone;
        stack.pop_back();
      }
    }
    return false;
  };

  std::size_t matched = static_cast<std::size_t>(std::count_if(match_y.begin(), match_y.end(),
                                                               [&](std::size_t v) { return v != kNone; }));
  while (matched < n && bfs()) {
    for (std::size_t j = 0; j < n; ++j) cursor[j] = adj[j].first;
    for (std::size_t j = 0; j < n; ++j) {
      if (match_y[j] == kNone && augment(j)) ++matched;
    }
  }
  if (matched < n) return std::nullopt;
  return match_y;
}

// Glover's greedy for convex bipartite graphs: y_n may use sorted positions
// within caps[n] of it. Scanning positions left to right and giving each to
// the waiting y whose run ends first yields a perfect matching iff one
// exists. Returns the sorted position per y.
inline std::optional<std::vector<std::size_t>> greedy_matching_within(const SortedLine& line,
                                                                      const std::vector<double>& ys,
                                                                      const std::vector<double>& caps) {
  const std::size_t n = ys.size();
  std::vector<std::pair<std::size_t, std::size_t>> run(n);
  for (std::size_t j = 0; j < n; ++j) {
    run[j] = line.window(ys[j], caps[j]);
    if (run[j].first == run[j].second) return std::nullopt;
  }
  std::vector<std::size_t> by_start(n);
  std::iota(by_start.begin(), by_start.end(), 0);
  std::stable_sort(by_start.begin(), by_start.end(),
                   [&](std::size_t a, std::size_t b) { return run[a].first < run[b].first; });
  using Entry = std::pair<std::size_t, std::size_t>;  // (run end, y index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> waiting;
  std::vector<std::size_t> assigned(n);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    while (next < n && run[by_start[next]].first <= pos) {
      waiting.emplace(run[by_start[next]].second, by_start[next]);
      ++next;
    }
    if (waiting.empty() || waiting.top().first <= pos) return std::nullopt;
    assigned[waiting.top().second] = pos;
    waiting.pop();
  }
  return assigned;
}

inline std::vector<std::size_t> to_permutation(const SortedLine& line, const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> perm(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) perm[j] = line.order[positions[j]];
  return perm;
}

inline std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }
inline double from_bits(std::uint64_t b) { return std::bit_cast<double>(b); }

}  // namespace detail

// i-th smallest x with i-th smallest y; ties keep input order.
inline MatchingResult sorted_match(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_lengths(xs.size(), ys.size());
  const auto xo = detail::stable_order(xs);
  const auto yo = detail::stable_order(ys);
  std::vector<std::size_t> perm(ys.size());
  for (std::size_t i = 0; i < yo.size(); ++i) perm[yo[i]] = xo[i];
  return make_matching(xs, ys, std::move(perm), MatchMethod::sorted);
}

// Minimises max_n |x_perm[n] - y_n| exactly: binary search over the N^2
// candidate values |x_i - y_j|, each tested by Hopcroft-Karp.
inline MatchingResult bottleneck_match(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_lengths(xs.size(), ys.size());
  const detail::SortedLine line(xs);
  std::vector<double> candidates;
  candidates.reserve(xs.size() * ys.size());
  for (double x : xs) {
    for (double y : ys) candidates.push_back(deviation(x, y));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  // The largest candidate always admits a perfect matching.
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  std::vector<std::size_t> best = *detail::perfect_matching_within(line, ys, candidates[hi]);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (auto m = detail::perfect_matching_within(line, ys, candidates[mid])) {
      best = std::move(*m);
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return make_matching(xs, ys, detail::to_permutation(line, best), MatchMethod::threshold_search);
}

// Among permutations with every deviation <= head_cap, one minimising the
// largest deviation at y-indices >= tail_begin. head_cap must be feasible
// (e.g. the optimal bottleneck).
inline MatchingResult tail_refined_match(const std::vector<double>& xs, const std::vector<double>& ys,
                                         std::size_t tail_begin, double head_cap) {
  check_lengths(xs.size(), ys.size());
  const detail::SortedLine line(xs);
  std::vector<double> caps(ys.size(), head_cap);
  auto feasible = [&](double t) {
    for (std::size_t j = tail_begin; j < ys.size(); ++j) caps[j] = std::min(t, head_cap);
    return detail::greedy_matching_within(line, ys, caps);
  };
  auto best = feasible(head_cap);
  if (!best) throw Error(ErrorCode::invalid_argument, "head cap admits no perfect matching");
  // Non-negative doubles order like their bit patterns: bisect on those.
  if (auto zero = feasible(0.0)) {
    best = std::move(zero);
  } else {
    std::uint64_t lo = detail::bits(0.0);
    std::uint64_t hi = detail::bits(head_cap);
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (auto m = feasible(detail::from_bits(mid))) {
        best = std::move(m);
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  return make_matching(xs, ys, detail::to_permutation(line, *best), MatchMethod::tail_refined);
}

// Largest deviation among y-indices >= tail_begin.
inline double tail_max(const MatchingResult& m, std::size_t tail_begin) {
  double t = 0.0;
  for (std::size_t j = tail_begin; j < m.deviations.size(); ++j) t = std::max(t, m.deviations[j]);
  return t;
}

struct TailProfileEntry {
  std::size_t n = 0;
  double bottleneck = 0.0;       // optimal max deviation
  double tail_bottleneck = 0.0;  // optimal tail deviation among optimal matchings
  MatchMethod global_method = MatchMethod::threshold_search;
  MatchingResult matching;       // realises both values
};

// 1-based indices n > N/2 are the tail.
inline std::size_t tail_start(std::size_t n) { return n / 2; }

inline TailProfileEntry tail_profile_at(const std::vector<double>& xs, const std::vector<double>& ys) {
  TailProfileEntry e;
  e.n = ys.size();
  const MatchingResult global = e.n <= kExactMatcherLimit ? bottleneck_match(xs, ys) : sorted_match(xs, ys);
  e.global_method = global.method;
  e.bottleneck = global.bottleneck;
  e.matching = tail_refined_match(xs, ys, tail_start(e.n), global.bottleneck);
  e.tail_bottleneck = tail_max(e.matching, tail_start(e.n));
  return e;
}

inline void check_checkpoints(const std::vector<std::size_t>& checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorCode::invalid_argument, "at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "checkpoints must be positive and strictly increasing");
    }
  }
}

inline std::vector<TailProfileEntry> tail_matching_profile(const DiagonalOperator& a, const DiagonalOperator& b,
                                                           const std::vector<std::size_t>& checkpoints) {
  check_checkpoints(checkpoints);
  std::vector<TailProfileEntry> out;
  for (std::size_t n : checkpoints) out.push_back(tail_profile_at(a.truncation(n), b.truncation(n)));
  return out;
}

}  // namespace wvn
