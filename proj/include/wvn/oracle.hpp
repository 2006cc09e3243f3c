#pragma once

// Exhaustive N! bottleneck search; reference for the fast matchers.

#include <algorithm>
#include <numeric>
#include <vector>

#include "wvn/error.hpp"
#include "wvn/matching.hpp"

namespace wvn {

inline constexpr std::size_t kBruteForceLimit = 10;

inline MatchingResult brute_force_match(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_lengths(xs.size(), ys.size());
  if (xs.size() > kBruteForceLimit) throw Error(ErrorCode::invalid_argument, "brute force is limited to N <= 10");
  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t n = 0; n < ys.size() && cost < best_cost; ++n) cost = std::max(cost, deviation(xs[perm[n]], ys[n]));
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return make_matching(xs, ys, std::move(best), MatchMethod::brute_force);
}

}  // namespace wvn
