#pragma once

#include <string>

#include "wvn/closed_set.hpp"
#include "wvn/closed_set_json.hpp"

namespace wvn::testing {

inline ClosedSetSpec fixture_spec(const std::string& name) {
  return load_closed_set_spec(std::string(WVN_FIXTURE_DIR) + "/" + name + ".json");
}

inline ClosedSet fixture(const std::string& name) { return validate(fixture_spec(name)); }

inline ClosedSet set_from_gaps(std::initializer_list<std::pair<ExtReal, ExtReal>> gaps) {
  ClosedSetSpec spec;
  for (const auto& [lo, hi] : gaps) spec.finite_gaps.push_back({lo, hi});
  return validate(std::move(spec));
}

inline ExtReal fin(double v) { return ExtReal::finite(v); }
inline constexpr ExtReal kNegInf = ExtReal::neg_infinity();
inline constexpr ExtReal kPosInf = ExtReal::pos_infinity();

}  // namespace wvn::testing
