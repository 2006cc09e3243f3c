#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "wvn/closed_set.hpp"
#include "wvn/error.hpp"

namespace wvn {

using json = nlohmann::json;

namespace detail {

inline json ext_real_to_json(const ExtReal& e) {
  if (e.is_neg_inf()) return "-inf";
  if (e.is_pos_inf()) return "+inf";
  return e.value;
}

inline ExtReal ext_real_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return ExtReal::neg_infinity();
    if (s == "+inf" || s == "inf") return ExtReal::pos_infinity();
    throw Error(ErrorCode::parse_error, "unknown endpoint sentinel '" + s + "'");
  }
  if (!j.is_number()) throw Error(ErrorCode::parse_error, "gap endpoint must be a number or \"-inf\"/\"+inf\"");
  return ExtReal::finite(j.get<double>());
}

inline std::string_view radius_kind_name(RadiusKind k) {
  switch (k) {
    case RadiusKind::constant: return "constant";
    case RadiusKind::harmonic: return "harmonic";
    case RadiusKind::geometric: return "geometric";
    case RadiusKind::table: return "table";
  }
  return "constant";
}

inline RadiusKind radius_kind_from(const std::string& s) {
  if (s == "constant") return RadiusKind::constant;
  if (s == "harmonic") return RadiusKind::harmonic;
  if (s == "geometric") return RadiusKind::geometric;
  if (s == "table") return RadiusKind::table;
  throw Error(ErrorCode::parse_error, "unknown radius kind '" + s + "'");
}

template <class V>
V required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::parse_error, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<V>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("field '") + key + "': " + e.what());
  }
}

// "line L, column C" for a byte offset into `text`.
inline std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline json to_json(const TailRule& t) {
  json radius{{"kind", detail::radius_kind_name(t.kind)}};
  switch (t.kind) {
    case RadiusKind::constant:
    case RadiusKind::harmonic:
      radius["rho"] = t.rho;
      break;
    case RadiusKind::geometric:
      radius["rho"] = t.rho;
      radius["q"] = t.q;
      break;
    case RadiusKind::table:
      radius["table"] = t.table;
      radius["limit"] = t.limit;
      break;
  }
  return json{{"direction", t.direction == Direction::pos_inf ? "+inf" : "-inf"},
              {"center", {{"alpha", t.alpha}, {"beta", t.beta}, {"k0", t.k0}}},
              {"radius", radius}};
}

inline json to_json(const ClosedSetSpec& spec) {
  json gaps = json::array();
  for (const auto& g : spec.finite_gaps) {
    gaps.push_back(json::array({detail::ext_real_to_json(g.lo), detail::ext_real_to_json(g.hi)}));
  }
  json tails = json::array();
  for (const auto& t : spec.tails) tails.push_back(to_json(t));
  return json{{"name", spec.name}, {"finite_gaps", gaps}, {"tails", tails}};
}

inline TailRule tail_rule_from_json(const json& j) {
  TailRule t;
  const auto dir = detail::required<std::string>(j, "direction");
  if (dir == "+inf") {
    t.direction = Direction::pos_inf;
  } else if (dir == "-inf") {
    t.direction = Direction::neg_inf;
  } else {
    throw Error(ErrorCode::parse_error, "tail direction must be \"+inf\" or \"-inf\"");
  }
  const json& center = detail::required<json>(j, "center");
  t.alpha = detail::required<double>(center, "alpha");
  t.beta = center.value("beta", 0.0);
  t.k0 = center.value("k0", std::int64_t{1});
  const json& radius = detail::required<json>(j, "radius");
  t.kind = detail::radius_kind_from(detail::required<std::string>(radius, "kind"));
  switch (t.kind) {
    case RadiusKind::constant:
    case RadiusKind::harmonic:
      t.rho = detail::required<double>(radius, "rho");
      break;
    case RadiusKind::geometric:
      t.rho = detail::required<double>(radius, "rho");
      t.q = detail::required<double>(radius, "q");
      break;
    case RadiusKind::table:
      t.table = detail::required<std::vector<double>>(radius, "table");
      t.limit = detail::required<double>(radius, "limit");
      break;
  }
  return t;
}

inline ClosedSetSpec closed_set_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "set description must be a JSON object");
  ClosedSetSpec spec;
  spec.name = j.value("name", std::string{});
  if (j.contains("finite_gaps")) {
    for (const auto& g : j.at("finite_gaps")) {
      if (!g.is_array() || g.size() != 2) throw Error(ErrorCode::parse_error, "each gap must be [lo, hi]");
      spec.finite_gaps.push_back({detail::ext_real_from_json(g[0]), detail::ext_real_from_json(g[1])});
    }
  }
  if (j.contains("tails")) {
    for (const auto& t : j.at("tails")) spec.tails.push_back(tail_rule_from_json(t));
  }
  return spec;
}

inline json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, detail::line_context(text, e.byte) + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ClosedSetSpec parse_closed_set_spec(std::string_view text) {
  return closed_set_spec_from_json(parse_json_text(text));
}

inline ClosedSetSpec load_closed_set_spec(const std::string& path) {
  return parse_closed_set_spec(read_text_file(path));
}

}  // namespace wvn
