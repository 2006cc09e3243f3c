#pragma once

// JSON and CSV forms of operators, matchings, reports and certificates.
// Doubles go through nlohmann's shortest round-trip formatting, so every
// value re-reads to the identical bit pattern.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wvn/closed_set.hpp"
#include "wvn/closed_set_json.hpp"
#include "wvn/counterexample.hpp"
#include "wvn/equivalence.hpp"
#include "wvn/exact.hpp"
#include "wvn/hole_defect.hpp"
#include "wvn/jacobi.hpp"
#include "wvn/matching.hpp"
#include "wvn/spectra.hpp"

namespace wvn {

inline json verdict_report(const ClosedSet& m, const WvnVerdict& v) {
  json table = json::array();
  for (const auto& [n, td] : v.convergence) table.push_back({{"n", n}, {"truncated_defect", td}});
  return json{{"name", m.name()},
              {"d_M", v.d_m},
              {"exact", v.exact},
              {"holds", v.holds},
              {"consistent", v.consistent},
              {"convergence_tolerance", v.convergence_tolerance},
              {"convergence_radius", v.convergence_radius},
              {"convergence", table}};
}

// ---- operators -------------------------------------------------------------

inline json truncation_to_json(const DiagonalOperator& op, std::size_t n) {
  return json{{"name", op.label()}, {"eigenvalues", op.truncation(n)}};
}

inline std::string truncation_csv(const DiagonalOperator& op, std::size_t n) {
  std::string out = "index,eigenvalue\n";
  char buf[64];
  const auto values = op.truncation(n);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, values[i]);
    out += buf;
  }
  return out;
}

inline DiagonalOperator operator_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "operator must be a JSON object");
  auto values = detail::required<std::vector<double>>(j, "eigenvalues");
  if (values.empty()) throw Error(ErrorCode::parse_error, "operator has no eigenvalues");
  return DiagonalOperator::from_eigenvalues(j.value("name", std::string{"operator"}), std::move(values));
}

// Row-major entries, each [re, im].
inline json matrix_to_json(const std::string& name, const ComplexMatrix& h) {
  json rows = json::array();
  for (std::size_t i = 0; i < h.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < h.size(); ++k) row.push_back({h(i, k).real(), h(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"name", name}, {"matrix", rows}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  const json& rows = detail::required<json>(j, "matrix");
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::parse_error, "matrix must be a non-empty array of rows");
  const std::size_t n = rows.size();
  ComplexMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw Error(ErrorCode::parse_error, "matrix must be square");
    for (std::size_t k = 0; k < n; ++k) {
      const json& e = rows[i][k];
      if (e.is_number()) {
        h(i, k) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        h(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw Error(ErrorCode::parse_error, "matrix entry (" + std::to_string(i + 1) + "," + std::to_string(k + 1) +
                                                ") must be a number or [re, im]");
      }
    }
  }
  return h;
}

// A recipe is one of
//   {"name", "eigenvalues": [...]}                 stored truncation
//   {"name", "matrix": [[[re, im], ...], ...]}      Hermitian matrix, diagonalized
//   {"name", "set": spec | "path.json", "outliers": {"kind": "none" | "list" | "defect", ...}}
// Relative set paths resolve against `base_dir`.
struct LoadedOperator {
  DiagonalOperator op;
  std::optional<ClosedSet> set;
};

inline LoadedOperator operator_from_recipe(const json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "operator recipe must be a JSON object");
  const std::string name = j.value("name", std::string{"synth"});
  if (j.contains("eigenvalues")) return {operator_from_json(j), std::nullopt};
  if (j.contains("matrix")) {
    auto eig = jacobi_diagonalize(matrix_from_json(j));
    return {DiagonalOperator::from_eigenvalues(name, std::move(eig.eigenvalues)), std::nullopt};
  }
  const json& set_j = detail::required<json>(j, "set");
  ClosedSetSpec spec;
  if (set_j.is_string()) {
    spec = load_closed_set_spec((base_dir / set_j.get<std::string>()).string());
  } else {
    spec = closed_set_spec_from_json(set_j);
  }
  ClosedSet m = validate(std::move(spec));
  const json outliers = j.value("outliers", json{{"kind", "none"}});
  const auto kind = outliers.value("kind", std::string{"none"});
  if (kind == "none") return {synth_with_ess_spectrum(m, {}, nullptr, name), m};
  if (kind == "list") {
    return {synth_with_ess_spectrum(m, detail::required<std::vector<double>>(outliers, "values"), nullptr, name), m};
  }
  if (kind == "defect") {
    const double scale = outliers.value("scale", 1.0);
    const double power = outliers.value("power", 1.0);
    return {synth_decaying_defects(m, scale, power, name), m};
  }
  throw Error(ErrorCode::parse_error, "unknown outlier kind '" + kind + "'");
}

// ---- matchings -------------------------------------------------------------

inline MatchMethod match_method_from(const std::string& s) {
  for (auto m : {MatchMethod::sorted, MatchMethod::threshold_search, MatchMethod::brute_force,
                 MatchMethod::tail_refined}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::parse_error, "unknown matching method '" + s + "'");
}

// Permutation entries are 1-based x indices, one per y slot.
inline json to_json(const MatchingResult& r) {
  std::vector<std::size_t> perm(r.permutation.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = r.permutation[i] + 1;
  return json{{"method", to_string(r.method)},
              {"bottleneck", r.bottleneck},
              {"permutation", perm},
              {"deviations", r.deviations}};
}

inline MatchingResult matching_from_json(const json& j) {
  MatchingResult r;
  r.method = match_method_from(detail::required<std::string>(j, "method"));
  r.bottleneck = detail::required<double>(j, "bottleneck");
  r.deviations = detail::required<std::vector<double>>(j, "deviations");
  const auto perm = detail::required<std::vector<std::size_t>>(j, "permutation");
  if (perm.size() != r.deviations.size()) throw Error(ErrorCode::parse_error, "permutation and deviations differ");
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p == 0 || p > perm.size() || seen[p - 1]) throw Error(ErrorCode::parse_error, "permutation is not a bijection");
    seen[p - 1] = true;
    r.permutation.push_back(p - 1);
  }
  return r;
}

// ---- certificates ----------------------------------------------------------

inline json to_json(const EquivalenceCertificate& c) {
  json profile = json::array();
  for (const auto& e : c.profile) {
    profile.push_back({{"N", e.n},
                       {"bottleneck", e.bottleneck},
                       {"tail_bottleneck", e.tail_bottleneck},
                       {"global_method", to_string(e.global_method)},
                       {"tail_method", to_string(e.matching.method)}});
  }
  return json{{"kind", "equivalence"},
              {"verdict", to_string(c.verdict)},
              {"set", c.set_name},
              {"d_M", c.d_m},
              {"epsilon", c.epsilon},
              {"decay_factor", c.decay_factor},
              {"tail_start", "n > N/2"},
              {"checkpoints", c.checkpoints},
              {"bottlenecks", c.bottlenecks},
              {"perturbation_tail", c.perturbation_tail},
              {"profile", profile},
              {"hashes", {{"A", c.hash_a}, {"B", c.hash_b}}},
              {"warnings", c.warnings}};
}

inline json to_json(const ObstructionCertificate& c) {
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  return json{{"kind", "obstruction"},
              {"verdict", to_string(c.verdict)},
              {"set", c.set_name},
              {"d_M", c.d_m},
              {"bound", c.bound},
              {"slack", kBoundSlack},
              {"checkpoints", c.checkpoints},
              {"bottlenecks", c.bottlenecks},
              {"methods", methods},
              {"hashes", {{"A", c.hash_a}, {"B", c.hash_b}}},
              {"warnings", c.warnings}};
}

inline json to_json(const Certificate& c) {
  return std::visit([](const auto& x) { return to_json(x); }, c);
}

// ---- counterexample pairs --------------------------------------------------

inline std::string_view direction_name(Direction d) { return d == Direction::pos_inf ? "+inf" : "-inf"; }

inline json to_json(const CounterexamplePair& p, std::size_t samples = 16) {
  json lambdas = json::array();
  for (const auto& l : p.lambdas) lambdas.push_back(to_string(l));
  samples = std::max<std::size_t>(samples, 1);
  return json{{"kind", "counterexample-pair"},
              {"set", to_json(p.m.spec())},
              {"d_M", to_string(p.d_m)},
              {"direction", direction_name(p.direction)},
              {"both_directions", p.both_directions},
              {"rows", p.rows()},
              {"lambdas", lambdas},
              {"dense", p.dense},
              {"samples", {{"A", p.a.truncation(samples)}, {"B", p.b.truncation(samples)}}}};
}

// Rebuilds the pair from its set and checks every stored value against the
// rebuild, so a loaded pair is always the one the construction produces.
inline CounterexamplePair counterexample_from_json(const json& j) {
  if (j.value("kind", std::string{}) != "counterexample-pair") {
    throw Error(ErrorCode::parse_error, "not a counterexample pair (kind must be \"counterexample-pair\")");
  }
  const ClosedSet m = validate(closed_set_spec_from_json(detail::required<json>(j, "set")));
  auto pair = build_counterexample(m, detail::required<std::size_t>(j, "rows"));
  auto mismatch = [](const std::string& what) {
    return Error(ErrorCode::parse_error, "stored " + what + " differs from the construction");
  };
  if (rational_from_string(detail::required<std::string>(j, "d_M")) != pair.d_m) throw mismatch("d_M");
  if (detail::required<std::string>(j, "direction") != direction_name(pair.direction)) throw mismatch("direction");
  const auto lambdas = detail::required<std::vector<std::string>>(j, "lambdas");
  if (lambdas.size() != pair.lambdas.size()) throw mismatch("lambda count");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (rational_from_string(lambdas[k]) != pair.lambdas[k]) throw mismatch("lambda_" + std::to_string(k + 1));
  }
  if (j.contains("dense") && j.at("dense").get<std::vector<double>>() != pair.dense) throw mismatch("dense part");
  if (j.contains("samples")) {
    const auto& s = j.at("samples");
    for (const auto& [key, op] : {std::pair<const char*, const DiagonalOperator*>{"A", &pair.a}, {"B", &pair.b}}) {
      const auto stored = detail::required<std::vector<double>>(s, key);
      if (stored != op->truncation(stored.size())) throw mismatch(std::string("samples of ") + key);
    }
  }
  return pair;
}

inline json to_json(const LambdaConditions& c) {
  return json{{"first_above_one", c.first_above_one},
              {"doubling", c.doubling},
              {"far_from_set", c.far_from_set},
              {"growth", c.growth},
              {"min_distance_margin", to_string(c.min_distance_margin)}};
}

inline json to_json(const SeparationReport& r) {
  return json{{"kmax", r.kmax},
              {"adjacent_error", to_string(r.adjacent_error)},
              {"outlier_margin", to_string(r.outlier_margin)},
              {"outlier_witness", {r.outlier_witness.first, r.outlier_witness.second}},
              {"dense_margin", to_string(r.dense_margin)},
              {"dense_witness", {r.dense_witness.first, r.dense_witness.second}}};
}

}  // namespace wvn
