// wvn: classify closed sets, synthesize diagonal operators, match spectra and
// emit equivalence / obstruction certificates. Exit codes: 0 result emitted,
// 2 inconclusive, 1 error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "wvn/io.hpp"
#include "wvn/oracle.hpp"

namespace {

using namespace wvn;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

struct RunConfig {
  std::vector<std::size_t> checkpoints{256, 1024, 4096};
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + cfg.out + "'");
  f << text;
}

void emit(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

json load_json(const std::string& path) { return parse_json_text(read_text_file(path)); }

bool is_set_spec(const json& j) {
  return j.is_object() && !j.contains("set") && !j.contains("eigenvalues") && !j.contains("matrix") &&
         (j.contains("finite_gaps") || j.contains("tails"));
}

ClosedSet load_set(const std::string& path) { return validate(load_closed_set_spec(path)); }

LoadedOperator load_operator(const std::string& path) {
  const json j = load_json(path);
  if (is_set_spec(j)) {
    ClosedSet m = validate(closed_set_spec_from_json(j));
    return {synth_with_ess_spectrum(m, {}, nullptr, m.name()), m};
  }
  return operator_from_recipe(j, fs::path(path).parent_path());
}

// ---- set -------------------------------------------------------------------

int cmd_set(const std::string& path, const RunConfig& cfg) {
  const ClosedSet m = load_set(path);
  const WvnVerdict v = compute_d_m(m);
  if (cfg.format == "csv") {
    std::string out = "n,truncated_defect\n";
    char buf[96];
    for (const auto& [n, td] : v.convergence) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", n, td);
      out += buf;
    }
    emit(cfg, out);
  } else {
    emit(cfg, verdict_report(m, v));
  }
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthOptions {
  std::string kind = "none";
  double scale = 1.0;
  double power = 1.0;
  std::vector<double> values;
  std::size_t count = 8;
  std::size_t n = 64;
  std::string name;
};

// Uniform in (0, 1] from the top 53 bits: identical on every platform.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>((rng() >> 11U) + 1) * 0x1.0p-53; }

int cmd_synth(const std::string& path, const SynthOptions& o, const RunConfig& cfg) {
  const json j = load_json(path);
  DiagonalOperator op = [&] {
    if (!is_set_spec(j)) return operator_from_recipe(j, fs::path(path).parent_path()).op;
    const ClosedSet m = validate(closed_set_spec_from_json(j));
    const std::string name = o.name.empty() ? (m.name().empty() ? "synth" : m.name()) : o.name;
    if (o.kind == "none") return synth_with_ess_spectrum(m, {}, nullptr, name);
    if (o.kind == "list") return synth_with_ess_spectrum(m, o.values, nullptr, name);
    if (o.kind == "defect") return synth_decaying_defects(m, o.scale, o.power, name);
    // random: `count` outliers at lo + scale * U(0, 1] in the host gap.
    const Gap host = defect_host_gap(m, o.scale);
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> outliers(std::min(o.count, kMaxPairingRow));
    for (auto& v : outliers) v = host.lo.value + o.scale * unit_draw(rng);
    return synth_with_ess_spectrum(m, outliers, nullptr, name);
  }();
  if (cfg.format == "csv") {
    emit(cfg, truncation_csv(op, o.n));
  } else {
    emit(cfg, truncation_to_json(op, o.n));
  }
  return kExitOk;
}

// ---- match -----------------------------------------------------------------

int cmd_match(const std::string& path_a, const std::string& path_b, std::size_t n, const std::string& method,
              const RunConfig& cfg) {
  const auto a = load_operator(path_a);
  const auto b = load_operator(path_b);
  const auto xs = a.op.truncation(n);
  const auto ys = b.op.truncation(n);
  MatchingResult r;
  if (method == "exact") {
    r = optimal_match(xs, ys);
  } else if (method == "sorted") {
    r = sorted_match(xs, ys);
  } else if (method == "threshold-search") {
    r = bottleneck_match(xs, ys);
  } else {
    r = brute_force_match(xs, ys);
  }
  if (cfg.format == "csv") {
    std::string out = "n,x_index,deviation\n";
    char buf[96];
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", i + 1, r.permutation[i] + 1, r.deviations[i]);
      out += buf;
    }
    emit(cfg, out);
  } else {
    json j = to_json(r);
    j["N"] = n;
    j["hashes"] = {{"A", content_hash(xs)}, {"B", content_hash(ys)}};
    emit(cfg, j);
  }
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

CertifyConfig certify_config(const RunConfig& cfg) {
  CertifyConfig c;
  c.checkpoints = cfg.checkpoints;
  c.epsilon = cfg.epsilon;
  return c;
}

int emit_certificate(const Certificate& cert, const RunConfig& cfg, json extra = json::object()) {
  if (cfg.format == "csv") {
    emit(cfg, certificate_csv(cert));
  } else {
    json j = to_json(cert);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    emit(cfg, j);
  }
  for (const auto& w : std::visit([](const auto& c) { return c.warnings; }, cert)) std::cerr << "warning: " << w << "\n";
  return verdict_of(cert) == Verdict::inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_verify(const std::vector<std::string>& inputs, const std::string& set_path, const RunConfig& cfg) {
  if (inputs.size() == 1) {
    const auto pair = counterexample_from_json(load_json(inputs[0]));
    const ClosedSet m = set_path.empty() ? pair.m : load_set(set_path);
    return emit_certificate(certify_equivalence(pair.a, pair.b, m, certify_config(cfg)), cfg);
  }
  if (inputs.size() != 2) throw Error(ErrorCode::invalid_argument, "verify takes pair.json or A.json B.json");
  const auto a = load_operator(inputs[0]);
  const auto b = load_operator(inputs[1]);
  std::optional<ClosedSet> m;
  if (!set_path.empty()) {
    m = load_set(set_path);
  } else if (a.set) {
    m = a.set;
  } else if (b.set) {
    m = b.set;
  }
  if (!m) throw Error(ErrorCode::invalid_argument, "neither operator names a set; pass --set");
  return emit_certificate(certify_equivalence(a.op, b.op, *m, certify_config(cfg)), cfg);
}

// ---- counterexample --------------------------------------------------------

int cmd_counterexample(const std::string& path, std::size_t rows, const std::string& pair_out,
                       const RunConfig& cfg) {
  const ClosedSet m = load_set(path);
  const auto pair = build_counterexample(m, rows);
  const auto conditions = check_lambda_conditions(m, pair.lambdas, pair.d_m, pair.lambdas.size());
  const auto separation = separation_check(pair, pair.rows());
  const auto cert = obstruction_bound(pair, cfg.checkpoints);
  if (!pair_out.empty()) {
    std::ofstream f(pair_out, std::ios::binary);
    if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + pair_out + "'");
    f << to_json(pair).dump(2) << "\n";
  }
  return emit_certificate(Certificate{cert}, cfg,
                          json{{"pair", to_json(pair)},
                               {"conditions", to_json(conditions)},
                               {"separation", to_json(separation)}});
}

// ---- selftest --------------------------------------------------------------

int cmd_selftest(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> g(-3, 3);
  auto draw = [&](std::size_t n, bool grid) {
    std::vector<double> v(n);
    for (auto& x : v) x = grid ? g(rng) * 0.5 : u(rng);
    return v;
  };
  bool all = true;
  auto report = [&](const std::string& what, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    all = all && ok;
  };

  bool ok = true;
  for (std::size_t n = 2; n <= 8; ++n) {
    for (int t = 0; t < 200; ++t) {
      const auto xs = draw(n, t % 2 == 0);
      const auto ys = draw(n, t % 2 == 0);
      ok = ok && bottleneck_match(xs, ys).bottleneck == brute_force_match(xs, ys).bottleneck;
    }
  }
  report("threshold search equals brute force (N = 2..8, 200 each)", ok);

  ok = true;
  for (std::size_t n : {16U, 64U, 256U}) {
    for (int t = 0; t < 200; ++t) {
      const auto xs = draw(n, t % 2 == 0);
      const auto ys = draw(n, t % 2 == 0);
      ok = ok && sorted_match(xs, ys).bottleneck == bottleneck_match(xs, ys).bottleneck;
    }
  }
  report("sorted pairing equals threshold search (N = 16, 64, 256)", ok);

  ok = true;
  for (Index n = 1; n <= (Index{1} << 16U); ++n) {
    const auto p = pairing_decode(n);
    ok = ok && pairing_encode(p.k, p.m) == n;
  }
  report("pairing decode/encode inverse up to 2^16", ok);

  ok = true;
  std::normal_distribution<double> z;
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix h(16);
    for (std::size_t i = 0; i < 16; ++i) {
      h(i, i) = z(rng);
      for (std::size_t k = i + 1; k < 16; ++k) {
        h(i, k) = Complex(z(rng), z(rng));
        h(k, i) = std::conj(h(i, k));
      }
    }
    const auto r = jacobi_diagonalize(h);
    ok = ok && (h - reconstruct(r.transform, r.eigenvalues)).frobenius_norm() <= 1e-10 * h.frobenius_norm();
  }
  report("jacobi reconstruction within 1e-10 (20 matrices, n = 16)", ok);
  return all ? kExitOk : kExitError;
}

std::vector<std::size_t> parse_checkpoints(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorCode::invalid_argument, "bad checkpoint '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  check_checkpoints(out);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weyl-von Neumann equivalence toolkit for diagonal operators"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string checkpoints = "256,1024,4096";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Write the result to this file instead of stdout");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  std::string set_path;
  auto* set = app.add_subcommand("set", "Classify a closed set: d_M, holds, convergence table");
  set->add_option("spec", set_path, "Set description (JSON)")->required()->check(CLI::ExistingFile);
  add_common(set);

  std::string synth_path;
  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Truncation of a synthesized operator");
  synth->add_option("input", synth_path, "Set description or operator recipe (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("-N,--size", so.n, "Truncation size")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24U));
  synth->add_option("--outliers", so.kind, "Outlier kind for a bare set")
      ->check(CLI::IsMember({"none", "list", "defect", "random"}));
  synth->add_option("--scale", so.scale, "Defect scale")->check(CLI::PositiveNumber);
  synth->add_option("--power", so.power, "Defect decay power")->check(CLI::PositiveNumber);
  synth->add_option("--values", so.values, "Outlier values for --outliers list");
  synth->add_option("--count", so.count, "Outlier count for --outliers random");
  synth->add_option("--name", so.name, "Operator name");
  synth->add_option("--seed", cfg.seed, "Seed for --outliers random");
  add_common(synth);

  std::vector<std::string> match_inputs;
  std::size_t match_n = 64;
  std::string match_method = "exact";
  auto* match = app.add_subcommand("match", "Bottleneck matching between two truncations");
  match->add_option("inputs", match_inputs, "A.json B.json")->required()->expected(2)->check(CLI::ExistingFile);
  match->add_option("-N,--size", match_n, "Truncation size")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20U));
  match->add_option("--method", match_method, "Matcher")
      ->check(CLI::IsMember({"exact", "sorted", "threshold-search", "brute-force"}));
  add_common(match);

  std::vector<std::string> verify_inputs;
  std::string verify_set;
  auto* verify = app.add_subcommand("verify", "Equivalence or obstruction certificate");
  verify->add_option("inputs", verify_inputs, "pair.json, or A.json B.json")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingFile);
  verify->add_option("--set", verify_set, "Set M (defaults to the set of A)")->check(CLI::ExistingFile);
  verify->add_option("--checkpoints", checkpoints, "Strictly increasing truncation sizes");
  verify->add_option("--epsilon", cfg.epsilon, "Final tail bound")->check(CLI::PositiveNumber);
  add_common(verify);

  std::string cx_path;
  std::string cx_pair_out;
  std::size_t cx_rows = kMaxPairingRow;
  auto* cx = app.add_subcommand("counterexample", "Build the obstruction pair for a set with d_M > 0");
  cx->add_option("spec", cx_path, "Set description (JSON)")->required()->check(CLI::ExistingFile);
  cx->add_option("-K,--rows", cx_rows, "Outlier rows")->check(CLI::Range(std::size_t{1}, kMaxPairingRow));
  cx->add_option("--checkpoints", checkpoints, "Strictly increasing truncation sizes");
  cx->add_option("--pair-out", cx_pair_out, "Also write the pair JSON here");
  add_common(cx);

  auto* self = app.add_subcommand("selftest", "Run the matching, pairing and eigensolver oracles");
  self->add_option("--seed", cfg.seed, "Seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (cx->parsed() || verify->parsed()) cfg.checkpoints = parse_checkpoints(checkpoints);
    if (set->parsed()) return cmd_set(set_path, cfg);
    if (synth->parsed()) return cmd_synth(synth_path, so, cfg);
    if (match->parsed()) return cmd_match(match_inputs[0], match_inputs[1], match_n, match_method, cfg);
    if (verify->parsed()) return cmd_verify(verify_inputs, verify_set, cfg);
    if (cx->parsed()) return cmd_counterexample(cx_path, cx_rows, cx_pair_out, cfg);
    return cmd_selftest(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
