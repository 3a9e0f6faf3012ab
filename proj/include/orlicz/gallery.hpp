#pragma once

// Named scenarios loaded from JSON files:
//
//   {"name": ..., "description": ...,
//    "ladder": [k, ...],
//    "young": {<young spec>, "role": "phistar" | "phi"},
//    "sequence": {"generator": ..., "params": {...}},
//    "mode": "cesaro" | "forward_convex",
//    "verdicts": [{"name": ..., "expect": "pass" | "fail", "tolerance": ..., "params": {...}}]}
//
// The sequence is generated on the last (finest) ladder level; the obstruction
// verdict walks the whole ladder.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/config.hpp"
#include "orlicz/estimates.hpp"
#include "orlicz/komlos.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/report.hpp"

#ifndef ORLICZ_SCENARIO_DIR
#define ORLICZ_SCENARIO_DIR "scenarios"
#endif

namespace orlicz::gallery {

using config::json;

struct Verdict {
  std::string name;
  bool expect_pass = true;
  std::optional<double> tolerance;
  json params = json::object();
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<int> ladder;
  json young;
  bool young_is_phi = false;
  YoungFunction phi = young::quadratic(1.0);
  YoungFunction phistar = young::quadratic(1.0);
  json sequence;
  KomlosMode mode = KomlosMode::cesaro;
  std::vector<Verdict> verdicts;
  json raw;
};

struct Generated {
  RvSequence seq;
  std::optional<RandomVariable> truth_limit;
  std::optional<double> analytic_bound;
  std::optional<RandomVariable> zeta0;
  std::optional<double> eps;
};

inline std::string scenario_dir() {
  if (const char* env = std::getenv("ORLICZ_SCENARIO_DIR")) return env;
  return ORLICZ_SCENARIO_DIR;
}

inline Scenario parse_scenario(const json& j) {
  Scenario s;
  s.raw = j;
  s.name = config::require<std::string>(j, "name");
  s.description = config::get_or<std::string>(j, "description", "");
  s.ladder = config::require<std::vector<int>>(j, "ladder");
  if (s.ladder.empty()) fail(ErrorKind::parse, s.name + ": empty ladder");
  s.young = config::require<json>(j, "young");
  s.young_is_phi = config::get_or<std::string>(s.young, "role", "phistar") == "phi";
  if (s.young_is_phi) {
    s.phi = config::young_from_json(s.young);
    s.phistar = conjugate(s.phi);
  } else {
    s.phistar = config::young_from_json(s.young);
    s.phi = conjugate(s.phistar);
  }
  s.sequence = config::require<json>(j, "sequence");
  const auto mode = config::get_or<std::string>(j, "mode", "cesaro");
  if (mode == "cesaro") {
    s.mode = KomlosMode::cesaro;
  } else if (mode == "forward_convex") {
    s.mode = KomlosMode::forward_convex;
  } else {
    fail(ErrorKind::parse, s.name + ": unknown mode '" + mode + "'");
  }
  for (const auto& v : config::require<json>(j, "verdicts")) {
    Verdict vd;
    vd.name = config::require<std::string>(v, "name");
    const auto e = config::get_or<std::string>(v, "expect", "pass");
    if (e != "pass" && e != "fail") fail(ErrorKind::parse, s.name + ": verdict expectation must be pass or fail");
    vd.expect_pass = e == "pass";
    if (v.contains("tolerance")) vd.tolerance = v.at("tolerance").get<double>();
    if (v.contains("params")) vd.params = v.at("params");
    s.verdicts.push_back(std::move(vd));
  }
  return s;
}

inline std::vector<std::string> list_scenarios(const std::string& dir = scenario_dir()) {
  std::vector<std::string> names;
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline Scenario build_scenario(const std::string& name, const std::string& dir = scenario_dir()) {
  const auto names = list_scenarios(dir);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    fail(ErrorKind::registry, "unknown scenario '" + name + "'");
  }
  Scenario s = parse_scenario(config::load_file(dir + "/" + name + ".json"));
  if (s.name != name) fail(ErrorKind::parse, "scenario file " + name + ".json declares name '" + s.name + "'");
  return s;
}

// ---------------------------------------------------------------------------
// Sequence generators

inline Generated generate(const Scenario& s, int k, std::uint64_t seed) {
  const json& g = s.sequence;
  const auto name = config::require<std::string>(g, "generator");
  const json p = g.contains("params") ? g.at("params") : json::object();
  const std::uint64_t sd = config::get_or<std::uint64_t>(p, "seed", seed);
  auto space = DyadicSpace::uniform(k);
  Generated out;
  out.seq.label = s.name;
  if (name == "remark_2_4") {
    const std::size_t terms = std::min<std::size_t>(config::get_or<std::size_t>(p, "terms", k), static_cast<std::size_t>(k));
    out.seq = RvSequence::generate(space, terms, [&](std::size_t n) {
      const double a = std::ldexp(1.0, -static_cast<int>(n));
      return RandomVariable::interval_indicator(space, a, 2 * a, std::sqrt(1.0 / a));
    }, s.name);
    out.truth_limit = RandomVariable::zero(space);
    out.analytic_bound = std::sqrt(M_PI * M_PI / 6.0);
  } else if (name == "constant") {
    const std::size_t terms = config::get_or<std::size_t>(p, "terms", 16);
    const RandomVariable xi = p.contains("rv") ? config::rv_from_json(p.at("rv"), sd)
                                               : config::generated_rv(space, {{"name", "uniform"}, {"params", {{"seed", sd}}}}, sd);
    out.seq = RvSequence::generate(xi.space(), terms, [&](std::size_t) { return xi; }, s.name);
    out.truth_limit = xi;
  } else if (name == "mixed_spikes") {
    const std::size_t terms = config::get_or<std::size_t>(p, "terms", 512);
    if (terms == 0 || terms > space->size()) fail(ErrorKind::input, "mixed_spikes needs 1 <= terms <= 2^k");
    const std::size_t stride = space->size() / terms;
    std::mt19937_64 rng(sd);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> bv(space->size()), zv(space->size());
    for (auto& x : bv) x = d(rng);
    for (auto& x : zv) x = d(rng);
    const RandomVariable b(space, bv), z(space, zv);
    const double spike = std::sqrt(static_cast<double>(space->size()));
    out.seq = RvSequence::generate(space, terms, [&](std::size_t n) {
      std::vector<double> v(space->size(), 0.0);
      v[(n - 1) * stride] = spike;
      return b + z * std::ldexp(1.0, -static_cast<int>(n)) + RandomVariable(space, std::move(v));
    }, s.name);
    out.truth_limit = b;
    // |xi_n| <= |b| + |z|/2 + spike_n, and the Cesaro sup of unit disjoint spikes has L2 norm <= zeta(2)^{1/2}
    const RandomVariable one_spike = [&] {
      std::vector<double> v(space->size(), 0.0);
      v[0] = spike;
      return RandomVariable(space, std::move(v));
    }();
    out.analytic_bound = luxemburg_norm(b.abs() + z.abs() * 0.5, s.phistar).value +
                         luxemburg_norm(one_spike, s.phistar).value * std::sqrt(M_PI * M_PI / 6.0);
  } else if (name == "disjoint_unit") {
    const std::size_t terms = config::get_or<std::size_t>(p, "terms", 64);
    if (terms == 0 || terms > space->size()) fail(ErrorKind::input, "disjoint_unit needs 1 <= terms <= 2^k");
    const std::size_t width = space->size() / terms;
    const double h = std::sqrt(static_cast<double>(space->size()) / static_cast<double>(width));
    out.seq = RvSequence::generate(space, terms, [&](std::size_t n) {
      std::vector<double> v(space->size(), 0.0);
      for (std::size_t a = (n - 1) * width; a < n * width; ++a) v[a] = h;
      return RandomVariable(space, std::move(v));
    }, s.name);
    out.truth_limit = RandomVariable::zero(space);
  } else if (name == "obstruction") {
    const ObstructionInstance inst = obstruction_instance(s.phi, s.phistar, k);
    out.seq.terms = inst.members;
    out.seq.label = s.name;
    out.truth_limit = RandomVariable::zero(space);
    out.zeta0 = inst.zeta0;
    out.eps = inst.eps;
  } else {
    fail(ErrorKind::parse, s.name + ": unknown sequence generator '" + name + "'");
  }
  if (g.contains("norm_bound")) out.seq.norm_bound = g.at("norm_bound").get<double>();
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts

struct RunOptions {
  std::optional<std::vector<int>> ladder;
  std::optional<double> tolerance;
  std::uint64_t seed = 1;
};

struct ScenarioRun {
  std::string name;
  std::vector<report::AssertionResult> results;
  report::ojson payload = report::ojson::object();

  [[nodiscard]] bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.as_declared(); });
  }
};

inline ScenarioRun run_scenario(const Scenario& s, const RunOptions& opts = {}) {
  ScenarioRun run;
  run.name = s.name;
  const std::vector<int> ladder = opts.ladder ? *opts.ladder : s.ladder;
  if (ladder.empty()) fail(ErrorKind::input, "empty ladder");
  const Generated gen = generate(s, ladder.back(), opts.seed);
  std::optional<KomlosCertificate> cert, fwd;
  auto certificate = [&]() -> const KomlosCertificate& {
    if (!cert) cert = komlos_extract(gen.seq, s.phistar, s.mode);
    return *cert;
  };
  auto forward = [&]() -> const KomlosCertificate& {
    if (s.mode == KomlosMode::forward_convex) return certificate();
    if (!fwd) fwd = komlos_extract(gen.seq, s.phistar, KomlosMode::forward_convex);
    return *fwd;
  };
  run.payload["resolution"] = ladder.back();
  run.payload["terms"] = gen.seq.size();

  for (const auto& v : s.verdicts) {
    report::AssertionResult r;
    r.name = v.name;
    r.expected_pass = v.expect_pass;
    auto tol = [&](double fallback) { return v.tolerance ? *v.tolerance : opts.tolerance ? *opts.tolerance : fallback; };
    if (v.name == "unit_l2_norm") {
      r.tolerance = tol(1e-9);
      for (const auto& t : gen.seq.terms) r.value = std::max(r.value, std::abs(luxemburg_norm(t, s.phistar).value - 1.0));
      r.passed = r.value <= r.tolerance;
    } else if (v.name == "l0_null") {
      r.tolerance = tol(0.05);
      const RandomVariable zero = RandomVariable::zero(gen.seq.space());
      bool monotone = true;
      double prev = numeric::kInf;
      for (const auto& t : gen.seq.terms) {
        const double d = l0_metric(t, zero);
        monotone = monotone && d <= prev;
        prev = d;
      }
      r.value = prev;
      r.passed = monotone && r.value <= r.tolerance;
    } else if (v.name == "komlos_certificate") {
      const auto& c = certificate();
      r.passed = c.complete;
      r.value = c.order_bound_norm;
      r.detail = c.complete ? "complete" : "failed at " + c.failing_stage;
      run.payload["certificate"] = report::to_json(c);
    } else if (v.name == "order_bound_norm_le") {
      const auto& c = certificate();
      r.tolerance = tol(1e-9);
      double bound = numeric::kInf;
      const json b = v.params.value("bound", json("analytic"));
      if (b.is_number()) {
        bound = b.get<double>();
      } else if (b == "zeta2") {
        bound = std::sqrt(M_PI * M_PI / 6.0);
      } else if (gen.analytic_bound) {
        bound = *gen.analytic_bound;
      } else {
        fail(ErrorKind::parse, s.name + ": no analytic bound for this generator");
      }
      r.value = c.order_bound_norm;
      r.passed = c.complete && r.value <= bound + r.tolerance;
      r.detail = "bound " + detail::fmt(bound);
    } else if (v.name == "limit_equals") {
      const auto& c = certificate();
      r.tolerance = tol(1e-9);
      if (!gen.truth_limit) fail(ErrorKind::parse, s.name + ": generator has no known limit");
      if (c.combinations.empty()) {
        r.value = numeric::kInf;
      } else {
        r.value = (c.limit - *gen.truth_limit).sup_abs();
      }
      r.passed = r.value <= r.tolerance;
    } else if (v.name == "extraction_trivial") {
      const auto& c = certificate();
      r.passed = c.complete && c.point_masses && c.limit == gen.seq[0] && c.order_bound == gen.seq[0].abs();
      for (const auto& w : c.weights) r.passed = r.passed && w.index.size() == 1;
    } else if (v.name == "obstruction_found") {
      const double floor = v.params.value("floor", 0.25);
      const ObstructionReport rep = non_delta2_counterexample(s.phi, ladder, floor, opts.seed);
      r.tolerance = floor;
      r.value = numeric::kInf;
      for (const auto& l : rep.levels) r.value = std::min(r.value, l.eps);
      r.passed = rep.found;
      r.detail = rep.verdict;
      run.payload["obstruction"] = report::to_json(rep);
    } else if (v.name == "forward_hull_valid") {
      const auto& c = forward();
      r.passed = c.complete && c.forward_valid;
      r.value = static_cast<double>(c.weights.size());
    } else if (v.name == "q_estimate_ratio_one") {
      r.tolerance = tol(1e-9);
      const DisjointFamily fam(gen.seq.terms);
      std::vector<std::size_t> ns;
      for (std::size_t n = 1; n <= fam.size(); n *= 2) ns.push_back(n);
      const double q = v.params.value("q", 2.0);
      const auto rows = q_estimate_trace(fam, s.phi, q, ns);
      report::ojson trace = report::ojson::array();
      for (const auto& row : rows) {
        r.value = std::max(r.value, std::abs(row.ratio - 1.0));
        trace.push_back({row.n, row.lhs, row.rhs, row.ratio});
      }
      r.passed = r.value <= r.tolerance;
      run.payload["q_trace"] = trace;
    } else if (v.name == "cesaro_identity_exact") {
      const DisjointFamily fam(gen.seq.terms);
      const auto rep = cesaro_disjoint_bounds(fam, s.phi, v.params.value("q", 2.0));
      r.passed = rep.identity_exact && rep.bound_holds;
      r.value = rep.fitted_exponent;
    } else {
      fail(ErrorKind::parse, s.name + ": unknown verdict '" + v.name + "'");
    }
    run.results.push_back(std::move(r));
  }
  return run;
}

/// Runs scenarios concurrently; results come back in name order.
inline std::vector<ScenarioRun> run_scenarios(std::vector<std::string> names, const RunOptions& opts = {},
                                              const std::string& dir = scenario_dir()) {
  std::sort(names.begin(), names.end());
  std::vector<Scenario> scenarios;
  for (const auto& n : names) scenarios.push_back(build_scenario(n, dir));
  std::vector<ScenarioRun> out(scenarios.size());
  parallel::for_each_index(scenarios.size(), [&](std::size_t i) { out[i] = run_scenario(scenarios[i], opts); });
  return out;
}

}  // namespace orlicz::gallery
