// orlicz_lab: command-line front end. Every command prints (or writes) a RunReport as JSON.
//
// Exit status: 0 all verdicts as declared, 1 a verdict failed, 2 parse error,
// 3 unknown scenario, 4 solver consistency error, 5 anything else.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "orlicz/orlicz.hpp"

namespace {

using namespace orlicz;
using config::json;
using report::AssertionResult;
using report::ojson;
using report::RunReport;

struct Flags {
  std::string config;
  std::string out;
  std::string csv;
  std::string ladder;
  std::string scenario;
  std::string mode;
  std::string scenario_dir;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  std::vector<std::string> names;
};

struct Outcome {
  RunReport report;
  std::string csv;
};

std::vector<int> parse_ladder(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size() || out.back() < 0) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorKind::parse, "bad ladder entry '" + tok + "'");
    }
  }
  if (out.empty()) fail(ErrorKind::parse, "empty ladder");
  return out;
}

class Context {
 public:
  explicit Context(const Flags& f) : flags_(f) {
    if (!f.config.empty()) {
      cfg_ = config::load_file(f.config);
      base_ = std::filesystem::path(f.config).parent_path();
    } else {
      cfg_ = json::object();
    }
  }

  [[nodiscard]] const json& cfg() const { return cfg_; }
  [[nodiscard]] const Flags& flags() const { return flags_; }
  [[nodiscard]] double tol(double fallback) const { return flags_.tol.value_or(config::get_or<double>(cfg_, "tolerance", fallback)); }
  [[nodiscard]] std::uint64_t seed() const { return config::get_or<std::uint64_t>(cfg_, "seed", flags_.seed); }

  // A field holding either an inline object or a path to a JSON file.
  [[nodiscard]] json resolve(const json& j) const {
    if (!j.is_string()) return j;
    std::filesystem::path p(j.get<std::string>());
    if (p.is_relative()) p = base_ / p;
    return config::load_file(p.string());
  }

  [[nodiscard]] json field(const char* key) const {
    if (!cfg_.contains(key)) fail(ErrorKind::parse, std::string("config needs '") + key + "'");
    return resolve(cfg_.at(key));
  }

  [[nodiscard]] json field_or(const char* key, json fallback) const {
    return cfg_.contains(key) ? resolve(cfg_.at(key)) : std::move(fallback);
  }

  // (phi, phistar) from "young"; the spec's "role" says which side it describes.
  [[nodiscard]] std::pair<YoungFunction, YoungFunction> young_pair() const {
    const json y = field_or("young", json{{"kind", "quadratic"}, {"parameters", {{"a", 1.0}}}});
    const YoungFunction f = config::young_from_json(y);
    if (config::get_or<std::string>(y, "role", "phistar") == "phi") return {f, conjugate(f)};
    return {conjugate(f), f};
  }

  [[nodiscard]] std::string scenario_dir() const {
    return flags_.scenario_dir.empty() ? gallery::scenario_dir() : flags_.scenario_dir;
  }

  [[nodiscard]] gallery::Scenario scenario() const {
    if (!flags_.scenario.empty()) return gallery::build_scenario(flags_.scenario, scenario_dir());
    if (cfg_.contains("verdicts")) return gallery::parse_scenario(cfg_);
    if (cfg_.contains("scenario")) {
      const json s = cfg_.at("scenario");
      if (s.is_string() && !s.get<std::string>().ends_with(".json")) return gallery::build_scenario(s.get<std::string>(), scenario_dir());
      return gallery::parse_scenario(resolve(s));
    }
    fail(ErrorKind::parse, "no scenario given (--scenario NAME or a scenario config)");
  }

  [[nodiscard]] std::vector<int> ladder(const std::vector<int>& fallback) const {
    return flags_.ladder.empty() ? fallback : parse_ladder(flags_.ladder);
  }

 private:
  Flags flags_;
  json cfg_;
  std::filesystem::path base_;
};

AssertionResult check(std::string name, bool passed, double value, double tolerance, std::string detail = {}) {
  AssertionResult a;
  a.name = std::move(name);
  a.passed = passed;
  a.value = value;
  a.tolerance = tolerance;
  a.detail = std::move(detail);
  return a;
}

// Disjoint blocks: {"k": 10, "terms": 64, "heights": "normalized" | "unit" | "random"}.
DisjointFamily family_from(const Context& ctx, const YoungFunction& phistar) {
  if (ctx.cfg().contains("scenario") || !ctx.flags().scenario.empty()) {
    const auto s = ctx.scenario();
    return DisjointFamily(gallery::generate(s, ctx.ladder(s.ladder).back(), ctx.seed()).seq.terms);
  }
  const json f = ctx.field_or("family", json::object());
  const int k = config::get_or<int>(f, "k", 10);
  const auto space = DyadicSpace::uniform(k);
  const std::size_t terms = config::get_or<std::size_t>(f, "terms", 64);
  if (terms == 0 || terms > space->size()) fail(ErrorKind::input, "family needs 1 <= terms <= 2^k");
  const std::size_t width = space->size() / terms;
  const auto heights = config::get_or<std::string>(f, "heights", "normalized");
  std::mt19937_64 rng(ctx.seed());
  std::uniform_real_distribution<double> d(0.5, 2.0);
  std::vector<RandomVariable> members;
  for (std::size_t n = 0; n < terms; ++n) {
    std::vector<double> v(space->size(), 0.0);
    for (std::size_t a = n * width; a < (n + 1) * width; ++a) v[a] = 1.0;
    RandomVariable m(space, std::move(v));
    if (heights == "normalized") {
      m = m / luxemburg_norm(m, phistar).value;
    } else if (heights == "random") {
      m = m * d(rng);
    } else if (heights != "unit") {
      fail(ErrorKind::parse, "unknown family heights '" + heights + "'");
    }
    members.push_back(std::move(m));
  }
  return DisjointFamily(std::move(members));
}

Outcome cmd_norm(const Context& ctx) {
  Outcome o;
  const RandomVariable xi = config::rv_from_json(ctx.field("rv"), ctx.seed());
  const YoungFunction y = config::young_from_json(ctx.field_or("young", json{{"kind", "quadratic"}, {"parameters", {{"a", 1.0}}}}));
  const auto kind = config::get_or<std::string>(ctx.cfg(), "norm", "luxemburg");
  NormResult r;
  if (kind == "luxemburg") {
    r = luxemburg_norm(xi, y);
  } else if (kind == "dual") {
    NormOptions no;
    if (ctx.flags().tol) no.tolerance = *ctx.flags().tol;
    r = dual_orlicz_norm(xi, conjugate(y), y, no);
  } else {
    fail(ErrorKind::parse, "norm must be luxemburg or dual");
  }
  r.witness.reset();
  o.report.payload = report::to_json(r);
  o.report.results.push_back(check("norm_nonnegative", r.value >= 0.0 && std::isfinite(r.value), r.value, 0.0));
  if (ctx.cfg().contains("expect")) {
    const double e = ctx.cfg().at("expect").get<double>();
    const double t = ctx.tol(1e-9);
    o.report.results.push_back(check("norm_matches_expected", std::abs(r.value - e) <= t, std::abs(r.value - e), t));
  }
  return o;
}

Outcome cmd_conjugate(const Context& ctx) {
  Outcome o;
  const YoungFunction phi = config::young_from_json(ctx.field("young"));
  const auto range = config::get_or<std::vector<double>>(ctx.cfg(), "range", {0.0, 20.0});
  const std::size_t points = config::get_or<std::size_t>(ctx.cfg(), "points", 201);
  if (range.size() != 2 || !(range[1] > range[0]) || points < 2) fail(ErrorKind::parse, "range must be [lo, hi] with lo < hi");
  const YoungFunction numeric_star = numeric_conjugate(phi);
  const auto closed = phi.closed_form_conjugate();
  std::vector<std::vector<double>> rows;
  double err = 0.0, bierr = 0.0;
  std::optional<YoungFunction> bi;
  if (closed) bi = numeric_conjugate(numeric_star);
  ojson pts = ojson::array();
  for (std::size_t i = 0; i < points; ++i) {
    const double y = range[0] + (range[1] - range[0]) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = numeric_star(y);
    std::vector<double> row{y, v};
    if (closed) {
      const double c = (*closed)(y);
      err = std::max(err, std::abs(v - c) / std::max(1.0, std::abs(c)));
      const double b = (*bi)(y);
      bierr = std::max(bierr, std::abs(b - phi(y)) / std::max(1.0, std::abs(phi(y))));
      row.push_back(c);
    }
    pts.push_back(row);
    rows.push_back(std::move(row));
  }
  o.report.payload["label"] = phi.label();
  o.report.payload["closed_form"] = closed.has_value();
  o.report.payload["points"] = pts;
  if (closed) {
    const double t = ctx.tol(1e-6);
    o.report.results.push_back(check("numeric_matches_closed_form", err <= t, err, t));
    o.report.results.push_back(check("biconjugate_recovers_phi", bierr <= 2.0 * t, bierr, 2.0 * t));
    o.csv = report::csv({"y", "numeric", "closed_form"}, rows);
  } else {
    o.csv = report::csv({"y", "numeric"}, rows);
  }
  return o;
}

Outcome cmd_delta2(const Context& ctx) {
  Outcome o;
  const YoungFunction phi = config::young_from_json(ctx.field("young"));
  const Delta2Report r = delta2_index(phi);
  o.report.payload = report::to_json(r);
  if (ctx.cfg().contains("expect_p")) {
    const double t = ctx.tol(1e-6);
    const double e = ctx.cfg().at("expect_p").get<double>();
    o.report.results.push_back(check("p_phi_matches", std::abs(r.p_phi - e) <= t, r.p_phi, t));
  }
  if (ctx.cfg().contains("expect_delta2")) {
    const bool e = ctx.cfg().at("expect_delta2").get<bool>();
    o.report.results.push_back(check("delta2_classification", r.is_delta2 == e, r.is_delta2 ? 1.0 : 0.0, 0.0));
  }
  std::vector<std::vector<double>> rows;
  for (auto [x, p] : r.p_phi_of_x) rows.push_back({x, p});
  o.csv = report::csv({"x", "p_phi"}, rows);
  return o;
}

Outcome cmd_q_estimate(const Context& ctx) {
  Outcome o;
  const auto [phi, phistar] = ctx.young_pair();
  const DisjointFamily fam = family_from(ctx, phistar);
  const double q = config::get_or<double>(ctx.cfg(), "q", 2.0);
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n < fam.size(); n *= 2) ns.push_back(n);
  ns.push_back(fam.size());
  const auto rows = q_estimate_trace(fam, phi, q, ns);
  std::vector<std::vector<double>> table;
  ojson trace = ojson::array();
  double lo = numeric::kInf, hi = 0.0, dev = 0.0;
  const std::size_t n_min = config::get_or<std::size_t>(ctx.cfg(), "stable_from", 4);
  for (const auto& r : rows) {
    table.push_back({static_cast<double>(r.n), r.lhs, r.rhs, r.ratio});
    trace.push_back({{"n", r.n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
    if (r.n >= n_min) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
  }
  o.report.payload["q"] = q;
  o.report.payload["trace"] = trace;
  const double spread = lo > 0.0 && std::isfinite(lo) ? hi / lo - 1.0 : 0.0;
  o.report.results.push_back(check("ratio_stable", spread <= 0.05, spread, 0.05));
  if (ctx.cfg().contains("expect_ratio")) {
    const double e = ctx.cfg().at("expect_ratio").get<double>();
    const double t = ctx.tol(1e-6);
    for (const auto& r : rows) dev = std::max(dev, std::abs(r.ratio - e));
    o.report.results.push_back(check("ratio_matches_expected", dev <= t, dev, t));
  }
  o.csv = report::csv({"n", "lhs", "rhs", "ratio"}, table);
  return o;
}

Outcome cmd_cesaro(const Context& ctx) {
  Outcome o;
  const auto [phi, phistar] = ctx.young_pair();
  const DisjointFamily fam = family_from(ctx, phistar);
  const double q = config::get_or<double>(ctx.cfg(), "q", 2.0);
  const CesaroReport r = cesaro_disjoint_bounds(fam, phi, q);
  o.report.payload["q"] = q;
  o.report.payload["fitted_exponent"] = r.fitted_exponent;
  o.report.payload["expected_exponent"] = r.expected_exponent;
  o.report.payload["sup_norm"] = r.sup_norm;
  o.report.payload["bound"] = r.bound;
  o.report.payload["mean_norms"] = r.mean_norms;
  o.report.results.push_back(check("sup_identity_exact", r.identity_exact, (r.sup_direct - r.sup_identity).sup_abs(), 0.0));
  o.report.results.push_back(check("sup_norm_within_bound", r.bound_holds, r.sup_norm, r.bound));
  const double t = ctx.tol(0.05);
  const double gap = std::abs(r.fitted_exponent - r.expected_exponent);
  o.report.results.push_back(check("decay_exponent", gap <= t, r.fitted_exponent, t));
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < r.mean_norms.size(); ++n) rows.push_back({static_cast<double>(n + 1), r.mean_norms[n]});
  o.csv = report::csv({"n", "mean_norm"}, rows);
  return o;
}

Outcome cmd_holder(const Context& ctx) {
  Outcome o;
  const auto [phi, phistar] = ctx.young_pair();
  std::vector<std::pair<RandomVariable, RandomVariable>> pairs;
  if (ctx.cfg().contains("eta") || ctx.cfg().contains("xi")) {
    pairs.emplace_back(config::rv_from_json(ctx.field("eta"), ctx.seed()), config::rv_from_json(ctx.field("xi"), ctx.seed() + 1));
  } else {
    const std::size_t count = config::get_or<std::size_t>(ctx.cfg(), "fixtures", 50);
    const int k = config::get_or<int>(ctx.cfg(), "k", 4);
    const auto space = DyadicSpace::uniform(k);
    std::mt19937_64 rng(ctx.seed());
    std::normal_distribution<double> d;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> a(space->size()), b(space->size());
      for (auto& x : a) x = d(rng);
      for (auto& x : b) x = d(rng);
      pairs.emplace_back(RandomVariable(space, std::move(a)), RandomVariable(space, std::move(b)));
    }
  }
  std::vector<HolderReport> reps(pairs.size());
  parallel::for_each_index(pairs.size(), [&](std::size_t i) { reps[i] = holder_check(pairs[i].first, pairs[i].second, phi); });
  const double t = ctx.tol(1e-9);
  double worst = numeric::kInf;
  std::vector<std::vector<double>> rows;
  for (const auto& r : reps) {
    worst = std::min(worst, r.slack / (1.0 + std::abs(r.rhs)));
    rows.push_back({r.lhs, r.rhs, r.slack});
  }
  o.report.payload["fixtures"] = reps.size();
  o.report.payload["min_relative_slack"] = worst;
  o.report.results.push_back(check("holder_inequality", worst >= -t, worst, t));
  o.csv = report::csv({"lhs", "rhs", "slack"}, rows);
  return o;
}

Outcome cmd_ui(const Context& ctx) {
  Outcome o;
  const auto [phi, phistar] = ctx.young_pair();
  RvSequence seq;
  if (ctx.cfg().contains("scenario") || !ctx.flags().scenario.empty() || ctx.cfg().contains("verdicts")) {
    const auto s = ctx.scenario();
    seq = gallery::generate(s, ctx.ladder(s.ladder).back(), ctx.seed()).seq;
  } else {
    seq.terms = family_from(ctx, phistar).members();
  }
  const KpSplit split = kp_split(seq, phistar);
  ojson profile = ojson::array();
  std::vector<std::vector<double>> rows;
  bool monotone = true;
  double prev = numeric::kInf;
  for (auto [level, m] : split.ui_profile) {
    profile.push_back({{"level", level}, {"modulus", m}});
    rows.push_back({level, m});
    monotone = monotone && m <= prev;
    prev = m;
  }
  o.report.payload["budget_met"] = split.budget_met;
  o.report.payload["has_singular"] = split.has_singular();
  o.report.payload["ui_profile"] = profile;
  const double t = ctx.tol(1e-9);
  o.report.results.push_back(check("ui_profile_nonincreasing", monotone, prev, 0.0));
  o.report.results.push_back(check("regular_part_ui", prev <= t, prev, t));
  o.csv = report::csv({"level", "modulus"}, rows);
  return o;
}

Outcome cmd_komlos(const Context& ctx) {
  Outcome o;
  gallery::Scenario s = ctx.scenario();
  if (!ctx.flags().mode.empty()) {
    if (ctx.flags().mode == "cesaro") {
      s.mode = KomlosMode::cesaro;
    } else if (ctx.flags().mode == "forward_convex") {
      s.mode = KomlosMode::forward_convex;
    } else {
      fail(ErrorKind::parse, "mode must be cesaro or forward_convex");
    }
  }
  static const std::vector<std::string> kKomlos = {"komlos_certificate", "order_bound_norm_le", "limit_equals",
                                                   "extraction_trivial", "forward_hull_valid"};
  std::vector<gallery::Verdict> kept;
  bool has_cert = false;
  for (const auto& v : s.verdicts) {
    if (std::find(kKomlos.begin(), kKomlos.end(), v.name) == kKomlos.end()) continue;
    has_cert = has_cert || v.name == "komlos_certificate";
    kept.push_back(v);
  }
  if (!has_cert) kept.insert(kept.begin(), gallery::Verdict{"komlos_certificate", true, std::nullopt, json::object()});
  s.verdicts = std::move(kept);
  gallery::RunOptions ro;
  ro.seed = ctx.seed();
  ro.tolerance = ctx.flags().tol;
  if (!ctx.flags().ladder.empty()) ro.ladder = parse_ladder(ctx.flags().ladder);
  gallery::ScenarioRun run = gallery::run_scenario(s, ro);
  o.report.results = run.results;
  o.report.payload = run.payload.value("certificate", ojson::object());
  o.report.payload["scenario"] = s.name;
  std::vector<std::vector<double>> rows;
  const auto trace = o.report.payload.value("metric_trace", std::vector<double>{});
  for (std::size_t i = 0; i < trace.size(); ++i) rows.push_back({static_cast<double>(i + 1), trace[i]});
  o.csv = report::csv({"step", "l0_to_limit"}, rows);
  return o;
}

Outcome cmd_risk(const Context& ctx) {
  Outcome o;
  const MonetaryUtility u = config::utility_from_json(ctx.field_or("utility", json{{"name", "entropic"}, {"gamma", 1.0}}));
  const RandomVariable xi = config::rv_from_json(ctx.field("position"), ctx.seed());
  DualCheckOptions dopts;
  dopts.use_closed_form = config::get_or<bool>(ctx.cfg(), "use_closed_form", false);
  dopts.mesh_level = config::get_or<int>(ctx.cfg(), "mesh_level", dopts.mesh_level);
  const DualCheckReport dual = dual_representation_check(u, xi, {}, dopts);
  const double t = ctx.tol(1e-8);

  // Monotone chains through the position along seeded nonnegative directions.
  const std::size_t chains = config::get_or<std::size_t>(ctx.cfg(), "chains", 20);
  const std::size_t steps = config::get_or<std::size_t>(ctx.cfg(), "chain_length", 16);
  std::mt19937_64 rng(ctx.seed());
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<Chain> battery;
  std::vector<std::pair<RandomVariable, RandomVariable>> pairs;
  for (std::size_t c = 0; c < chains; ++c) {
    std::vector<double> v(xi.size());
    for (auto& x : v) x = d(rng);
    const RandomVariable dir(xi.space(), std::move(v));
    Chain down, up;
    down.limit = xi;
    up.limit = xi;
    up.decreasing = false;
    for (std::size_t n = 1; n <= steps; ++n) {
      const double h = std::ldexp(1.0, -static_cast<int>(n));
      down.terms.push_back(xi + dir * h);
      up.terms.push_back(xi - dir * h);
    }
    pairs.emplace_back(up.terms.front(), down.terms.front());
    battery.push_back(std::move(down));
    battery.push_back(std::move(up));
  }
  const auto reps = battery.empty() ? std::vector<ContinuityReport>{} : continuity_battery(u, battery);
  std::size_t above = 0, below = 0;
  double sandwich = numeric::kInf;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].holds) (battery[i].decreasing ? above : below) += 1;
    sandwich = std::min(sandwich, reps[i].min_sandwich);
  }
  ojson probes;
  probes["chains"] = chains;
  probes["continuity_from_above"] = above;
  probes["continuity_from_below"] = below;
  probes["min_sandwich"] = sandwich;
  o.report.payload["value"] = dual.value;
  o.report.payload["dual_gap"] = dual.gap;
  o.report.payload["optimizer_density"] = report::values(dual.optimizer_density);
  o.report.payload["min_weak_duality_slack"] = dual.min_weak_duality_slack;
  o.report.payload["densities_tried"] = dual.representation.densities.size();
  o.report.payload["probe_results"] = probes;
  o.report.results.push_back(check("dual_gap", std::abs(dual.gap) <= t, dual.gap, t));
  o.report.results.push_back(check("weak_duality", dual.min_weak_duality_slack >= -t, dual.min_weak_duality_slack, t));
  if (chains > 0) {
    o.report.results.push_back(check("continuity_from_above", above == chains, static_cast<double>(above), 0.0));
    o.report.results.push_back(check("continuity_from_below", below == chains, static_cast<double>(below), 0.0));
    o.report.results.push_back(check("concavity_sandwich", sandwich >= -1e-9, sandwich, 1e-9));
    const MonotonicityReport mono = monotonicity_check(u, pairs);
    o.report.results.push_back(check("monotone_normalized_cash_invariant", mono.holds(),
                                     static_cast<double>(mono.failures.size()), 0.0));
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < xi.size(); ++i) rows.push_back({static_cast<double>(i), xi[i], dual.optimizer_density[i]});
  o.csv = report::csv({"atom", "position", "optimizer_density"}, rows);
  return o;
}

Outcome cmd_scenario_list(const Context& ctx) {
  Outcome o;
  o.report.payload["scenarios"] = gallery::list_scenarios(ctx.scenario_dir());
  return o;
}

Outcome cmd_scenario_run(const Context& ctx) {
  Outcome o;
  std::vector<std::string> names = ctx.flags().names;
  if (names.empty()) names = gallery::list_scenarios(ctx.scenario_dir());
  gallery::RunOptions ro;
  ro.seed = ctx.seed();
  ro.tolerance = ctx.flags().tol;
  if (!ctx.flags().ladder.empty()) ro.ladder = parse_ladder(ctx.flags().ladder);
  const auto runs = gallery::run_scenarios(names, ro, ctx.scenario_dir());
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (auto r : runs[i].results) {
      r.name = runs[i].name + "/" + r.name;
      rows.push_back({static_cast<double>(i), r.passed ? 1.0 : 0.0, r.value, r.tolerance});
      o.report.results.push_back(std::move(r));
    }
    o.report.payload[runs[i].name] = runs[i].payload;
  }
  o.csv = report::csv({"scenario_index", "passed", "value", "tolerance"}, rows);
  return o;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return 2;
    case ErrorKind::registry: return 3;
    case ErrorKind::consistency: return 4;
    default: return 5;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("ORLICZ_LAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) parallel::set_thread_limit(static_cast<std::size_t>(n));
  }

  CLI::App app{"Orlicz-space lab: norms, conjugates, Komlos certificates and risk duality"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "JSON config file");
  app.add_option("--out", flags.out, "write the JSON report here instead of stdout");
  app.add_option("--csv", flags.csv, "write the command's trace as CSV");
  app.add_option("--tol", flags.tol, "override the assertion tolerance");
  app.add_option("--seed", flags.seed, "seed for generated inputs");
  app.add_option("--ladder", flags.ladder, "comma-separated resolutions, e.g. 4,6,8");
  app.add_option("--scenario-dir", flags.scenario_dir, "directory of scenario files");

  std::map<std::string, Outcome (*)(const Context&)> handlers;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Outcome (*fn)(const Context&),
                  const std::string& key) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    handlers[key] = fn;
    return sub;
  };
  leaf(&app, "norm", "Luxemburg or dual Orlicz norm of a random variable", cmd_norm, "norm");
  leaf(&app, "conjugate", "numeric conjugate on a grid, checked against a closed form", cmd_conjugate, "conjugate");
  leaf(&app, "delta2", "growth index and Delta2 classification", cmd_delta2, "delta2");
  CLI::App* verify = app.add_subcommand("verify", "inequality checks on disjoint families");
  verify->require_subcommand(1);
  verify->fallthrough();
  for (CLI::App* s : {leaf(verify, "q-estimate", "upper q-estimate trace", cmd_q_estimate, "verify q-estimate"),
                      leaf(verify, "cesaro", "Cesaro sup identity and decay", cmd_cesaro, "verify cesaro"),
                      leaf(verify, "ui", "uniform integrability profile of the regular parts", cmd_ui, "verify ui")}) {
    s->add_option("--scenario", flags.scenario, "use a named scenario's sequence");
  }
  leaf(verify, "holder", "Holder inequality on fixtures", cmd_holder, "verify holder");
  CLI::App* komlos = leaf(&app, "komlos", "Komlos extraction certificate for a scenario", cmd_komlos, "komlos");
  komlos->add_option("--scenario", flags.scenario, "scenario name");
  komlos->add_option("--mode", flags.mode, "cesaro or forward_convex");
  leaf(&app, "risk", "utility value, dual gap and continuity probes", cmd_risk, "risk");
  CLI::App* scenario = app.add_subcommand("scenario", "scenario registry");
  scenario->require_subcommand(1);
  scenario->fallthrough();
  leaf(scenario, "list", "list scenario names", cmd_scenario_list, "scenario list");
  leaf(scenario, "run", "run verdict tables", cmd_scenario_run, "scenario run")
      ->add_option("names", flags.names, "scenario names (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string key;
  for (CLI::App* s = &app; !s->get_subcommands().empty();) {
    s = s->get_subcommands().front();
    key += (key.empty() ? "" : " ") + s->get_name();
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const Context ctx(flags);
    Outcome o = handlers.at(key)(ctx);
    o.report.command = key;
    std::ostringstream digest;
    digest << key << '\n' << ctx.cfg().dump() << '\n' << flags.scenario << '\n' << flags.names.size() << '\n'
           << flags.ladder << '\n' << flags.mode << '\n' << flags.seed << '\n' << (flags.tol ? detail::fmt(*flags.tol) : "");
    for (const auto& n : flags.names) digest << '\n' << n;
    o.report.inputs_digest = report::fnv1a(digest.str());
    o.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = report::to_json(o.report).dump(2) + "\n";
    if (flags.out.empty()) {
      std::cout << text;
    } else {
      report::write_text(flags.out, text);
    }
    if (!flags.csv.empty()) report::write_text(flags.csv, o.csv);
    for (const auto& r : o.report.results) {
      if (!r.as_declared()) std::cerr << "verdict " << r.name << " failed (value " << r.value << ")\n";
    }
    return o.report.ok() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 5;
  }
}
