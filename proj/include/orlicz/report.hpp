#pragma once

// Machine-readable reports. Key order is fixed so reruns are byte-identical
// apart from wall_time.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "orlicz/estimates.hpp"
#include "orlicz/komlos.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/risk.hpp"
#include "orlicz/young.hpp"

namespace orlicz::report {

using ojson = nlohmann::ordered_json;

inline std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct AssertionResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  bool expected_pass = true;
  std::string detail;

  [[nodiscard]] bool as_declared() const { return passed == expected_pass; }
};

struct RunReport {
  std::string command;
  std::string inputs_digest;
  std::vector<AssertionResult> results;
  double wall_time = 0.0;
  ojson payload = ojson::object();

  [[nodiscard]] bool ok() const {
    for (const auto& r : results) {
      if (!r.as_declared()) return false;
    }
    return true;
  }
};

inline ojson values(const RandomVariable& x) { return std::vector<double>(x.values().begin(), x.values().end()); }

inline ojson to_json(const AssertionResult& a) {
  ojson j;
  j["name"] = a.name;
  j["passed"] = a.passed;
  j["expected"] = a.expected_pass ? "pass" : "fail";
  j["value"] = a.value;
  j["tolerance"] = a.tolerance;
  if (!a.detail.empty()) j["detail"] = a.detail;
  return j;
}

inline ojson to_json(const RunReport& r) {
  ojson j;
  j["command"] = r.command;
  j["inputs_digest"] = r.inputs_digest;
  j["ok"] = r.ok();
  ojson res = ojson::array();
  for (const auto& a : r.results) res.push_back(to_json(a));
  j["results"] = res;
  j["payload"] = r.payload;
  j["wall_time"] = r.wall_time;
  return j;
}

inline ojson to_json(const NormResult& r) {
  ojson j;
  j["value"] = r.value;
  j["solver"] = to_string(r.solver);
  j["residual"] = r.residual;
  if (r.cross_check) j["cross_check"] = *r.cross_check;
  if (r.witness) j["witness"] = values(*r.witness);
  return j;
}

inline ojson to_json(const Delta2Report& r) {
  ojson j;
  j["p_phi"] = r.p_phi;
  j["q_phi"] = r.q_phi;
  j["is_delta2"] = r.is_delta2;
  j["scan_start"] = r.scan_start;
  j["y_cutoff"] = r.y_cutoff;
  j["cutoff_sequence"] = std::vector<double>(std::begin(r.cutoff_sequence), std::end(r.cutoff_sequence));
  return j;
}

inline ojson to_json(const KomlosCertificate& c) {
  ojson j;
  j["mode"] = to_string(c.mode);
  j["complete"] = c.complete;
  if (!c.failing_stage.empty()) j["failing_stage"] = c.failing_stage;
  ojson log = ojson::array();
  for (const auto& s : c.stage_log) log.push_back({{"stage", s.stage}, {"ok", s.ok}, {"detail", s.detail}});
  j["stage_log"] = log;
  if (c.combinations.empty()) return j;
  j["block_length"] = c.block_length;
  j["indices"] = c.indices;
  j["point_masses"] = c.point_masses;
  ojson w = ojson::array();
  for (const auto& row : c.weights) w.push_back({{"index", row.index}, {"weight", row.weight}});
  j["weights"] = w;
  j["order_bound_norm"] = c.order_bound_norm;
  j["regular_bound_norm"] = c.regular_bound_norm;
  j["singular_bound_norm"] = c.singular_bound_norm;
  j["spike_bound"] = c.spike_bound;
  j["q_used"] = c.q_used;
  j["C_used"] = c.C_used;
  j["decomposition_holds"] = c.decomposition_holds;
  j["singular_identity_exact"] = c.singular_identity_exact;
  j["prefix_excess"] = c.prefix_excess;
  j["metric_trace"] = c.as_convergence;
  j["as_converged"] = c.as_converged;
  j["forward_valid"] = c.forward_valid;
  j["plain_cesaro_sup_norm"] = c.plain_cesaro_sup_norm;
  j["plain_cesaro_within_bound"] = c.plain_cesaro_within_bound;
  j["limit"] = values(c.limit);
  j["order_bound"] = values(c.order_bound);
  return j;
}

inline ojson to_json(const ObstructionReport& r) {
  ojson j;
  j["phi_is_delta2"] = r.phi_is_delta2;
  j["floor"] = r.floor;
  j["found"] = r.found;
  j["verdict"] = r.verdict;
  ojson lv = ojson::array();
  for (const auto& l : r.levels) {
    lv.push_back({{"resolution", l.resolution},
                  {"shells", l.shells},
                  {"eps", l.eps},
                  {"zeta0_modular", l.zeta0_modular},
                  {"min_combination_pairing", l.min_combination_pairing},
                  {"duality_floor_ok", l.duality_floor_ok},
                  {"l0_trend_ok", l.l0_trend_ok}});
  }
  j["levels"] = lv;
  return j;
}

inline ojson to_json(const ContinuityReport& r) {
  ojson j;
  j["holds"] = r.holds;
  j["values_monotone"] = r.values_monotone;
  j["lipschitz"] = r.lipschitz;
  j["converged"] = r.converged;
  j["min_sandwich"] = r.min_sandwich;
  j["gaps"] = r.gaps;
  return j;
}

inline ojson to_json(const DualCheckReport& r) {
  ojson j;
  j["value"] = r.value;
  j["dual_inf"] = r.dual_inf;
  j["dual_gap"] = r.gap;
  j["optimizer_density"] = values(r.optimizer_density);
  j["min_weak_duality_slack"] = r.min_weak_duality_slack;
  j["densities_tried"] = r.representation.densities.size();
  return j;
}

/// Rows of numbers under a header.
inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write " + path);
  out << text;
}

}  // namespace orlicz::report
