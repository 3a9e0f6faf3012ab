#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#ifndef ORLICZ_LAB_PATH
#define ORLICZ_LAB_PATH "orlicz_lab"
#endif

namespace {

using nlohmann::json;

struct LabRun {
  int code = -1;
  std::string out;
  json report;
};

LabRun lab(const std::string& args) {
  LabRun r;
  const std::string cmd = std::string(ORLICZ_LAB_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!r.out.empty() && r.out.front() == '{') r.report = json::parse(r.out);
  return r;
}

std::filesystem::path scratch(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "orlicz_cli_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

json find_result(const json& report, const std::string& name) {
  for (const auto& r : report.at("results")) {
    if (r.at("name") == name) return r;
  }
  return json();
}

}  // namespace

TEST(Cli, NormOfZeroIsZero) {
  const auto cfg = scratch("zero.json", R"({"rv": {"space": {"k": 3}, "generator": {"name": "zero"}},
                                          "young": {"kind": "power", "parameters": {"p": 3}}})");
  const LabRun r = lab("norm --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.report["command"], "norm");
  EXPECT_EQ(r.report["payload"]["value"].get<double>(), 0.0);
  for (const char* key : {"value", "solver", "residual"}) EXPECT_TRUE(r.report["payload"].contains(key)) << key;
}

TEST(Cli, QEstimateOnDisjointL2IsOne) {
  const auto cfg = scratch("q.json", R"({"family": {"k": 10, "terms": 64}, "q": 2, "expect_ratio": 1})");
  const auto csv = std::filesystem::temp_directory_path() / "orlicz_cli_test" / "q.csv";
  const LabRun r = lab("verify q-estimate --config " + cfg.string() + " --csv " + csv.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,lhs,rhs,ratio");
  int rows = 0;
  while (std::getline(in, line)) {
    const double ratio = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(ratio, 1.0, 1e-9) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 7);
}

TEST(Cli, KomlosOnRemarkSpikesStaysUnderZeta2) {
  const LabRun r = lab("komlos --scenario remark_2_4");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto& p = r.report["payload"];
  for (const char* key : {"indices", "weights", "order_bound_norm", "metric_trace", "stage_log"}) {
    EXPECT_TRUE(p.contains(key)) << key;
  }
  EXPECT_LE(p["order_bound_norm"].get<double>(), std::sqrt(M_PI * M_PI / 6.0) + 1e-9);
}

TEST(Cli, DistinctExitCodes) {
  EXPECT_EQ(lab("komlos --scenario no_such_scenario").code, 3);
  EXPECT_EQ(lab("norm --config " + scratch("broken.json", "{\"rv\": ").string()).code, 2);
  EXPECT_EQ(lab("norm --no-such-flag").code, 2);
  EXPECT_EQ(lab("scenario run --ladder 4,x").code, 2);
  const auto tight = scratch("tight.json", R"({"rv": {"space": {"k": 3}, "values": [1, 2, 3, 4, 5, 6, 7, 8]},
                                              "young": {"kind": "power", "parameters": {"p": 3}}, "norm": "dual"})");
  EXPECT_EQ(lab("norm --tol 1e-30 --config " + tight.string()).code, 4);
}

TEST(Cli, FailedVerdictExitsOne) {
  const auto cfg = scratch("wrong.json", R"({"rv": {"space": {"k": 2}, "values": [1, 1, 1, 1]},
                                           "young": {"kind": "quadratic", "parameters": {"a": 1}}, "expect": 2})");
  const LabRun r = lab("norm --config " + cfg.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.report["ok"].get<bool>());
  EXPECT_FALSE(find_result(r.report, "norm_matches_expected")["passed"].get<bool>());
}

TEST(Cli, ScenarioListAndRunInNameOrder) {
  const LabRun list = lab("scenario list");
  ASSERT_EQ(list.code, 0);
  const auto names = list.report["payload"]["scenarios"].get<std::vector<std::string>>();
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  EXPECT_NE(std::find(names.begin(), names.end(), "remark_2_4"), names.end());

  const LabRun run = lab("scenario run remark_2_4 disjoint_l2");
  ASSERT_EQ(run.code, 0) << run.out;
  std::vector<std::string> seen;
  for (const auto& r : run.report["results"]) seen.push_back(r["name"].get<std::string>());
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.front().rfind("disjoint_l2/", 0), 0u);
  EXPECT_EQ(seen.back().rfind("remark_2_4/", 0), 0u);
}

TEST(Cli, ReportsAreByteIdenticalApartFromWallTime) {
  json a = lab("scenario run remark_2_4 --seed 3").report;
  json b = lab("scenario run remark_2_4 --seed 3").report;
  a.erase("wall_time");
  b.erase("wall_time");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(a["inputs_digest"], lab("scenario run remark_2_4 --seed 4").report["inputs_digest"]);
}

TEST(Cli, ThreadCapDoesNotChangeResults) {
  json a = lab("scenario run").report;
  const std::string capped = std::string("ORLICZ_LAB_THREADS=1 ") + ORLICZ_LAB_PATH + " scenario run 2>/dev/null";
  FILE* p = popen(capped.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  pclose(p);
  json c = json::parse(out);
  for (json* j : {&a, &c}) j->erase("wall_time");
  EXPECT_EQ(a.dump(), c.dump());
}

TEST(Cli, RiskReportFields) {
  const auto cfg = scratch("risk.json", R"({"utility": {"name": "entropic", "gamma": 2},
                                          "position": {"space": {"k": 2}, "values": [0.3, -1, 2, 0.5]}, "chains": 10})");
  const LabRun r = lab("risk --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* key : {"value", "dual_gap", "optimizer_density", "probe_results"}) {
    EXPECT_TRUE(r.report["payload"].contains(key)) << key;
  }
  EXPECT_LE(std::abs(r.report["payload"]["dual_gap"].get<double>()), 1e-8);
}
