#pragma once

// JSON specs for Young functions, random variables and utilities.
//
//   young:   {"kind": "power", "parameters": {"p": 3, "c": 1}, "x_max": 1e4}
//            {"kind": "piecewise", "breakpoints": [[1, 0.5], [2, 2]]}
//            {"kind": ..., "conjugate": true}   numeric or closed-form conjugate
//   rv:      {"space": {"k": 3, "weights": [...]}, "values": [...]}
//            {"space": {"k": 3}, "generator": {"name": "indicator", "params": {"lo": 0, "hi": 0.5, "c": 2}}}
//   utility: {"name": "entropic", "gamma": 1} | {"name": "ess_inf"} | {"name": "average_value_at_risk", "alpha": 0.1}

#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "orlicz/error.hpp"
#include "orlicz/risk.hpp"
#include "orlicz/space.hpp"
#include "orlicz/young.hpp"

namespace orlicz::config {

using json = nlohmann::json;

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, path + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parse, std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

inline YoungFunction young_from_json(const json& j) {
  const auto kind = require<std::string>(j, "kind");
  const json p = j.contains("parameters") ? j.at("parameters") : json::object();
  const double x_max = get_or<double>(j, "x_max", 0.0);
  auto xm = [&](double fallback) { return x_max > 0.0 ? x_max : fallback; };
  YoungFunction phi = [&]() -> YoungFunction {
    if (kind == "power") return young::power(require<double>(p, "p"), get_or<double>(p, "c", 1.0), xm(1e4));
    if (kind == "quadratic") return young::quadratic(get_or<double>(p, "a", 0.5), xm(1e4));
    if (kind == "entropic") return young::entropic(xm(1e12));
    if (kind == "exp_compensated") return young::exp_compensated(xm(40.0));
    if (kind == "exp_minus_one") return young::exp_minus_one(xm(40.0));
    if (kind == "entropic_shifted") return young::entropic_shifted(xm(1e12));
    if (kind == "piecewise") {
      const json& bp = j.contains("breakpoints") ? j.at("breakpoints") : p.value("breakpoints", json::array());
      std::vector<std::pair<double, double>> pts;
      for (const auto& e : bp) {
        if (!e.is_array() || e.size() != 2) fail(ErrorKind::parse, "breakpoints must be [x, y] pairs");
        pts.emplace_back(e[0].get<double>(), e[1].get<double>());
      }
      return young::piecewise_linear(pts);
    }
    fail(ErrorKind::parse, "unknown Young kind '" + kind + "'");
  }();
  if (get_or<bool>(j, "conjugate", false)) return conjugate(phi);
  return phi;
}

inline SpacePtr space_from_json(const json& j) {
  const int k = require<int>(j, "k");
  if (j.contains("weights")) return DyadicSpace::weighted(k, j.at("weights").get<std::vector<double>>());
  return DyadicSpace::uniform(k);
}

inline RandomVariable generated_rv(const SpacePtr& s, const json& g, std::uint64_t seed) {
  const auto name = require<std::string>(g, "name");
  const json p = g.contains("params") ? g.at("params") : json::object();
  if (name == "zero") return RandomVariable::zero(s);
  if (name == "constant") return RandomVariable::constant(s, get_or<double>(p, "c", 1.0));
  if (name == "indicator") {
    return RandomVariable::interval_indicator(s, require<double>(p, "lo"), require<double>(p, "hi"), get_or<double>(p, "c", 1.0));
  }
  if (name == "linear") {
    const double a = get_or<double>(p, "a", 0.0), b = get_or<double>(p, "b", 1.0);
    std::vector<double> v(s->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a + b * (static_cast<double>(i) + 0.5) / static_cast<double>(v.size());
    return RandomVariable(s, std::move(v));
  }
  if (name == "uniform") {
    std::mt19937_64 rng(get_or<std::uint64_t>(p, "seed", seed));
    std::uniform_real_distribution<double> d(get_or<double>(p, "lo", -1.0), get_or<double>(p, "hi", 1.0));
    std::vector<double> v(s->size());
    for (auto& x : v) x = d(rng);
    return RandomVariable(s, std::move(v));
  }
  fail(ErrorKind::parse, "unknown generator '" + name + "'");
}

inline RandomVariable rv_from_json(const json& j, std::uint64_t seed = 1) {
  const SpacePtr s = space_from_json(j.contains("space") ? j.at("space") : json::object());
  if (j.contains("values")) return RandomVariable(s, j.at("values").get<std::vector<double>>());
  if (j.contains("generator")) return generated_rv(s, j.at("generator"), seed);
  fail(ErrorKind::parse, "random variable needs 'values' or 'generator'");
}

inline MonetaryUtility utility_from_json(const json& j) {
  const auto name = require<std::string>(j, "name");
  if (name == "entropic") return utility::entropic(get_or<double>(j, "gamma", 1.0));
  if (name == "ess_inf") return utility::ess_inf();
  if (name == "average_value_at_risk") return utility::average_value_at_risk(require<double>(j, "alpha"));
  if (name == "expectation") return utility::expectation();
  fail(ErrorKind::parse, "unknown utility '" + name + "'");
}

inline json to_json(const RandomVariable& x) {
  json space{{"k", x.space()->resolution()}};
  if (!x.space()->is_uniform()) space["weights"] = std::vector<double>(x.space()->weights().begin(), x.space()->weights().end());
  return json{{"space", space}, {"values", std::vector<double>(x.values().begin(), x.values().end())}};
}

}  // namespace orlicz::config
