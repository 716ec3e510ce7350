#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "frostman/core.hpp"
#include "frostman/covering.hpp"
#include "frostman/frostman.hpp"
#include "frostman/gauge.hpp"
#include "frostman/geometry.hpp"
#include "frostman/measures.hpp"

namespace frostman {
namespace io {

using json = nlohmann::ordered_json;

inline json to_json(const PointCloud& cloud) {
  json j;
  j["dim"] = cloud.ambient_dim;
  j["points"] = json::array();
  for (const Point& p : cloud.points) j["points"].push_back(p);
  j["resolution"] = cloud.resolution;
  return j;
}

inline PointCloud cloud_from_json(const json& j) {
  PointCloud c;
  c.ambient_dim = j.at("dim").get<int>();
  if (j.contains("points")) {
    for (const auto& p : j.at("points"))
      c.points.push_back(p.get<std::vector<double>>());
  } else {
    // a measure file works as a cloud: take the atom positions
    for (const auto& a : j.at("atoms"))
      c.points.push_back(a.at("x").get<std::vector<double>>());
  }
  c.resolution = j.value("resolution", 0.0);
  c.check();
  return c;
}

inline json to_json(const BallFamily& family) {
  json j;
  j["dim"] = family.ambient_dim;
  j["balls"] = json::array();
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    json b;
    b["c"] = family.balls[i].center;
    b["r"] = family.balls[i].radius;
    if (family.labeled()) b["label"] = family.labels[i];
    j["balls"].push_back(std::move(b));
  }
  return j;
}

inline BallFamily family_from_json(const json& j) {
  BallFamily f;
  f.ambient_dim = j.at("dim").get<int>();
  for (const auto& b : j.at("balls")) {
    f.balls.emplace_back(b.at("c").get<std::vector<double>>(),
                         b.at("r").get<double>());
    if (b.contains("label")) f.labels.push_back(b.at("label").get<int>());
  }
  f.check();
  return f;
}

inline json to_json(const DiscreteSignedMeasure& mu) {
  json j;
  j["dim"] = mu.ambient_dim;
  j["atoms"] = json::array();
  for (const Atom& a : mu.atoms) {
    json e;
    e["x"] = a.x;
    e["w"] = a.w;
    j["atoms"].push_back(std::move(e));
  }
  return j;
}

inline DiscreteSignedMeasure measure_from_json(const json& j) {
  DiscreteSignedMeasure mu;
  mu.ambient_dim = j.at("dim").get<int>();
  for (const auto& a : j.at("atoms"))
    mu.atoms.push_back({a.at("x").get<std::vector<double>>(),
                        a.at("w").get<double>()});
  return mu;
}

inline json to_json(const GaugeFunction& g) {
  json j;
  switch (g.kind) {
    case GaugeFunction::Kind::power:
      j["kind"] = "power";
      j["params"] = g.params;
      j["t_max"] = g.t_max;
      break;
    case GaugeFunction::Kind::log_power:
      j["kind"] = "log_power";
      j["params"] = g.params;
      j["t_max"] = g.t_max;
      break;
    case GaugeFunction::Kind::table:
      j["kind"] = "table";
      j["t"] = g.table_t;
      j["g"] = g.table_g;
      break;
  }
  return j;
}

inline GaugeFunction gauge_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "table")
    return GaugeFunction::tabulated(j.at("t").get<std::vector<double>>(),
                                    j.at("g").get<std::vector<double>>());
  const auto params = j.at("params").get<std::vector<double>>();
  const double t_max = j.value("t_max", 1.0);
  if (kind == "power") {
    if (params.size() != 1) throw parameter_error("power gauge: one parameter");
    return GaugeFunction::power(params[0], t_max);
  }
  if (kind == "log_power") {
    if (params.size() != 2)
      throw parameter_error("log_power gauge: two parameters");
    return GaugeFunction::log_power(params[0], params[1], t_max);
  }
  throw parameter_error("unknown gauge kind: " + kind);
}

inline json to_json(const CoveringReport& rep) {
  json j;
  j["alpha_or_gauge"] = rep.alpha_or_gauge;
  j["budget_a"] = rep.budget_a;
  j["label_ids"] = rep.label_ids;
  j["per_label_sums"] = rep.per_label_sums;
  j["decay_ratio_q"] = rep.decay_ratio_q;
  j["label_count"] = rep.label_count;
  j["valid_supercover"] = rep.valid_supercover;
  j["constants"] = json::object();
  for (const auto& [k, v] : rep.constants) j["constants"][k] = v;
  return j;
}

inline json to_json(const Certificate& cert) {
  json j;
  j["bound_kind"] = cert.bound_kind;
  j["target_points"] = cert.target_points;
  j["premeasure_bound_a"] = cert.premeasure_bound_a;
  j["supercover_report"] = to_json(cert.supercover_report);
  j["frostman_sums_per_label"] = cert.frostman_sums_per_label;
  j["final_bound"] = cert.final_bound;
  j["measured_mass"] = cert.measured_mass;
  j["slack"] = std::isfinite(cert.slack) ? json(cert.slack) : json("inf");
  j["valid"] = cert.valid;
  j["constants"] = json::object();
  for (const auto& [k, v] : cert.constants) j["constants"][k] = v;
  j["notes"] = cert.notes;
  return j;
}

}  // namespace io
}  // namespace frostman
