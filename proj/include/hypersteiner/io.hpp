#pragma once

// JSON (de)serialisation of configurations and solve results.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypersteiner/datagen.hpp"
#include "hypersteiner/errors.hpp"
#include "hypersteiner/heuristics.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/riemannian.hpp"
#include "hypersteiner/tree.hpp"

namespace hypersteiner {

using json = nlohmann::json;

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw InputError(std::string(what) + ": unknown field '" + key + "'");
  }
}

}  // namespace detail

inline json to_json(const GdConfig& c) {
  return {{"max_epochs", c.max_epochs},
          {"learning_rate", c.learning_rate},
          {"patience", c.patience},
          {"threshold", c.threshold},
          {"use_retraction", c.use_retraction},
          {"max_step", c.max_step},
          {"max_edge_fraction", c.max_edge_fraction},
          {"collapse_subgradient", c.collapse_subgradient}};
}

inline GdConfig gd_config_from_json(const json& j, GdConfig c = {}) {
  detail::reject_unknown(j, {"max_epochs", "learning_rate", "patience", "threshold", "use_retraction", "max_step",
                             "max_edge_fraction", "collapse_subgradient"},
                         "gd config");
  detail::read_field(j, "max_epochs", c.max_epochs);
  detail::read_field(j, "learning_rate", c.learning_rate);
  detail::read_field(j, "patience", c.patience);
  detail::read_field(j, "threshold", c.threshold);
  detail::read_field(j, "use_retraction", c.use_retraction);
  detail::read_field(j, "max_step", c.max_step);
  detail::read_field(j, "max_edge_fraction", c.max_edge_fraction);
  detail::read_field(j, "collapse_subgradient", c.collapse_subgradient);
  if (c.max_epochs < 0 || c.patience < 1 || !(c.learning_rate > 0.0) || !(c.max_step > 0.0) ||
      !(c.max_edge_fraction > 0.0)) {
    throw InputError("gd config: epochs, patience, learning rate and step caps must be positive");
  }
  return c;
}

inline json to_json(const RhsConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"insertion_low", c.insertion_low},
          {"insertion_high", c.insertion_high},
          {"accept_tolerance", c.accept_tolerance},
          {"max_outer_iterations", c.max_outer_iterations},
          {"gd", to_json(c.gd)}};
}

/// The seed is not part of the JSON form; it is supplied per run.
inline RhsConfig rhs_config_from_json(const json& j, RhsConfig c = {}) {
  detail::reject_unknown(j, {"max_iterations", "insertion_low", "insertion_high", "accept_tolerance",
                             "max_outer_iterations", "gd"},
                         "rhs config");
  detail::read_field(j, "max_iterations", c.max_iterations);
  detail::read_field(j, "insertion_low", c.insertion_low);
  detail::read_field(j, "insertion_high", c.insertion_high);
  detail::read_field(j, "accept_tolerance", c.accept_tolerance);
  detail::read_field(j, "max_outer_iterations", c.max_outer_iterations);
  if (j.contains("gd")) c.gd = gd_config_from_json(j.at("gd"), c.gd);
  return c;
}

inline json to_json(const DatasetSpec& s) {
  json j = {{"kind", to_string(s.kind)}, {"seed", s.seed}};
  switch (s.kind) {
    case DatasetKind::centered_gaussian:
      j["n"] = s.n;
      j["sigma"] = s.sigma;
      break;
    case DatasetKind::boundary_mixture:
      j["n"] = s.n;
      j["sigma"] = s.sigma;
      j["t"] = s.t;
      j["d"] = s.d;
      j["random_assignment"] = s.random_assignment;
      break;
    case DatasetKind::polygon_one_per_vertex:
      j["sigma"] = s.sigma;
      j["t"] = s.t;
      j["d"] = s.d;
      break;
    case DatasetKind::transition_sweep:
      j["sigma"] = s.sigma;
      j["t"] = s.t;
      j["d"] = s.d;
      j["per_cluster"] = s.per_cluster;
      break;
    case DatasetKind::file:
      j["path"] = s.path;
      j["poincare"] = s.poincare;
      break;
  }
  return j;
}

inline DatasetSpec dataset_spec_from_json(const json& j) {
  detail::reject_unknown(j, {"kind", "n", "sigma", "t", "d", "seed", "path", "poincare", "random_assignment",
                             "per_cluster"},
                         "dataset spec");
  if (!j.contains("kind")) throw InputError("dataset spec: missing 'kind'");
  DatasetSpec s;
  std::string kind;
  detail::read_field(j, "kind", kind);
  s.kind = parse_dataset_kind(kind);
  if (s.kind == DatasetKind::polygon_one_per_vertex || s.kind == DatasetKind::boundary_mixture ||
      s.kind == DatasetKind::transition_sweep) {
    s.sigma = 0.1;
  }
  detail::read_field(j, "n", s.n);
  detail::read_field(j, "sigma", s.sigma);
  detail::read_field(j, "t", s.t);
  detail::read_field(j, "d", s.d);
  detail::read_field(j, "seed", s.seed);
  detail::read_field(j, "path", s.path);
  detail::read_field(j, "poincare", s.poincare);
  detail::read_field(j, "random_assignment", s.random_assignment);
  detail::read_field(j, "per_cluster", s.per_cluster);
  if (s.kind == DatasetKind::polygon_one_per_vertex && !j.contains("n")) s.n = s.d;
  return s;
}

inline json points_to_json(const std::vector<KleinPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({p.x(), p.y()});
  return arr;
}

inline std::vector<KleinPoint> points_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw InputError(std::string("result: '") + what + "' must be an array");
  std::vector<KleinPoint> out;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw InputError(std::string("result: entries of '") + what + "' must be [x, y] pairs");
    }
    auto p = KleinPoint::try_make(item[0].get<double>(), item[1].get<double>());
    if (!p) throw InputError(std::string("result: a point of '") + what + "' lies outside the disk");
    out.push_back(*p);
  }
  return out;
}

/// Result document: method, seed, length, red_percent, wall_time_ms,
/// terminals, steiner, edges and the configuration that produced it.
inline json to_json(const SolveResult& r, const json& config = json::object()) {
  json edges = json::array();
  for (auto [u, v] : r.tree.edges) edges.push_back({u, v});
  return {{"method", r.method},
          {"seed", r.seed},
          {"length", r.length},
          {"mst_length", r.mst_length},
          {"red_percent", r.red_percent},
          {"wall_time_ms", r.wall_time_ms},
          {"terminals", points_to_json(r.tree.terminals)},
          {"steiner", points_to_json(r.tree.steiner)},
          {"edges", edges},
          {"config", config}};
}

inline SolveResult result_from_json(const json& j) {
  if (!j.is_object()) throw InputError("result: expected a JSON object");
  for (const char* key : {"terminals", "steiner", "edges"}) {
    if (!j.contains(key)) throw InputError(std::string("result: missing '") + key + "'");
  }
  SolveResult r;
  detail::read_field(j, "method", r.method);
  detail::read_field(j, "seed", r.seed);
  detail::read_field(j, "length", r.length);
  detail::read_field(j, "mst_length", r.mst_length);
  detail::read_field(j, "red_percent", r.red_percent);
  detail::read_field(j, "wall_time_ms", r.wall_time_ms);
  r.tree.terminals = points_from_json(j.at("terminals"), "terminals");
  r.tree.steiner = points_from_json(j.at("steiner"), "steiner");
  const int n = r.tree.vertex_count();
  const json& edges = j.at("edges");
  if (!edges.is_array()) throw InputError("result: 'edges' must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw InputError("result: edges must be [i, j] integer pairs");
    }
    const int u = e[0].get<int>();
    const int v = e[1].get<int>();
    if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("result: edge index out of range");
    r.tree.edges.emplace_back(u, v);
  }
  return r;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace hypersteiner
