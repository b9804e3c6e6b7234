#pragma once

// JSON and DOT serialization of marked graphs.
//
// JSON schema: {"vertices": [id...], "edges": [[u, v, label]...],
// "marked": id} with string ids, vertices and edges sorted for reproducible
// hashing.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "grig/marked_graph.hpp"

namespace grig {

inline nlohmann::json to_json(const MarkedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.names();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges())
    edges.push_back({g.name(e.u), g.name(e.v), std::string(1, gen_char(e.label))});
  j["edges"] = std::move(edges);
  j["marked"] = g.marked_name();
  return j;
}

inline MarkedGraph from_json(const nlohmann::json& j) {
  if (!j.contains("vertices") || !j.contains("edges") || !j.contains("marked"))
    throw std::invalid_argument("graph JSON needs vertices, edges, marked");
  std::vector<std::string> names = j.at("vertices").get<std::vector<std::string>>();
  std::vector<EdgeSpec> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("edge entries must be [u, v, label]");
    std::string label = e.at(2).get<std::string>();
    if (label.size() != 1 || !gen_from_char(label[0]))
      throw std::invalid_argument("edge label must be one of a, b, c, d");
    edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                     *gen_from_char(label[0])});
  }
  return MarkedGraph(std::move(names), edges, j.at("marked").get<std::string>());
}

inline std::string to_json_string(const MarkedGraph& g) { return to_json(g).dump(2); }

inline MarkedGraph load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

// DOT rendering: undirected, labels on edges, the marked vertex drawn with a
// double circle, loops rendered as self-edges.
inline std::string to_dot(const MarkedGraph& g, const std::string& graph_name = "G") {
  std::ostringstream out;
  out << "graph \"" << graph_name << "\" {\n";
  out << "  node [shape=circle];\n";
  for (const auto& n : g.names()) {
    out << "  \"" << n << "\"";
    if (n == g.marked_name()) out << " [peripheries=2]";
    out << ";\n";
  }
  for (const auto& e : g.edges())
    out << "  \"" << g.name(e.u) << "\" -- \"" << g.name(e.v) << "\" [label=\""
        << gen_char(e.label) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace grig
