#pragma once

#include "ragkit/graph.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace fixture {

using ragkit::AttributedGraph;
using ragkit::Index;
using ragkit::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct E {
  Index u;
  Index v;
  double attr;
};

// Nodes n0, n1, ... with 1-D or multi-D attributes; 1-D edge attributes.
inline AttributedGraph graph(const std::string& id, const std::vector<Vector>& nodes, const std::vector<E>& edges = {},
                             std::optional<std::string> label = std::nullopt) {
  AttributedGraph g;
  g.id = id;
  g.label = std::move(label);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    g.node_ids.push_back("n" + std::to_string(i));
    g.node_attrs.push_back(nodes[i]);
  }
  for (const auto& e : edges) g.edges.push_back({e.u, e.v, vec({e.attr})});
  return g;
}

}  // namespace fixture
