#include "ragkit/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace ragkit {

namespace {

bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

}  // namespace

bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
  if (a.id != b.id || a.label != b.label || a.node_ids != b.node_ids) return false;
  if (a.node_attrs.size() != b.node_attrs.size() || a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.node_attrs.size(); ++i)
    if (!same_vector(a.node_attrs[i], b.node_attrs[i])) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.u != y.u || x.v != y.v || !same_vector(x.attr, y.attr)) return false;
  }
  return true;
}

GraphStructure::GraphStructure(Index node_count, std::vector<std::pair<Index, Index>> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  lookup_.setConstant(node_count_, node_count_, kUnmatched);
  for (Index e = 0; e < edge_count(); ++e) {
    const auto [u, v] = edges_[e];
    lookup_(u, v) = e;
    lookup_(v, u) = e;
  }
}

GraphStructure GraphStructure::of(const AttributedGraph& g) {
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) edges.emplace_back(e.u, e.v);
  return GraphStructure(g.node_count(), std::move(edges));
}

Validation validate(const AttributedGraph& graph, Index node_dim, Index edge_dim) {
  const Index n = graph.node_count();
  if (static_cast<Index>(graph.node_ids.size()) != n)
    return Validation::fail("graph '" + graph.id + "': node id count differs from attribute count");

  std::set<std::string> seen;
  for (Index i = 0; i < n; ++i) {
    const std::string& nid = graph.node_ids[i];
    if (!seen.insert(nid).second)
      return Validation::fail("graph '" + graph.id + "': duplicate node id '" + nid + "'");
    const Vector& a = graph.node_attrs[i];
    if (a.size() != node_dim)
      return Validation::fail("graph '" + graph.id + "': node '" + nid + "' dimension mismatch (" +
                              std::to_string(a.size()) + " != " + std::to_string(node_dim) + ")");
    if (!a.allFinite())
      return Validation::fail("graph '" + graph.id + "': node '" + nid + "' has a non-finite attribute");
  }

  std::set<std::pair<Index, Index>> pairs;
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edges[e];
    const std::string tag = "graph '" + graph.id + "': edge " + std::to_string(e);
    if (edge.u < 0 || edge.u >= n || edge.v < 0 || edge.v >= n)
      return Validation::fail(tag + " dangling edge (endpoint not a node)");
    if (edge.u == edge.v)
      return Validation::fail(tag + " self-loop on node '" + graph.node_ids[edge.u] + "'");
    if (!pairs.insert(std::minmax(edge.u, edge.v)).second)
      return Validation::fail(tag + " duplicate edge between '" + graph.node_ids[edge.u] + "' and '" +
                              graph.node_ids[edge.v] + "'");
    if (edge.attr.size() != edge_dim)
      return Validation::fail(tag + " dimension mismatch (" + std::to_string(edge.attr.size()) +
                              " != " + std::to_string(edge_dim) + ")");
    if (!edge.attr.allFinite()) return Validation::fail(tag + " has a non-finite attribute");
  }
  return {};
}

AttributedGraph canonical_order(const AttributedGraph& graph) {
  const Index n = graph.node_count();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return graph.node_ids[a] < graph.node_ids[b]; });
  std::vector<Index> rank(n);
  for (Index i = 0; i < n; ++i) rank[order[i]] = i;

  AttributedGraph out;
  out.id = graph.id;
  out.label = graph.label;
  out.node_ids.reserve(n);
  out.node_attrs.reserve(n);
  for (Index i : order) {
    out.node_ids.push_back(graph.node_ids[i]);
    out.node_attrs.push_back(graph.node_attrs[i]);
  }
  out.edges.reserve(graph.edges.size());
  for (const Edge& e : graph.edges) {
    const auto [lo, hi] = std::minmax(rank[e.u], rank[e.v]);
    out.edges.push_back({lo, hi, e.attr});
  }
  std::stable_sort(out.edges.begin(), out.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  return out;
}

Index GraphDataset::category_index(const std::string& name) const {
  const auto it = std::find(categories.begin(), categories.end(), name);
  return it == categories.end() ? kUnmatched : static_cast<Index>(it - categories.begin());
}

std::vector<AttributedGraph> GraphDataset::slice(const std::string& category) const {
  std::vector<AttributedGraph> out;
  for (const auto& g : graphs)
    if (g.label && *g.label == category) out.push_back(g);
  return out;
}

Validation validate(const GraphDataset& dataset) {
  if (dataset.node_dim < 1 || dataset.edge_dim < 1)
    return Validation::fail("attribute dimensions must be positive");
  std::set<std::string> cats(dataset.categories.begin(), dataset.categories.end());
  if (cats.size() != dataset.categories.size()) return Validation::fail("duplicate category names");
  for (const auto& g : dataset.graphs) {
    if (auto v = validate(g, dataset.node_dim, dataset.edge_dim); !v) return v;
    if (g.label && !cats.count(*g.label))
      return Validation::fail("graph '" + g.id + "': label '" + *g.label + "' is not a declared category");
  }
  return {};
}

}  // namespace ragkit
