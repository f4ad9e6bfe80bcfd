#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ragkit {

using Index = std::ptrdiff_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Marks an element that has no counterpart (the empty image of a morphism).
inline constexpr Index kUnmatched = -1;

enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

/// Library error. The kind doubles as the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Edge {
  Index u = 0;
  Index v = 0;
  Vector attr;
};

/// Undirected attributed graph. Node i has external id node_ids[i] and
/// attribute node_attrs[i]; edges refer to nodes by dense index.
struct AttributedGraph {
  std::string id;
  std::optional<std::string> label;
  std::vector<std::string> node_ids;
  std::vector<Vector> node_attrs;
  std::vector<Edge> edges;

  Index node_count() const { return static_cast<Index>(node_attrs.size()); }
  Index edge_count() const { return static_cast<Index>(edges.size()); }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b);
};

/// Bare topology shared by graphs and models, with O(1) edge lookup.
class GraphStructure {
 public:
  GraphStructure() = default;
  GraphStructure(Index node_count, std::vector<std::pair<Index, Index>> edges);

  static GraphStructure of(const AttributedGraph& g);

  Index node_count() const { return node_count_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }

  /// Edge index joining u and v, or kUnmatched.
  Index edge_between(Index u, Index v) const {
    return lookup_.size() == 0 ? kUnmatched : lookup_(u, v);
  }

 private:
  Index node_count_ = 0;
  std::vector<std::pair<Index, Index>> edges_;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> lookup_;
};

struct Validation {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
  static Validation fail(std::string why) { return {false, std::move(why)}; }
};

Validation validate(const AttributedGraph& graph, Index node_dim, Index edge_dim);

/// Nodes sorted by id, edges stored as (min, max) and sorted.
AttributedGraph canonical_order(const AttributedGraph& graph);

struct GraphDataset {
  std::vector<AttributedGraph> graphs;
  std::vector<std::string> categories;
  Index node_dim = 1;
  Index edge_dim = 1;

  /// Index of a category name, or kUnmatched.
  Index category_index(const std::string& name) const;
  /// Graphs whose label is the given category, in dataset order.
  std::vector<AttributedGraph> slice(const std::string& category) const;
};

Validation validate(const GraphDataset& dataset);

}  // namespace ragkit
