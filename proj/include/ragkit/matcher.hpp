#pragma once

#include "ragkit/graph.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <vector>

namespace ragkit {

/// Partial injective map from source (outcome) elements into target elements.
/// kUnmatched marks an element with no image.
struct Morphism {
  std::vector<Index> node_map;
  std::vector<Index> edge_map;

  Index matched_nodes() const;
  friend bool operator==(const Morphism&, const Morphism&) = default;
};

/// Builds a morphism from a node map; edge_map follows from it.
Morphism make_morphism(const GraphStructure& source, const GraphStructure& target, std::vector<Index> node_map);

/// Injectivity, range and edge-consistency check.
Validation validate(const Morphism& m, const GraphStructure& source, const GraphStructure& target);

struct AnnealSchedule {
  double beta_initial = 0.5;
  double beta_rate = 1.075;
  double beta_final = 10.0;
  int sinkhorn_iters = 30;
  int assignment_iters_per_beta = 4;
  bool refine = true;  ///< local search on the discretized morphism

  Validation check() const;
};

/// Match-matrix normalization with one slack row and one slack column
/// (the last row and column). Non-slack rows are normalized over all of
/// their columns, non-slack columns over all of their rows; the slack
/// corner is ignored.
void sinkhorn_normalize(Matrix& m, int iters);

/// Compatibility values of one (source, target) pair, in log space for the
/// likelihood compatibility. The value of a hard assignment is
///   sum of source_node_slack over unmatched source nodes
/// + sum of target_node_slack over unmatched target nodes
/// + node(a, i) for every matched pair
/// + edge(e, f) for every source edge e mapped onto target edge f
/// + source_edge_slack(e) for every source edge without an image
/// + target_edge_absent(f) for every target edge whose endpoints are both
///   hit but which receives no source edge.
/// Target edges with an unhit endpoint contribute nothing.
/// A node entry of -infinity forbids the pair.
struct CompatibilityTables {
  Matrix node;
  Vector source_node_slack;
  Vector target_node_slack;
  Matrix edge;
  Vector source_edge_slack;
  Vector target_edge_absent;

  static CompatibilityTables zeros(const GraphStructure& source, const GraphStructure& target);
};

using CompatibilityFn = std::function<CompatibilityTables(const AttributedGraph& source)>;

/// Value of a hard assignment under the tables.
double assignment_value(const CompatibilityTables& c, const GraphStructure& source,
                        const GraphStructure& target, const Morphism& m);

/// exp(-|x - y|^2 / 2) between attributes; slacks are zero.
CompatibilityFn gaussian_kernel_compatibility(const AttributedGraph& target);

struct MatchResult {
  Morphism morphism;
  Matrix soft;  ///< converged match matrix including slack row and column
  double score = 0.0;
};

/// Graduated assignment. The returned morphism is the greedy discretization
/// of the converged soft match matrix, refined by local search when the
/// schedule asks for it.
MatchResult match(const AttributedGraph& source, const GraphStructure& target,
                  const CompatibilityTables& compat, const AnnealSchedule& schedule = {});

MatchResult match(const AttributedGraph& source, const GraphStructure& target, const CompatibilityFn& compat,
                  const AnnealSchedule& schedule = {});

/// Graph-to-graph match under the Gaussian kernel compatibility.
MatchResult match(const AttributedGraph& source, const AttributedGraph& target,
                  const AnnealSchedule& schedule = {});

/// Greedy discretization: repeatedly fix the largest remaining entry
/// (lowest (row, col) on ties), slack entries leave the element unmatched.
/// Forbidden pairs (mask false) are never chosen.
std::vector<Index> discretize(const Matrix& soft, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed);

/// Process-wide count of match() invocations.
std::atomic<std::uint64_t>& match_call_counter();

}  // namespace ragkit
