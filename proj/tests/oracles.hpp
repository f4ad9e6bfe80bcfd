#pragma once

// Brute-force references shared by the unit tests and the acceptance run.

#include "ragkit/gaussian.hpp"
#include "ragkit/matcher.hpp"
#include "ragkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using ragkit::AttributedGraph;
using ragkit::GraphStructure;
using ragkit::Index;
using ragkit::Matrix;
using ragkit::RandomGraphModel;
using ragkit::Vector;

inline Vector normal_vector(Index dim, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = n(rng);
  return v;
}

// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(Index dim, std::mt19937_64& rng, double lo = 0.2, double hi = 2.0) {
  const Matrix a = Matrix::NullaryExpr(dim, dim, [&] { return std::normal_distribution<double>()(rng); });
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  Vector ev(dim);
  for (Index i = 0; i < dim; ++i) ev(i) = std::uniform_real_distribution<double>(lo, hi)(rng);
  return q * ev.asDiagonal() * q.transpose();
}

// Model with random occurrence probabilities and Gaussian laws over a random
// simple graph on `nodes` nodes with at most `max_edges` edges.
inline RandomGraphModel random_model(Index nodes, Index max_edges, Index node_dim, Index edge_dim,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  RandomGraphModel m;
  m.category = "c";
  m.node_dim = node_dim;
  m.edge_dim = edge_dim;
  m.sample_count = 1;
  for (Index i = 0; i < nodes; ++i) {
    ragkit::NodeLaw law;
    law.p_occur = unit(rng);
    law.mean = normal_vector(node_dim, rng, 2.0);
    law.covariance = random_spd(node_dim, rng, 0.05, 0.3);
    law.occur_count = 1;
    law.update_count = 1;
    m.nodes.push_back(law);
  }
  std::vector<std::pair<Index, Index>> pairs;
  for (Index u = 0; u < nodes; ++u)
    for (Index v = u + 1; v < nodes; ++v) pairs.push_back({u, v});
  std::shuffle(pairs.begin(), pairs.end(), rng);
  pairs.resize(std::min<std::size_t>(pairs.size(), static_cast<std::size_t>(max_edges)));
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [u, v] : pairs) {
    ragkit::EdgeLaw law;
    law.u = u;
    law.v = v;
    law.p_occur_given_endpoints = unit(rng);
    law.mean = normal_vector(edge_dim, rng);
    law.covariance = random_spd(edge_dim, rng, 0.05, 0.3);
    law.occur_count = 1;
    law.endpoint_copresence_count = 1;
    law.update_count = 1;
    m.edges.push_back(law);
  }
  return m;
}

// Draws an outcome from the model; node_of[a] is the model node behind
// outcome node a. Node order is shuffled.
inline AttributedGraph sample_outcome(const RandomGraphModel& m, std::mt19937_64& rng, std::vector<Index>* node_of) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Index> present;
  for (Index i = 0; i < m.node_count(); ++i)
    if (u01(rng) < m.nodes[i].p_occur) present.push_back(i);
  if (present.empty()) present.push_back(0);
  std::shuffle(present.begin(), present.end(), rng);
  std::vector<Index> slot(m.node_count(), ragkit::kUnmatched);
  AttributedGraph g;
  g.id = "sample";
  for (std::size_t a = 0; a < present.size(); ++a) {
    const auto& law = m.nodes[present[a]];
    slot[present[a]] = static_cast<Index>(a);
    g.node_ids.push_back("v" + std::to_string(a));
    g.node_attrs.push_back(law.mean + law.covariance.llt().matrixL() * normal_vector(m.node_dim, rng));
  }
  for (const auto& law : m.edges) {
    if (slot[law.u] == ragkit::kUnmatched || slot[law.v] == ragkit::kUnmatched) continue;
    if (u01(rng) >= law.p_occur_given_endpoints) continue;
    const auto [a, b] = std::minmax(slot[law.u], slot[law.v]);
    g.edges.push_back({a, b, law.mean + law.covariance.llt().matrixL() * normal_vector(m.edge_dim, rng)});
  }
  if (node_of) *node_of = present;
  return g;
}

// Every injective partial map from n source nodes into m target nodes.
inline void for_each_partial_injection(Index n, Index m, const std::function<void(const std::vector<Index>&)>& visit) {
  std::vector<Index> map(n, ragkit::kUnmatched);
  std::vector<bool> used(m, false);
  std::function<void(Index)> rec = [&](Index a) {
    if (a == n) {
      visit(map);
      return;
    }
    map[a] = ragkit::kUnmatched;
    rec(a + 1);
    for (Index i = 0; i < m; ++i) {
      if (used[i]) continue;
      used[i] = true;
      map[a] = i;
      rec(a + 1);
      used[i] = false;
    }
    map[a] = ragkit::kUnmatched;
  };
  rec(0);
}

// Exhaustive maximum of the log-likelihood over all morphisms.
inline double exhaustive_log_likelihood(const RandomGraphModel& model, const AttributedGraph& g) {
  const auto s = GraphStructure::of(g);
  const auto t = model.structure();
  double best = -std::numeric_limits<double>::infinity();
  for_each_partial_injection(g.node_count(), model.node_count(), [&](const std::vector<Index>& map) {
    best = std::max(best, ragkit::log_likelihood(model, g, ragkit::make_morphism(s, t, map)));
  });
  return best;
}

// Sum over every structural outcome (node subset, then edge subset among
// edges with both ends present) of exp(structural log-probability).
inline double structural_probability_mass(const RandomGraphModel& model) {
  const Index n = model.node_count();
  double total = 0.0;
  for (unsigned nodes = 0; nodes < (1u << n); ++nodes) {
    std::vector<Index> slot(n, ragkit::kUnmatched);
    AttributedGraph g;
    std::vector<Index> map;
    for (Index i = 0; i < n; ++i)
      if (nodes & (1u << i)) {
        slot[i] = g.node_count();
        g.node_ids.push_back("v" + std::to_string(i));
        g.node_attrs.push_back(model.nodes[i].mean);
        map.push_back(i);
      }
    std::vector<Index> eligible;
    for (Index f = 0; f < model.edge_count(); ++f)
      if (slot[model.edges[f].u] != ragkit::kUnmatched && slot[model.edges[f].v] != ragkit::kUnmatched)
        eligible.push_back(f);
    for (unsigned edges = 0; edges < (1u << eligible.size()); ++edges) {
      AttributedGraph h = g;
      for (std::size_t k = 0; k < eligible.size(); ++k)
        if (edges & (1u << k)) {
          const auto& law = model.edges[eligible[k]];
          const auto [a, b] = std::minmax(slot[law.u], slot[law.v]);
          h.edges.push_back({a, b, law.mean});
        }
      const auto m = ragkit::make_morphism(GraphStructure::of(h), model.structure(), map);
      total += std::exp(ragkit::log_likelihood_terms(model, h, m).structural);
    }
  }
  return total;
}

// All-pairs Mann-Whitney statistic with ties counted as one half.
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (!positive[i] || positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  return wins / pairs;
}

// Central finite-difference gradient of ln N(x; mu, cov) in mu.
inline Vector finite_difference_mean_gradient(const Vector& x, const Vector& mu, const Matrix& cov, double h = 1e-5) {
  Vector g(mu.size());
  for (Index k = 0; k < mu.size(); ++k) {
    Vector up = mu;
    Vector down = mu;
    up(k) += h;
    down(k) -= h;
    g(k) = (ragkit::gaussian_log_density(x, up, cov) - ragkit::gaussian_log_density(x, down, cov)) / (2 * h);
  }
  return g;
}

}  // namespace oracle
