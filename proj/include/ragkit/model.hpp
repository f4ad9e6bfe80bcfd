#pragma once

#include "ragkit/graph.hpp"
#include "ragkit/matcher.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ragkit {

/// Learning-rate rule for the online Gaussian updates. With inverse_count
/// the step of an element is 1/t, t being that element's update count.
struct LearningRate {
  enum class Kind { inverse_count, constant };
  Kind kind = Kind::inverse_count;
  double value = 0.1;  ///< used by Kind::constant

  double at(std::int64_t update_count) const {
    return kind == Kind::constant ? value : 1.0 / static_cast<double>(update_count);
  }
  std::string describe() const;
  static LearningRate parse(const std::string& text);  ///< "1/t" or a number in (0, 1]
};

struct ModelParams {
  double sigma0_sq = 1.0;         ///< initial covariance scale
  double lambda_min = 1e-4;       ///< covariance eigenvalue floor
  double epsilon_outlier = 1e-6;  ///< density charged per source element left unmatched
  double p_min = 1e-6;            ///< occurrence probabilities clamped to [p_min, 1 - p_min]
  LearningRate eta;

  Validation check() const;
};

struct NodeLaw {
  double p_occur = 1.0;
  Vector mean;
  Matrix covariance;
  std::int64_t occur_count = 0;
  std::int64_t update_count = 0;
};

/// Edge occurrence is conditional on both endpoints being present.
struct EdgeLaw {
  Index u = 0;
  Index v = 0;
  double p_occur_given_endpoints = 1.0;
  Vector mean;
  Matrix covariance;
  std::int64_t occur_count = 0;
  std::int64_t endpoint_copresence_count = 0;
  std::int64_t update_count = 0;
};

/// Random attributed graph: Bernoulli occurrence plus a Gaussian attribute
/// law on every node and edge.
struct RandomGraphModel {
  std::string category;
  std::vector<NodeLaw> nodes;
  std::vector<EdgeLaw> edges;
  std::int64_t sample_count = 0;
  Index node_dim = 1;
  Index edge_dim = 1;
  ModelParams params;

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  Index edge_count() const { return static_cast<Index>(edges.size()); }
  GraphStructure structure() const;
};

Validation validate(const RandomGraphModel& model);

/// Prototype from the largest graph of the class (first on ties).
RandomGraphModel init_prototype(const std::vector<AttributedGraph>& class_graphs, const std::string& category,
                                const ModelParams& params = {});

/// One online step: structural counts, then mean and covariance updates
/// of every matched element.
void observe(RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism);
void observe(RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism, double eta_override);

/// Node and edge compatibilities are ln p + ln N(x; mean, cov) against each
/// model element; unmatched source elements cost ln(epsilon_outlier), model
/// nodes left out cost ln q and model edges with both ends present but no
/// image cost ln(1 - p).
CompatibilityFn likelihood_compatibility(const RandomGraphModel& model);

struct LogLikelihoodTerms {
  double structural = 0.0;  ///< occurrence and non-occurrence of model elements
  double attribute = 0.0;   ///< Gaussian log-densities of matched attributes
  double outlier = 0.0;     ///< ln(epsilon_outlier) per unmatched source element

  double total() const { return structural + attribute + outlier; }
};

LogLikelihoodTerms log_likelihood_terms(const RandomGraphModel& model, const AttributedGraph& graph,
                                        const Morphism& morphism);
double log_likelihood(const RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism);

/// Log-likelihood under the morphism found by the matcher.
double best_log_likelihood(const RandomGraphModel& model, const AttributedGraph& graph,
                           const AnnealSchedule& schedule = {});

struct FitReport {
  std::uint64_t match_calls = 0;
};

/// Initialize from the largest graph, then match and observe every other
/// graph once in order.
RandomGraphModel fit(const std::vector<AttributedGraph>& class_graphs, const std::string& category,
                     const ModelParams& params = {}, const AnnealSchedule& schedule = {}, FitReport* report = nullptr);

/// Sum of best_log_likelihood over the graphs (dataset log-likelihood cost).
double dataset_log_likelihood(const RandomGraphModel& model, const std::vector<AttributedGraph>& graphs,
                              const AnnealSchedule& schedule = {});

}  // namespace ragkit
