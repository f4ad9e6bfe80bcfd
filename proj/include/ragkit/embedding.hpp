#pragma once

#include "ragkit/graph.hpp"
#include "ragkit/matcher.hpp"
#include "ragkit/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ragkit {

/// Per-prototype log-likelihoods of one graph, in category order.
struct LikelihoodEmbedding {
  std::string graph_id;
  std::optional<std::string> label;
  Vector features;
};

LikelihoodEmbedding embed(const std::vector<RandomGraphModel>& models, const AttributedGraph& graph,
                          const AnnealSchedule& schedule = {});

/// One embedding per graph, dataset order. Performs |dataset| * K matches.
std::vector<LikelihoodEmbedding> embed_dataset(const std::vector<RandomGraphModel>& models,
                                               const GraphDataset& dataset, const AnnealSchedule& schedule = {});

/// Orders models to follow the category list; every category needs a model.
std::vector<RandomGraphModel> order_models(std::vector<RandomGraphModel> models,
                                           const std::vector<std::string>& categories);

struct FeatureStats {
  Vector mean;
  Vector scale;  ///< standard deviation, 1 where a coordinate is constant
};

FeatureStats feature_stats(const std::vector<LikelihoodEmbedding>& train);
std::vector<LikelihoodEmbedding> standardize(const std::vector<LikelihoodEmbedding>& items, const FeatureStats& stats);

std::string stats_to_json(const FeatureStats& stats);
FeatureStats stats_from_json(const std::string& text);

/// CSV with header graph_id,label,f0,...,f{K-1}.
std::string embeddings_to_csv(const std::vector<LikelihoodEmbedding>& items, Index feature_count);
std::vector<LikelihoodEmbedding> embeddings_from_csv(const std::string& text);

}  // namespace ragkit
