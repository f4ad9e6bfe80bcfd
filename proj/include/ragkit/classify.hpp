#pragma once

#include "ragkit/embedding.hpp"
#include "ragkit/matcher.hpp"
#include "ragkit/predictions.hpp"
#include "ragkit/svm.hpp"

#include <vector>

namespace ragkit {

/// Argmax over prototype log-likelihoods; score is the gap to the runner-up.
PredictionSet rag_ml_classify(const std::vector<LikelihoodEmbedding>& embeddings,
                              const std::vector<std::string>& categories);

/// Same, embedding the dataset first.
PredictionSet rag_ml_classify(const std::vector<RandomGraphModel>& models, const GraphDataset& dataset,
                              const AnnealSchedule& schedule = {});

/// d(a, b) = -(score(a->b) + score(b->a)) / 2 under the Gaussian kernel compatibility.
double graph_distance(const AttributedGraph& a, const AttributedGraph& b, const AnnealSchedule& schedule = {});

/// rows: queries, cols: references.
Matrix graph_distance_matrix(const std::vector<AttributedGraph>& queries, const std::vector<AttributedGraph>& refs,
                             const AnnealSchedule& schedule = {});

/// Symmetric train x train matrix; each unordered pair is matched once in each direction.
Matrix pairwise_graph_distances(const std::vector<AttributedGraph>& graphs, const AnnealSchedule& schedule = {});

/// Majority vote over the k nearest references (stable by reference index);
/// vote ties go to the smaller category index. Score is votes / k.
PredictionSet knn_from_distances(const Matrix& distances, const GraphDataset& train, const GraphDataset& test, int k);

PredictionSet knn_graph_classify(const GraphDataset& train, const GraphDataset& test, int k,
                                 const AnnealSchedule& schedule = {});

/// Leave-one-out choice of k from candidates using a train x train distance matrix.
int select_k(const Matrix& train_distances, const GraphDataset& train, const std::vector<int>& candidates);

}  // namespace ragkit
