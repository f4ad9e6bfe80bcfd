#include "ragkit/classify.hpp"

#include "ragkit/parallel.hpp"
#include "ragkit/util.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace ragkit {

double PredictionSet::accuracy() const {
  if (items.empty()) return 0.0;
  const auto hits = std::count_if(items.begin(), items.end(),
                                  [](const Prediction& p) { return p.true_label == p.predicted_label; });
  return static_cast<double>(hits) / static_cast<double>(items.size());
}

std::string predictions_to_csv(const PredictionSet& set) {
  std::string out = "graph_id,true_label,pred_label,score\n";
  for (const auto& p : set.items)
    out += p.graph_id + ',' + p.true_label + ',' + p.predicted_label + ',' + format_double(p.score) + '\n';
  return out;
}

PredictionSet predictions_from_csv(const std::string& text, std::vector<std::string> categories) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "graph_id,true_label,pred_label,score")
    throw Error(ErrorKind::data, "predictions CSV lacks the expected header");
  PredictionSet set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Prediction p;
    std::string score;
    std::getline(row, p.graph_id, ',');
    std::getline(row, p.true_label, ',');
    std::getline(row, p.predicted_label, ',');
    std::getline(row, score, ',');
    try {
      p.score = std::stod(score);
    } catch (const std::exception&) {
      throw Error(ErrorKind::data, "non-numeric score '" + score + "'");
    }
    set.items.push_back(std::move(p));
  }
  if (categories.empty()) {
    for (const auto& p : set.items) {
      categories.push_back(p.true_label);
      categories.push_back(p.predicted_label);
    }
    std::sort(categories.begin(), categories.end());
    categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
  }
  set.categories = std::move(categories);
  return set;
}

PredictionSet rag_ml_classify(const std::vector<LikelihoodEmbedding>& embeddings,
                              const std::vector<std::string>& categories) {
  if (categories.size() < 2) throw Error(ErrorKind::usage, "maximum-likelihood rule needs at least two prototypes");
  PredictionSet out;
  out.categories = categories;
  for (const auto& e : embeddings) {
    if (e.features.size() != static_cast<Index>(categories.size()))
      throw Error(ErrorKind::data, "embedding length differs from the category count");
    Index best = 0;
    for (Index k = 1; k < e.features.size(); ++k)
      if (e.features(k) > e.features(best)) best = k;
    double runner_up = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < e.features.size(); ++k)
      if (k != best) runner_up = std::max(runner_up, e.features(k));
    out.items.push_back({e.graph_id, e.label.value_or(""), categories[best], e.features(best) - runner_up});
  }
  return out;
}

PredictionSet rag_ml_classify(const std::vector<RandomGraphModel>& models, const GraphDataset& dataset,
                              const AnnealSchedule& schedule) {
  if (models.size() < 2) throw Error(ErrorKind::usage, "maximum-likelihood rule needs at least two prototypes");
  std::vector<std::string> cats;
  for (const auto& m : models) cats.push_back(m.category);
  return rag_ml_classify(embed_dataset(models, dataset, schedule), cats);
}

double graph_distance(const AttributedGraph& a, const AttributedGraph& b, const AnnealSchedule& schedule) {
  if (a.node_count() == 0 || b.node_count() == 0) return 0.0;
  return -0.5 * (match(a, b, schedule).score + match(b, a, schedule).score);
}

Matrix graph_distance_matrix(const std::vector<AttributedGraph>& queries, const std::vector<AttributedGraph>& refs,
                             const AnnealSchedule& schedule) {
  Matrix d(static_cast<Index>(queries.size()), static_cast<Index>(refs.size()));
  parallel_for(queries.size(), [&](std::size_t q) {
    for (std::size_t r = 0; r < refs.size(); ++r)
      d(static_cast<Index>(q), static_cast<Index>(r)) = graph_distance(queries[q], refs[r], schedule);
  });
  return d;
}

Matrix pairwise_graph_distances(const std::vector<AttributedGraph>& graphs, const AnnealSchedule& schedule) {
  const Index n = static_cast<Index>(graphs.size());
  Matrix d = Matrix::Zero(n, n);
  parallel_for(graphs.size(), [&](std::size_t i) {
    for (Index j = static_cast<Index>(i) + 1; j < n; ++j)
      d(static_cast<Index>(i), j) = graph_distance(graphs[i], graphs[j], schedule);
  });
  d.triangularView<Eigen::StrictlyLower>() = d.transpose();
  return d;
}

namespace {

// Vote among the k nearest columns of one distance row, skipping `exclude`.
Index vote(const Eigen::Ref<const Vector>& row, const std::vector<Index>& ref_class, Index categories, int k,
           Index exclude, int* winner_votes) {
  std::vector<Index> order;
  for (Index r = 0; r < row.size(); ++r)
    if (r != exclude) order.push_back(r);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return row(a) < row(b); });
  std::vector<int> votes(categories, 0);
  for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i) ++votes[ref_class[order[i]]];
  Index best = 0;
  for (Index c = 1; c < categories; ++c)
    if (votes[c] > votes[best]) best = c;
  if (winner_votes) *winner_votes = votes[best];
  return best;
}

std::vector<Index> class_indices(const GraphDataset& ds) {
  std::vector<Index> out;
  for (const auto& g : ds.graphs) {
    const Index c = g.label ? ds.category_index(*g.label) : kUnmatched;
    if (c == kUnmatched) throw Error(ErrorKind::data, "reference graph '" + g.id + "' has no known label");
    out.push_back(c);
  }
  return out;
}

}  // namespace

PredictionSet knn_from_distances(const Matrix& distances, const GraphDataset& train, const GraphDataset& test, int k) {
  if (train.graphs.empty()) throw Error(ErrorKind::data, "kNN needs a non-empty training set");
  if (k < 1 || k > static_cast<int>(train.graphs.size()))
    throw Error(ErrorKind::usage, "k must lie in [1, |train|]");
  const auto ref_class = class_indices(train);
  PredictionSet out;
  out.categories = train.categories;
  for (std::size_t q = 0; q < test.graphs.size(); ++q) {
    int votes = 0;
    const Index c = vote(distances.row(static_cast<Index>(q)).transpose(), ref_class,
                         static_cast<Index>(train.categories.size()), k, kUnmatched, &votes);
    out.items.push_back({test.graphs[q].id, test.graphs[q].label.value_or(""), train.categories[c],
                         static_cast<double>(votes) / k});
  }
  return out;
}

PredictionSet knn_graph_classify(const GraphDataset& train, const GraphDataset& test, int k,
                                 const AnnealSchedule& schedule) {
  if (train.graphs.empty()) throw Error(ErrorKind::data, "kNN needs a non-empty training set");
  if (k < 1 || k > static_cast<int>(train.graphs.size()))
    throw Error(ErrorKind::usage, "k must lie in [1, |train|]");
  return knn_from_distances(graph_distance_matrix(test.graphs, train.graphs, schedule), train, test, k);
}

int select_k(const Matrix& train_distances, const GraphDataset& train, const std::vector<int>& candidates) {
  if (candidates.empty()) throw Error(ErrorKind::usage, "no candidate k values");
  const auto ref_class = class_indices(train);
  const Index n = static_cast<Index>(train.graphs.size());
  int best_k = candidates.front();
  long best_hits = -1;
  for (int k : candidates) {
    if (k < 1 || k > n - 1) continue;
    long hits = 0;
    for (Index i = 0; i < n; ++i)
      if (vote(train_distances.row(i).transpose(), ref_class, static_cast<Index>(train.categories.size()), k, i,
               nullptr) == ref_class[i])
        ++hits;
    if (hits > best_hits) {
      best_hits = hits;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace ragkit
