#include "ragkit/embedding.hpp"

#include "ragkit/parallel.hpp"
#include "ragkit/util.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace ragkit {

LikelihoodEmbedding embed(const std::vector<RandomGraphModel>& models, const AttributedGraph& graph,
                          const AnnealSchedule& schedule) {
  if (models.empty()) throw Error(ErrorKind::usage, "embedding needs at least one prototype");
  LikelihoodEmbedding out;
  out.graph_id = graph.id;
  out.label = graph.label;
  out.features.resize(static_cast<Index>(models.size()));
  for (std::size_t k = 0; k < models.size(); ++k) {
    const double ll = best_log_likelihood(models[k], graph, schedule);
    if (!std::isfinite(ll)) throw Error(ErrorKind::numerical, "non-finite log-likelihood for graph '" + graph.id + "'");
    out.features(static_cast<Index>(k)) = ll;
  }
  return out;
}

std::vector<LikelihoodEmbedding> embed_dataset(const std::vector<RandomGraphModel>& models,
                                               const GraphDataset& dataset, const AnnealSchedule& schedule) {
  for (const auto& m : models)
    if (m.node_dim != dataset.node_dim || m.edge_dim != dataset.edge_dim)
      throw Error(ErrorKind::data, "model '" + m.category + "' dimensions differ from the dataset");
  std::vector<LikelihoodEmbedding> out(dataset.graphs.size());
  parallel_for(dataset.graphs.size(), [&](std::size_t i) { out[i] = embed(models, dataset.graphs[i], schedule); });
  return out;
}

std::vector<RandomGraphModel> order_models(std::vector<RandomGraphModel> models,
                                           const std::vector<std::string>& categories) {
  std::vector<RandomGraphModel> out;
  for (const auto& c : categories) {
    auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.category == c; });
    if (it == models.end()) throw Error(ErrorKind::data, "no model for category '" + c + "'");
    out.push_back(std::move(*it));
    models.erase(it);
  }
  return out;
}

FeatureStats feature_stats(const std::vector<LikelihoodEmbedding>& train) {
  if (train.empty()) throw Error(ErrorKind::data, "standardization needs at least one training embedding");
  const Index k = train.front().features.size();
  FeatureStats s;
  s.mean = Vector::Zero(k);
  for (const auto& e : train) s.mean += e.features;
  s.mean /= static_cast<double>(train.size());
  Vector var = Vector::Zero(k);
  for (const auto& e : train) var += (e.features - s.mean).array().square().matrix();
  var /= static_cast<double>(train.size());
  s.scale = var.array().sqrt().matrix();
  for (Index i = 0; i < k; ++i)
    if (!(s.scale(i) > 0)) s.scale(i) = 1.0;
  return s;
}

std::vector<LikelihoodEmbedding> standardize(const std::vector<LikelihoodEmbedding>& items, const FeatureStats& stats) {
  std::vector<LikelihoodEmbedding> out = items;
  for (auto& e : out) {
    if (e.features.size() != stats.mean.size()) throw Error(ErrorKind::data, "feature dimension differs from statistics");
    e.features = ((e.features - stats.mean).array() / stats.scale.array()).matrix();
  }
  return out;
}

std::string stats_to_json(const FeatureStats& stats) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(stats.mean.data(), stats.mean.data() + stats.mean.size());
  j["scale"] = std::vector<double>(stats.scale.data(), stats.scale.data() + stats.scale.size());
  return j.dump(1) + "\n";
}

FeatureStats stats_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto scale = j.at("scale").get<std::vector<double>>();
    if (mean.size() != scale.size()) throw Error(ErrorKind::data, "statistics sidecar has inconsistent lengths");
    FeatureStats s;
    s.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Index>(mean.size()));
    s.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Index>(scale.size()));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::data, std::string("malformed statistics sidecar: ") + e.what());
  }
}

std::string embeddings_to_csv(const std::vector<LikelihoodEmbedding>& items, Index feature_count) {
  std::string out = "graph_id,label";
  for (Index k = 0; k < feature_count; ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const auto& e : items) {
    out += e.graph_id;
    out += ',';
    out += e.label.value_or("");
    for (Index k = 0; k < e.features.size(); ++k) {
      out += ',';
      out += format_double(e.features(k));
    }
    out += '\n';
  }
  return out;
}

std::vector<LikelihoodEmbedding> embeddings_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("graph_id,label", 0) != 0)
    throw Error(ErrorKind::data, "embedding CSV lacks the graph_id,label header");
  const auto count_fields = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  const auto k = count_fields(line) - 2;
  std::vector<LikelihoodEmbedding> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (count_fields(line) != k + 2) throw Error(ErrorKind::data, "embedding CSV row has wrong field count");
    std::istringstream row(line);
    LikelihoodEmbedding e;
    std::string field;
    std::getline(row, e.graph_id, ',');
    std::getline(row, field, ',');
    if (!field.empty()) e.label = field;
    e.features.resize(k);
    for (Index i = 0; i < k; ++i) {
      std::getline(row, field, ',');
      try {
        e.features(i) = std::stod(field);
      } catch (const std::exception&) {
        throw Error(ErrorKind::data, "non-numeric feature '" + field + "'");
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ragkit
