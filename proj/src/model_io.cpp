#include "ragkit/model_io.hpp"

#include "ragkit/util.hpp"

namespace ragkit {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Row-major flattening.
json mat_json(const Matrix& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

Vector vec_from(const json& j, Index dim) {
  if (static_cast<Index>(j.size()) != dim) throw Error(ErrorKind::data, "model vector has wrong length");
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = j[i].get<double>();
  return v;
}

Matrix mat_from(const json& j, Index dim) {
  if (static_cast<Index>(j.size()) != dim * dim) throw Error(ErrorKind::data, "model covariance has wrong size");
  Matrix m(dim, dim);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) m(r, c) = j[r * dim + c].get<double>();
  return m;
}

}  // namespace

json model_to_json(const RandomGraphModel& model) {
  json j;
  j["category"] = model.category;
  j["node_dim"] = model.node_dim;
  j["edge_dim"] = model.edge_dim;
  j["sample_count"] = model.sample_count;
  j["epsilon_outlier"] = model.params.epsilon_outlier;
  j["hyperparameters"] = {{"sigma0_sq", model.params.sigma0_sq},
                          {"lambda_min", model.params.lambda_min},
                          {"p_min", model.params.p_min},
                          {"eta", model.params.eta.describe()}};
  json nodes = json::array();
  for (const auto& n : model.nodes)
    nodes.push_back({{"p_occur", n.p_occur},
                     {"mean", vec_json(n.mean)},
                     {"covariance", mat_json(n.covariance)},
                     {"occur_count", n.occur_count},
                     {"update_count", n.update_count}});
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : model.edges)
    edges.push_back({{"u", e.u},
                     {"v", e.v},
                     {"p_occur_given_endpoints", e.p_occur_given_endpoints},
                     {"mean", vec_json(e.mean)},
                     {"covariance", mat_json(e.covariance)},
                     {"occur_count", e.occur_count},
                     {"endpoint_copresence_count", e.endpoint_copresence_count},
                     {"update_count", e.update_count}});
  j["edges"] = std::move(edges);
  return j;
}

RandomGraphModel model_from_json(const json& j) {
  RandomGraphModel m;
  try {
    m.category = j.at("category").get<std::string>();
    m.node_dim = j.at("node_dim").get<Index>();
    m.edge_dim = j.at("edge_dim").get<Index>();
    m.sample_count = j.at("sample_count").get<std::int64_t>();
    m.params.epsilon_outlier = j.at("epsilon_outlier").get<double>();
    const auto& h = j.at("hyperparameters");
    m.params.sigma0_sq = h.at("sigma0_sq").get<double>();
    m.params.lambda_min = h.at("lambda_min").get<double>();
    m.params.p_min = h.at("p_min").get<double>();
    m.params.eta = LearningRate::parse(h.at("eta").get<std::string>());
    for (const auto& n : j.at("nodes")) {
      NodeLaw law;
      law.p_occur = n.at("p_occur").get<double>();
      law.mean = vec_from(n.at("mean"), m.node_dim);
      law.covariance = mat_from(n.at("covariance"), m.node_dim);
      law.occur_count = n.at("occur_count").get<std::int64_t>();
      law.update_count = n.at("update_count").get<std::int64_t>();
      m.nodes.push_back(std::move(law));
    }
    for (const auto& e : j.at("edges")) {
      EdgeLaw law;
      law.u = e.at("u").get<Index>();
      law.v = e.at("v").get<Index>();
      law.p_occur_given_endpoints = e.at("p_occur_given_endpoints").get<double>();
      law.mean = vec_from(e.at("mean"), m.edge_dim);
      law.covariance = mat_from(e.at("covariance"), m.edge_dim);
      law.occur_count = e.at("occur_count").get<std::int64_t>();
      law.endpoint_copresence_count = e.at("endpoint_copresence_count").get<std::int64_t>();
      law.update_count = e.at("update_count").get<std::int64_t>();
      m.edges.push_back(std::move(law));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, std::string("malformed model: ") + e.what());
  }
  if (auto v = validate(m); !v) throw Error(ErrorKind::data, "invalid model: " + v.reason);
  return m;
}

std::string serialize_model(const RandomGraphModel& model) { return model_to_json(model).dump(1) + "\n"; }

RandomGraphModel parse_model(const std::string& text) {
  try {
    return model_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, std::string("malformed model: ") + e.what());
  }
}

RandomGraphModel read_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void write_model(const std::filesystem::path& path, const RandomGraphModel& model) {
  write_file_atomic(path, serialize_model(model));
}

}  // namespace ragkit
