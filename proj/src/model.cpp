#include "ragkit/model.hpp"

#include "ragkit/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace ragkit {

std::string LearningRate::describe() const {
  if (kind == Kind::inverse_count) return "1/t";
  std::ostringstream ss;
  ss.precision(17);
  ss << value;
  return ss.str();
}

LearningRate LearningRate::parse(const std::string& text) {
  if (text == "1/t") return {};
  LearningRate r;
  r.kind = Kind::constant;
  try {
    std::size_t used = 0;
    r.value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::usage, "learning rate must be '1/t' or a number, got '" + text + "'");
  }
  if (!(r.value > 0 && r.value <= 1)) throw Error(ErrorKind::usage, "constant learning rate must lie in (0, 1]");
  return r;
}

Validation ModelParams::check() const {
  if (!(sigma0_sq > 0)) return Validation::fail("sigma0_sq must be positive");
  if (!(lambda_min > 0)) return Validation::fail("lambda_min must be positive");
  if (!(epsilon_outlier > 0)) return Validation::fail("epsilon_outlier must be positive");
  if (!(p_min > 0 && p_min < 0.5)) return Validation::fail("p_min must lie in (0, 0.5)");
  if (eta.kind == LearningRate::Kind::constant && !(eta.value > 0 && eta.value <= 1))
    return Validation::fail("constant learning rate must lie in (0, 1]");
  return {};
}

GraphStructure RandomGraphModel::structure() const {
  std::vector<std::pair<Index, Index>> e;
  e.reserve(edges.size());
  for (const auto& law : edges) e.emplace_back(law.u, law.v);
  return GraphStructure(node_count(), std::move(e));
}

namespace {

Validation check_law(const Vector& mean, const Matrix& cov, double p, Index dim, double floor, const std::string& tag) {
  if (!(p >= 0 && p <= 1)) return Validation::fail(tag + ": occurrence probability outside [0, 1]");
  if (mean.size() != dim || cov.rows() != dim || cov.cols() != dim)
    return Validation::fail(tag + ": attribute dimension mismatch");
  if (!mean.allFinite() || !cov.allFinite()) return Validation::fail(tag + ": non-finite parameters");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) return Validation::fail(tag + ": covariance not symmetric");
  const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(cov, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lo < floor * (1 - 1e-9)) return Validation::fail(tag + ": covariance eigenvalue below floor");
  return {};
}

double clamp_probability(double p, double p_min) { return std::clamp(p, p_min, 1.0 - p_min); }

void update_gaussian(Vector& mean, Matrix& cov, const Vector& x, double eta, double floor) {
  const Vector d = x - mean;
  mean += eta * d;
  cov = floor_eigenvalues(((1.0 - eta) * cov + eta * d * d.transpose()).eval(), floor);
}

}  // namespace

Validation validate(const RandomGraphModel& model) {
  if (auto v = model.params.check(); !v) return v;
  if (model.sample_count < 0) return Validation::fail("negative sample count");
  for (Index i = 0; i < model.node_count(); ++i) {
    const auto& n = model.nodes[i];
    const auto tag = "node " + std::to_string(i);
    if (auto v = check_law(n.mean, n.covariance, n.p_occur, model.node_dim, model.params.lambda_min, tag); !v) return v;
    if (n.occur_count < 0 || n.occur_count > model.sample_count) return Validation::fail(tag + ": occur count exceeds sample count");
  }
  std::vector<std::pair<Index, Index>> seen;
  for (Index f = 0; f < model.edge_count(); ++f) {
    const auto& e = model.edges[f];
    const auto tag = "edge " + std::to_string(f);
    if (e.u < 0 || e.v < 0 || e.u >= model.node_count() || e.v >= model.node_count() || e.u == e.v)
      return Validation::fail(tag + ": invalid endpoints");
    const std::pair<Index, Index> key = std::minmax(e.u, e.v);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return Validation::fail(tag + ": duplicate edge");
    seen.push_back(key);
    if (auto v = check_law(e.mean, e.covariance, e.p_occur_given_endpoints, model.edge_dim, model.params.lambda_min, tag); !v)
      return v;
    if (e.occur_count < 0 || e.occur_count > model.sample_count || e.endpoint_copresence_count > model.sample_count)
      return Validation::fail(tag + ": occur count exceeds sample count");
  }
  return {};
}

RandomGraphModel init_prototype(const std::vector<AttributedGraph>& class_graphs, const std::string& category,
                                const ModelParams& params) {
  if (class_graphs.empty()) throw Error(ErrorKind::data, "empty class '" + category + "'");
  if (auto v = params.check(); !v) throw Error(ErrorKind::usage, v.reason);
  const auto largest = std::max_element(class_graphs.begin(), class_graphs.end(),
                                        [](const auto& a, const auto& b) { return a.node_count() < b.node_count(); });
  const AttributedGraph g = canonical_order(*largest);

  RandomGraphModel model;
  model.category = category;
  model.params = params;
  model.sample_count = 1;
  model.node_dim = g.node_attrs.empty() ? 1 : g.node_attrs.front().size();
  model.edge_dim = g.edges.empty() ? (class_graphs.front().edges.empty() ? 1 : class_graphs.front().edges.front().attr.size())
                                   : g.edges.front().attr.size();
  for (const Vector& x : g.node_attrs) {
    NodeLaw law;
    law.mean = x;
    law.covariance = floor_eigenvalues(Matrix(params.sigma0_sq * Matrix::Identity(x.size(), x.size())), params.lambda_min);
    law.occur_count = 1;
    law.update_count = 1;
    model.nodes.push_back(std::move(law));
  }
  for (const Edge& e : g.edges) {
    EdgeLaw law;
    law.u = e.u;
    law.v = e.v;
    law.mean = e.attr;
    law.covariance =
        floor_eigenvalues(Matrix(params.sigma0_sq * Matrix::Identity(e.attr.size(), e.attr.size())), params.lambda_min);
    law.occur_count = 1;
    law.endpoint_copresence_count = 1;
    law.update_count = 1;
    model.edges.push_back(std::move(law));
  }
  return model;
}

namespace {

void observe_impl(RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism,
                  const double* eta_override) {
  const auto source = GraphStructure::of(graph);
  const auto target = model.structure();
  if (auto v = validate(morphism, source, target); !v) throw Error(ErrorKind::data, "bad morphism: " + v.reason);
  for (Index a = 0; a < graph.node_count(); ++a)
    if (morphism.node_map[a] != kUnmatched && graph.node_attrs[a].size() != model.node_dim)
      throw Error(ErrorKind::data, "bad morphism: node attribute dimension differs from model");
  for (Index e = 0; e < graph.edge_count(); ++e)
    if (morphism.edge_map[e] != kUnmatched && graph.edges[e].attr.size() != model.edge_dim)
      throw Error(ErrorKind::data, "bad morphism: edge attribute dimension differs from model");

  const double floor = model.params.lambda_min;
  const auto step = [&](std::int64_t t) { return eta_override ? *eta_override : model.params.eta.at(t); };

  ++model.sample_count;
  std::vector<bool> present(model.node_count(), false);
  for (Index a = 0; a < graph.node_count(); ++a) {
    const Index i = morphism.node_map[a];
    if (i == kUnmatched) continue;
    present[i] = true;
    NodeLaw& law = model.nodes[i];
    ++law.occur_count;
    ++law.update_count;
    update_gaussian(law.mean, law.covariance, graph.node_attrs[a], step(law.update_count), floor);
  }
  for (auto& law : model.edges)
    if (present[law.u] && present[law.v]) ++law.endpoint_copresence_count;
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const Index f = morphism.edge_map[e];
    if (f == kUnmatched) continue;
    EdgeLaw& law = model.edges[f];
    ++law.occur_count;
    ++law.update_count;
    update_gaussian(law.mean, law.covariance, graph.edges[e].attr, step(law.update_count), floor);
  }

  for (auto& law : model.nodes)
    law.p_occur = static_cast<double>(law.occur_count) / static_cast<double>(model.sample_count);
  for (auto& law : model.edges)
    law.p_occur_given_endpoints = law.endpoint_copresence_count == 0
                                      ? 0.0
                                      : static_cast<double>(law.occur_count) /
                                            static_cast<double>(law.endpoint_copresence_count);
}

// Precomputed per-element log terms of a finalized model.
struct LawCache {
  std::vector<double> node_log_p, node_log_q, edge_log_p, edge_log_q;
  std::vector<GaussianEvaluator<double>> node_density, edge_density;
  double log_eps = 0.0;

  explicit LawCache(const RandomGraphModel& m) : log_eps(std::log(m.params.epsilon_outlier)) {
    const double pm = m.params.p_min;
    for (const auto& law : m.nodes) {
      const double p = clamp_probability(law.p_occur, pm);
      node_log_p.push_back(std::log(p));
      node_log_q.push_back(std::log1p(-p));
      node_density.emplace_back(law.mean, law.covariance);
    }
    for (const auto& law : m.edges) {
      const double p = clamp_probability(law.p_occur_given_endpoints, pm);
      edge_log_p.push_back(std::log(p));
      edge_log_q.push_back(std::log1p(-p));
      edge_density.emplace_back(law.mean, law.covariance);
    }
  }
};

void check_dims(const RandomGraphModel& model, const AttributedGraph& graph) {
  for (const auto& x : graph.node_attrs)
    if (x.size() != model.node_dim)
      throw Error(ErrorKind::data, "graph '" + graph.id + "' node dimension differs from model '" + model.category + "'");
  for (const auto& e : graph.edges)
    if (e.attr.size() != model.edge_dim)
      throw Error(ErrorKind::data, "graph '" + graph.id + "' edge dimension differs from model '" + model.category + "'");
}

}  // namespace

void observe(RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism) {
  observe_impl(model, graph, morphism, nullptr);
}

void observe(RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism, double eta_override) {
  if (!(eta_override > 0 && eta_override <= 1)) throw Error(ErrorKind::usage, "eta must lie in (0, 1]");
  observe_impl(model, graph, morphism, &eta_override);
}

CompatibilityFn likelihood_compatibility(const RandomGraphModel& model) {
  auto cache = std::make_shared<const LawCache>(model);
  auto target = std::make_shared<const GraphStructure>(model.structure());
  const Index node_dim = model.node_dim;
  const Index edge_dim = model.edge_dim;
  return [cache, target, node_dim, edge_dim](const AttributedGraph& source) {
    const auto s = GraphStructure::of(source);
    auto c = CompatibilityTables::zeros(s, *target);
    c.source_node_slack.setConstant(cache->log_eps);
    c.source_edge_slack.setConstant(cache->log_eps);
    for (Index i = 0; i < target->node_count(); ++i) c.target_node_slack(i) = cache->node_log_q[i];
    for (Index f = 0; f < target->edge_count(); ++f) c.target_edge_absent(f) = cache->edge_log_q[f];
    for (Index a = 0; a < s.node_count(); ++a) {
      if (source.node_attrs[a].size() != node_dim) throw Error(ErrorKind::data, "node attribute dimension mismatch");
      for (Index i = 0; i < target->node_count(); ++i)
        c.node(a, i) = cache->node_log_p[i] + cache->node_density[i].log_density(source.node_attrs[a]);
    }
    for (Index e = 0; e < s.edge_count(); ++e) {
      if (source.edges[e].attr.size() != edge_dim) throw Error(ErrorKind::data, "edge attribute dimension mismatch");
      for (Index f = 0; f < target->edge_count(); ++f)
        c.edge(e, f) = cache->edge_log_p[f] + cache->edge_density[f].log_density(source.edges[e].attr);
    }
    return c;
  };
}

LogLikelihoodTerms log_likelihood_terms(const RandomGraphModel& model, const AttributedGraph& graph,
                                        const Morphism& morphism) {
  const auto source = GraphStructure::of(graph);
  const auto target = model.structure();
  if (auto v = validate(morphism, source, target); !v) throw Error(ErrorKind::data, "invalid morphism: " + v.reason);
  check_dims(model, graph);
  const LawCache cache(model);

  LogLikelihoodTerms t;
  std::vector<bool> present(model.node_count(), false);
  for (Index a = 0; a < graph.node_count(); ++a) {
    const Index i = morphism.node_map[a];
    if (i == kUnmatched) {
      t.outlier += cache.log_eps;
      continue;
    }
    present[i] = true;
    t.attribute += cache.node_density[i].log_density(graph.node_attrs[a]);
  }
  for (Index i = 0; i < model.node_count(); ++i) t.structural += present[i] ? cache.node_log_p[i] : cache.node_log_q[i];

  std::vector<bool> edge_hit(model.edge_count(), false);
  for (Index e = 0; e < graph.edge_count(); ++e) {
    const Index f = morphism.edge_map[e];
    if (f == kUnmatched) {
      t.outlier += cache.log_eps;
      continue;
    }
    edge_hit[f] = true;
    t.attribute += cache.edge_density[f].log_density(graph.edges[e].attr);
  }
  for (Index f = 0; f < model.edge_count(); ++f) {
    const auto& law = model.edges[f];
    if (!(present[law.u] && present[law.v])) continue;  // cannot occur without both ends
    t.structural += edge_hit[f] ? cache.edge_log_p[f] : cache.edge_log_q[f];
  }
  return t;
}

double log_likelihood(const RandomGraphModel& model, const AttributedGraph& graph, const Morphism& morphism) {
  return log_likelihood_terms(model, graph, morphism).total();
}

double best_log_likelihood(const RandomGraphModel& model, const AttributedGraph& graph, const AnnealSchedule& schedule) {
  check_dims(model, graph);
  if (graph.node_count() == 0) {
    return log_likelihood(model, graph, make_morphism(GraphStructure::of(graph), model.structure(), {}));
  }
  const auto result = match(graph, model.structure(), likelihood_compatibility(model), schedule);
  return log_likelihood(model, graph, result.morphism);
}

RandomGraphModel fit(const std::vector<AttributedGraph>& class_graphs, const std::string& category,
                     const ModelParams& params, const AnnealSchedule& schedule, FitReport* report) {
  RandomGraphModel model = init_prototype(class_graphs, category, params);
  const auto seed = std::max_element(class_graphs.begin(), class_graphs.end(),
                                     [](const auto& a, const auto& b) { return a.node_count() < b.node_count(); });
  const auto target = model.structure();
  std::uint64_t calls = 0;
  for (auto it = class_graphs.begin(); it != class_graphs.end(); ++it) {
    if (it == seed) continue;
    check_dims(model, *it);
    Morphism m;
    if (it->node_count() == 0) {
      m = make_morphism(GraphStructure::of(*it), target, {});
    } else {
      m = match(*it, target, likelihood_compatibility(model), schedule).morphism;
      ++calls;
    }
    observe(model, *it, m);
  }
  if (report) report->match_calls = calls;
  return model;
}

double dataset_log_likelihood(const RandomGraphModel& model, const std::vector<AttributedGraph>& graphs,
                              const AnnealSchedule& schedule) {
  double total = 0.0;
  for (const auto& g : graphs) total += best_log_likelihood(model, g, schedule);
  return total;
}

}  // namespace ragkit
