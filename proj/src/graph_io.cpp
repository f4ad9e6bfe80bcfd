#include "ragkit/graph_io.hpp"

#include "ragkit/util.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ragkit {

using nlohmann::json;

namespace {

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::data, where + ": 'attr' must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::data, where + ": non-numeric attribute");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

json graph_to_json(const AttributedGraph& graph) {
  json j;
  j["id"] = graph.id;
  j["label"] = graph.label ? json(*graph.label) : json(nullptr);
  json nodes = json::array();
  for (Index i = 0; i < graph.node_count(); ++i)
    nodes.push_back({{"id", graph.node_ids[i]}, {"attr", vector_to_json(graph.node_attrs[i])}});
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const Edge& e : graph.edges)
    edges.push_back({{"u", graph.node_ids[e.u]}, {"v", graph.node_ids[e.v]}, {"attr", vector_to_json(e.attr)}});
  j["edges"] = std::move(edges);
  return j;
}

AttributedGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::data, "graph record must be a JSON object");
  AttributedGraph g;
  g.id = j.value("id", std::string{});
  const std::string where = "graph '" + g.id + "'";
  if (j.contains("label") && !j["label"].is_null()) g.label = j["label"].get<std::string>();

  std::unordered_map<std::string, Index> index;
  for (const auto& node : j.at("nodes")) {
    const auto nid = node.at("id").get<std::string>();
    if (!index.emplace(nid, g.node_count()).second)
      throw Error(ErrorKind::data, where + ": duplicate node id '" + nid + "'");
    g.node_ids.push_back(nid);
    g.node_attrs.push_back(vector_from_json(node.at("attr"), where + " node '" + nid + "'"));
  }
  for (const auto& edge : j.at("edges")) {
    const auto u = edge.at("u").get<std::string>();
    const auto v = edge.at("v").get<std::string>();
    const auto iu = index.find(u);
    const auto iv = index.find(v);
    if (iu == index.end() || iv == index.end())
      throw Error(ErrorKind::data, where + ": dangling edge (" + u + ", " + v + ")");
    g.edges.push_back({iu->second, iv->second, vector_from_json(edge.at("attr"), where + " edge")});
  }
  return g;
}

std::string serialize_graph(const AttributedGraph& graph) {
  return graph_to_json(canonical_order(graph)).dump();
}

AttributedGraph parse_graph(const std::string& line) {
  try {
    return graph_from_json(json::parse(line));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, std::string("malformed graph record: ") + e.what());
  }
}

std::string serialize_dataset(const GraphDataset& dataset) {
  std::string out = json{{"node_dim", dataset.node_dim},
                         {"edge_dim", dataset.edge_dim},
                         {"categories", dataset.categories}}
                        .dump();
  out += '\n';
  for (const auto& g : dataset.graphs) {
    out += serialize_graph(g);
    out += '\n';
  }
  return out;
}

GraphDataset parse_dataset(std::istream& in) {
  GraphDataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (!have_header) {
        const json h = json::parse(line);
        ds.node_dim = h.at("node_dim").get<Index>();
        ds.edge_dim = h.at("edge_dim").get<Index>();
        ds.categories = h.at("categories").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      ds.graphs.push_back(graph_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::data, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorKind::data, "dataset has no header line");
  if (auto v = validate(ds); !v) throw Error(ErrorKind::data, v.reason);
  return ds;
}

GraphDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::data, "cannot read '" + path.string() + "'");
  return parse_dataset(in);
}

void write_dataset(const std::filesystem::path& path, const GraphDataset& dataset) {
  write_file_atomic(path, serialize_dataset(dataset));
}

}  // namespace ragkit
