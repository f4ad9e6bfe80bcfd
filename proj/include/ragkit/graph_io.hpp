#pragma once

#include "ragkit/graph.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <string>

namespace ragkit {

// JSON-Lines dataset files: a header line
//   {"node_dim": int, "edge_dim": int, "categories": [str...]}
// followed by one graph object per line
//   {"id": str, "label": str|null, "nodes": [{"id": str, "attr": [num...]}...],
//    "edges": [{"u": str, "v": str, "attr": [num...]}...]}

nlohmann::json graph_to_json(const AttributedGraph& graph);
AttributedGraph graph_from_json(const nlohmann::json& j);

/// Canonically ordered, full-precision serialization of one graph (no newline).
std::string serialize_graph(const AttributedGraph& graph);
AttributedGraph parse_graph(const std::string& line);

std::string serialize_dataset(const GraphDataset& dataset);
GraphDataset parse_dataset(std::istream& in);
GraphDataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const GraphDataset& dataset);

}  // namespace ragkit
