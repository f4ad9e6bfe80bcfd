#pragma once

#include "ragkit/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ragkit {

nlohmann::json model_to_json(const RandomGraphModel& model);
RandomGraphModel model_from_json(const nlohmann::json& j);

std::string serialize_model(const RandomGraphModel& model);
RandomGraphModel parse_model(const std::string& text);

RandomGraphModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const RandomGraphModel& model);

}  // namespace ragkit
