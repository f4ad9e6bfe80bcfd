#pragma once

#include "ragkit/graph.hpp"

#include <string>
#include <vector>

namespace ragkit {

struct Prediction {
  std::string graph_id;
  std::string true_label;
  std::string predicted_label;
  double score = 0.0;  ///< confidence in the predicted label
};

struct PredictionSet {
  std::vector<std::string> categories;
  std::vector<Prediction> items;

  double accuracy() const;
};

/// graph_id,true_label,pred_label,score
std::string predictions_to_csv(const PredictionSet& set);
/// Categories are taken from the given list, or sorted labels when empty.
PredictionSet predictions_from_csv(const std::string& text, std::vector<std::string> categories = {});

}  // namespace ragkit
