#pragma once

#include "ragkit/predictions.hpp"

#include <utility>
#include <vector>

namespace ragkit {

/// Score oriented toward the positive category (category index 1).
std::vector<double> positive_scores(const PredictionSet& set);
std::vector<bool> positive_flags(const PredictionSet& set);

/// Mann-Whitney formulation; tied pairs count 1/2.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);
double roc_auc(const PredictionSet& set);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Points at every distinct threshold, collinear interior points dropped.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive);

struct McNemarResult {
  long only_a_correct = 0;
  long only_b_correct = 0;
  double p_value = 1.0;
  bool significant = false;
};

/// Exact two-sided binomial p-value for discordant counts (b, c).
double mcnemar_exact_p(long b, long c);
McNemarResult significance_test(const PredictionSet& a, const PredictionSet& b, double alpha = 0.05);

struct ConfusionSummary {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<std::vector<long>> confusion;  ///< [true][predicted]
};

ConfusionSummary summarize(const PredictionSet& set);

}  // namespace ragkit
