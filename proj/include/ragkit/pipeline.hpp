#pragma once

#include "ragkit/classify.hpp"
#include "ragkit/embedding.hpp"
#include "ragkit/metrics.hpp"
#include "ragkit/model.hpp"
#include "ragkit/svm.hpp"
#include "ragkit/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ragkit {

inline constexpr const char* kVersion = "ragkit 0.1.0";

struct ExperimentConfig {
  std::string train_path;  ///< empty: synthesize
  std::string test_path;
  DistortionSpec synth;
  Index per_class = 50;
  std::vector<double> levels{0.05, 0.10, 0.15, 0.20};
  AnnealSchedule schedule;
  ModelParams model;
  std::vector<KernelSpec> grid = default_kernel_grid();
  int folds = 5;
  std::vector<int> knn_candidates{1, 3, 5, 7, 9};
  int knn_k = 0;  ///< 0: choose by leave-one-out on the training split
  bool baseline_knn = true;
  bool baseline_ml = true;
  double alpha = 0.05;
  double svm_tolerance = 1e-3;
  std::string out_dir = "ragkit-out";

  Validation check() const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Fields missing from j keep the values already in base.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

nlohmann::json kernel_to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const nlohmann::json& j);

struct FitOutcome {
  std::vector<RandomGraphModel> models;  ///< category order
  std::vector<std::uint64_t> match_calls;
  std::vector<double> dataset_log_likelihood;
};

FitOutcome fit_models(const GraphDataset& train, const ModelParams& params, const AnnealSchedule& schedule,
                      bool diagnostics = true);

nlohmann::json metrics_json(const PredictionSet& set);

struct ClassifyOutcome {
  KernelSpec chosen;
  PredictionSet lf;
  std::optional<PredictionSet> ml;
  std::optional<PredictionSet> knn;
  int knn_k = 0;
  nlohmann::json metrics;
};

/// Model selection, training and prediction on standardized features, plus
/// the requested baselines. kNN needs the graph datasets.
ClassifyOutcome classify_embeddings(const ExperimentConfig& config, const std::vector<std::string>& categories,
                                    const std::vector<LikelihoodEmbedding>& train_raw,
                                    const std::vector<LikelihoodEmbedding>& test_raw,
                                    const GraphDataset* train_graphs, const GraphDataset* test_graphs);

struct LevelResult {
  double level = 0.0;
  ClassifyOutcome outcome;
  std::uint64_t fit_match_calls = 0;
  std::uint64_t embed_match_calls = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// Synthesize, fit, embed, classify one distortion level; writes every
/// artifact under dir when given.
LevelResult run_level(const ExperimentConfig& config, double level, const std::filesystem::path* dir);

struct Table1 {
  std::vector<LevelResult> levels;
};

Table1 run_table1(const ExperimentConfig& config, bool write_outputs);
std::string table1_csv(const Table1& t);

std::string roc_csv(const std::vector<RocPoint>& points);

}  // namespace ragkit
