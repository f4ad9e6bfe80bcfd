#pragma once

#include "ragkit/embedding.hpp"
#include "ragkit/predictions.hpp"

#include <string>
#include <vector>

namespace ragkit {

struct KernelSpec {
  enum class Kind { polynomial, gaussian };
  Kind kind = Kind::gaussian;
  int degree = 2;      ///< polynomial: (x.y + 1)^degree
  double gamma = 1.0;  ///< gaussian: exp(-gamma |x - y|^2)
  double c = 1.0;

  Validation check() const;
  std::string describe() const;
  double operator()(const Vector& x, const Vector& y) const;
};

/// Polynomial degrees {1,2,3} and gaussian gamma {0.01,0.1,1,10}, each with
/// C in {0.1,1,10,100}.
std::vector<KernelSpec> default_kernel_grid();

/// Soft-margin binary machine: f(x) = sum_i coef_i k(sv_i, x) + bias.
struct BinarySvm {
  std::vector<Vector> support;
  std::vector<double> coef;
  double bias = 0.0;
  KernelSpec kernel;

  double decision(const Vector& x) const;
};

struct SvmOptions {
  double tolerance = 1e-3;  ///< KKT violation tolerance
  long max_iterations = 1000000;
};

/// SMO with second-order working set selection; labels are +1 / -1.
BinarySvm train_binary_svm(const std::vector<Vector>& x, const std::vector<int>& y, const KernelSpec& kernel,
                           const SvmOptions& options = {});

/// One machine for two categories (category 1 positive), one-vs-rest otherwise.
struct SvmClassifier {
  std::vector<std::string> categories;
  std::vector<BinarySvm> machines;
  Index feature_dim = 0;

  /// Per-category decision values.
  Vector decisions(const Vector& x) const;
};

SvmClassifier svm_train(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                        const KernelSpec& kernel, const SvmOptions& options = {});

PredictionSet svm_predict(const SvmClassifier& state, const std::vector<LikelihoodEmbedding>& items);

/// Stratified k-fold cross-validation accuracy of one spec.
double cross_validate(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                      const KernelSpec& kernel, int folds, const SvmOptions& options = {});

/// Fold index of every item: each class dealt round-robin in order.
std::vector<int> stratified_folds(const std::vector<std::string>& labels, const std::vector<std::string>& categories,
                                  int folds);

/// Highest mean CV accuracy; first in grid order on ties.
KernelSpec model_select(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                        const std::vector<KernelSpec>& grid, int folds, const SvmOptions& options = {});

}  // namespace ragkit
