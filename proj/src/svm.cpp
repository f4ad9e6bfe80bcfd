#include "ragkit/svm.hpp"

#include "ragkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ragkit {

Validation KernelSpec::check() const {
  if (!(c > 0)) return Validation::fail("C must be positive");
  if (kind == Kind::polynomial && degree < 1) return Validation::fail("polynomial degree must be at least 1");
  if (kind == Kind::gaussian && !(gamma > 0)) return Validation::fail("gaussian gamma must be positive");
  return {};
}

std::string KernelSpec::describe() const {
  std::ostringstream ss;
  if (kind == Kind::polynomial)
    ss << "polynomial(degree=" << degree << ", C=" << c << ")";
  else
    ss << "gaussian(gamma=" << gamma << ", C=" << c << ")";
  return ss.str();
}

double KernelSpec::operator()(const Vector& x, const Vector& y) const {
  if (kind == Kind::polynomial) return std::pow(x.dot(y) + 1.0, degree);
  return std::exp(-gamma * (x - y).squaredNorm());
}

std::vector<KernelSpec> default_kernel_grid() {
  std::vector<KernelSpec> grid;
  const double cs[] = {0.1, 1.0, 10.0, 100.0};
  for (int d : {1, 2, 3})
    for (double c : cs) grid.push_back({KernelSpec::Kind::polynomial, d, 1.0, c});
  for (double g : {0.01, 0.1, 1.0, 10.0})
    for (double c : cs) grid.push_back({KernelSpec::Kind::gaussian, 2, g, c});
  return grid;
}

double BinarySvm::decision(const Vector& x) const {
  double f = bias;
  for (std::size_t i = 0; i < support.size(); ++i) f += coef[i] * kernel(support[i], x);
  return f;
}

BinarySvm train_binary_svm(const std::vector<Vector>& x, const std::vector<int>& y, const KernelSpec& kernel,
                           const SvmOptions& options) {
  if (auto v = kernel.check(); !v) throw Error(ErrorKind::usage, "kernel: " + v.reason);
  const Index n = static_cast<Index>(x.size());
  if (n == 0 || static_cast<Index>(y.size()) != n) throw Error(ErrorKind::data, "SVM training set is empty or mislabeled");
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!has_pos || !has_neg) throw Error(ErrorKind::data, "SVM training needs both classes");

  Matrix k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x[i], x[j]);

  constexpr double tau = 1e-12;
  const double cap = kernel.c;
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  const auto yd = [&](Index t) { return static_cast<double>(y[t]); };
  const auto upper = [&](Index t) { return alpha(t) >= cap; };
  const auto lower = [&](Index t) { return alpha(t) <= 0; };

  for (long iter = 0; iter < options.max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Index i = -1;
    for (Index t = 0; t < n; ++t) {
      const bool in_up = y[t] == 1 ? !upper(t) : !lower(t);
      if (in_up && -yd(t) * grad(t) > gmax) {
        gmax = -yd(t) * grad(t);
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Index j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      const bool in_low = y[t] == 1 ? !lower(t) : !upper(t);
      if (!in_low) continue;
      const double v = yd(t) * grad(t);  // = -(-y G)
      gmax2 = std::max(gmax2, v);
      const double diff = gmax + v;
      if (i >= 0 && diff > 0) {
        double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (quad <= 0) quad = tau;
        const double obj = -(diff * diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < options.tolerance) break;

    const double ai_old = alpha(i);
    const double aj_old = alpha(j);
    if (y[i] != y[j]) {
      double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
      }
      if (diff > 0) {
        if (alpha(i) > cap) { alpha(i) = cap; alpha(j) = cap - diff; }
      } else {
        if (alpha(j) > cap) { alpha(j) = cap; alpha(i) = cap + diff; }
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > cap) {
        if (alpha(i) > cap) { alpha(i) = cap; alpha(j) = sum - cap; }
        if (alpha(j) > cap) { alpha(j) = cap; alpha(i) = sum - cap; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    const double di = alpha(i) - ai_old;
    const double dj = alpha(j) - aj_old;
    for (Index t = 0; t < n; ++t)
      grad(t) += yd(t) * (yd(i) * k(i, t) * di + yd(j) * k(j, t) * dj);
  }

  // Offset from free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = yd(t) * grad(t);
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  const double rho = free > 0 ? sum_free / static_cast<double>(free) : (ub + lb) / 2;

  BinarySvm svm;
  svm.kernel = kernel;
  svm.bias = -rho;
  for (Index t = 0; t < n; ++t) {
    if (alpha(t) <= 0) continue;
    svm.support.push_back(x[t]);
    svm.coef.push_back(alpha(t) * yd(t));
  }
  return svm;
}

Vector SvmClassifier::decisions(const Vector& x) const {
  if (x.size() != feature_dim) throw Error(ErrorKind::data, "feature dimension differs from the trained classifier");
  const Index k = static_cast<Index>(categories.size());
  Vector d(k);
  if (k == 2) {
    const double f = machines.front().decision(x);
    d << -f, f;
  } else {
    for (Index c = 0; c < k; ++c) d(c) = machines[c].decision(x);
  }
  return d;
}

SvmClassifier svm_train(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                        const KernelSpec& kernel, const SvmOptions& options) {
  if (train.empty()) throw Error(ErrorKind::data, "SVM training set is empty");
  std::vector<Vector> x;
  std::vector<Index> cls;
  for (const auto& e : train) {
    const Index c = e.label ? static_cast<Index>(std::find(categories.begin(), categories.end(), *e.label) -
                                                 categories.begin())
                            : static_cast<Index>(categories.size());
    if (c >= static_cast<Index>(categories.size()))
      throw Error(ErrorKind::data, "training item '" + e.graph_id + "' has no known label");
    x.push_back(e.features);
    cls.push_back(c);
  }
  std::vector<Index> present = cls;
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  if (present.size() < 2) throw Error(ErrorKind::data, "SVM training needs at least two categories");

  SvmClassifier state;
  state.categories = categories;
  state.feature_dim = x.front().size();
  const Index k = static_cast<Index>(categories.size());
  const auto machine_for = [&](Index positive) {
    std::vector<int> y(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) y[i] = cls[i] == positive ? 1 : -1;
    return train_binary_svm(x, y, kernel, options);
  };
  if (k == 2) {
    state.machines.push_back(machine_for(1));
  } else {
    for (Index c = 0; c < k; ++c) {
      if (std::find(cls.begin(), cls.end(), c) == cls.end()) {
        BinarySvm never;  // absent category: constant -1
        never.kernel = kernel;
        never.bias = -1.0;
        state.machines.push_back(never);
      } else {
        state.machines.push_back(machine_for(c));
      }
    }
  }
  return state;
}

PredictionSet svm_predict(const SvmClassifier& state, const std::vector<LikelihoodEmbedding>& items) {
  PredictionSet out;
  out.categories = state.categories;
  for (const auto& e : items) {
    const Vector d = state.decisions(e.features);
    Index best = 0;
    for (Index c = 1; c < d.size(); ++c)
      if (d(c) > d(best)) best = c;
    out.items.push_back({e.graph_id, e.label.value_or(""), state.categories[best], d(best)});
  }
  return out;
}

std::vector<int> stratified_folds(const std::vector<std::string>& labels, const std::vector<std::string>& categories,
                                  int folds) {
  if (folds < 2) throw Error(ErrorKind::usage, "cross-validation needs at least 2 folds");
  std::vector<int> fold(labels.size(), 0);
  for (const auto& c : categories) {
    int next = 0;
    long count = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) {
        fold[i] = next;
        next = (next + 1) % folds;
        ++count;
      }
    if (count > 0 && count < folds)
      throw Error(ErrorKind::usage, "category '" + c + "' has fewer items than folds");
  }
  return fold;
}

double cross_validate(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                      const KernelSpec& kernel, int folds, const SvmOptions& options) {
  std::vector<std::string> labels;
  for (const auto& e : train) labels.push_back(e.label.value_or(""));
  const auto fold = stratified_folds(labels, categories, folds);
  double total = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<LikelihoodEmbedding> fit_part, held;
    for (std::size_t i = 0; i < train.size(); ++i) (fold[i] == f ? held : fit_part).push_back(train[i]);
    const auto state = svm_train(fit_part, categories, kernel, options);
    total += svm_predict(state, held).accuracy();
  }
  return total / folds;
}

KernelSpec model_select(const std::vector<LikelihoodEmbedding>& train, const std::vector<std::string>& categories,
                        const std::vector<KernelSpec>& grid, int folds, const SvmOptions& options) {
  if (grid.empty()) throw Error(ErrorKind::usage, "empty hyperparameter grid");
  std::vector<std::string> labels;
  for (const auto& e : train) labels.push_back(e.label.value_or(""));
  stratified_folds(labels, categories, folds);  // validates fold count
  std::vector<double> score(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) { score[g] = cross_validate(train, categories, grid[g], folds, options); });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (score[g] > score[best]) best = g;
  return grid[best];
}

}  // namespace ragkit
