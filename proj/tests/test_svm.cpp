#include "fixtures.hpp"
#include "ragkit/svm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace ragkit;
using fixture::vec;

namespace {

KernelSpec poly(int degree, double c) {
  KernelSpec k;
  k.kind = KernelSpec::Kind::polynomial;
  k.degree = degree;
  k.c = c;
  return k;
}

KernelSpec rbf(double gamma, double c) {
  KernelSpec k;
  k.gamma = gamma;
  k.c = c;
  return k;
}

std::vector<LikelihoodEmbedding> blobs(int per_class, double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<LikelihoodEmbedding> out;
  for (int i = 0; i < per_class; ++i)
    for (int c = 0; c < 2; ++c) {
      const double shift = c == 0 ? -gap : gap;
      out.push_back({"g" + std::to_string(out.size()), c == 0 ? "a" : "b", vec({shift + n(rng), shift + n(rng)})});
    }
  return out;
}

}  // namespace

TEST(Kernel, Values) {
  EXPECT_DOUBLE_EQ(poly(2, 1)(vec({1.0, 2.0}), vec({3.0, 0.5})), 25.0);
  EXPECT_DOUBLE_EQ(rbf(0.5, 1)(vec({0.0}), vec({2.0})), std::exp(-2.0));
  EXPECT_FALSE(rbf(0.0, 1).check());
  EXPECT_FALSE(poly(0, 1).check());
  EXPECT_EQ(default_kernel_grid().size(), 28u);
}

TEST(BinarySvm, SymmetricPairHasZeroAtMidpoint) {
  const auto m = train_binary_svm({vec({1.0}), vec({-1.0})}, {1, -1}, poly(1, 100));
  EXPECT_NEAR(m.decision(vec({0.0})), 0.0, 1e-6);
  EXPECT_NEAR(m.decision(vec({1.0})), 1.0, 1e-3);
  EXPECT_NEAR(m.decision(vec({-1.0})), -1.0, 1e-3);
}

TEST(BinarySvm, SeparatesLinearData) {
  const auto data = blobs(30, 2.0, 1);
  std::vector<Vector> x;
  std::vector<int> y;
  for (const auto& e : data) {
    x.push_back(e.features);
    y.push_back(*e.label == "b" ? 1 : -1);
  }
  const auto m = train_binary_svm(x, y, poly(1, 10));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_GT(y[i] * m.decision(x[i]), 0.0);
}

TEST(BinarySvm, GaussianKernelSolvesXor) {
  const std::vector<Vector> x{vec({1, 1}), vec({-1, -1}), vec({1, -1}), vec({-1, 1})};
  const std::vector<int> y{1, 1, -1, -1};
  const auto m = train_binary_svm(x, y, rbf(1.0, 100));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_GT(y[i] * m.decision(x[i]), 0.5);
}

TEST(BinarySvm, DuplicatesAndOrderDoNotMatter) {
  const auto data = blobs(15, 0.7, 2);
  std::vector<Vector> x;
  std::vector<int> y;
  for (const auto& e : data) {
    x.push_back(e.features);
    y.push_back(*e.label == "b" ? 1 : -1);
  }
  const auto base = train_binary_svm(x, y, rbf(0.5, 1), {1e-8});
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), std::mt19937_64(3));
  std::vector<Vector> px;
  std::vector<int> py;
  for (auto i : idx) {
    px.push_back(x[i]);
    py.push_back(y[i]);
  }
  const auto perm = train_binary_svm(px, py, rbf(0.5, 1), {1e-8});
  for (const auto& v : x) EXPECT_NEAR(base.decision(v), perm.decision(v), 1e-6);

  const auto hard = train_binary_svm({vec({1.0}), vec({-1.0})}, {1, -1}, poly(1, 100));
  const auto dup = train_binary_svm({vec({1.0}), vec({1.0}), vec({-1.0}), vec({-1.0})}, {1, 1, -1, -1}, poly(1, 100));
  for (double t : {-2.0, -0.3, 0.0, 0.8, 3.0}) EXPECT_NEAR(hard.decision(vec({t})), dup.decision(vec({t})), 1e-6);
}

TEST(BinarySvm, NeedsBothClasses) {
  try {
    train_binary_svm({vec({1.0}), vec({2.0})}, {1, 1}, poly(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}

TEST(Classifier, TrainAndPredict) {
  const auto train = blobs(20, 2.0, 4);
  const auto test = blobs(20, 2.0, 5);
  const auto state = svm_train(train, {"a", "b"}, poly(1, 1));
  const auto p = svm_predict(state, test);
  EXPECT_GE(p.accuracy(), 0.95);
  for (const auto& item : p.items) EXPECT_GE(item.score, 0.0);
}

TEST(ModelSelect, Folds) {
  const std::vector<std::string> labels{"a", "b", "a", "a", "b", "b", "a"};
  EXPECT_EQ(stratified_folds(labels, {"a", "b"}, 2), (std::vector<int>{0, 0, 1, 0, 1, 0, 1}));
  EXPECT_THROW(stratified_folds(labels, {"a", "b"}, 4), Error);
  EXPECT_THROW(stratified_folds(labels, {"a", "b"}, 1), Error);
}

TEST(ModelSelect, FirstBestInGridOrder) {
  const auto train = blobs(10, 3.0, 6);
  // every candidate separates these blobs perfectly
  const auto chosen = model_select(train, {"a", "b"}, {poly(1, 1), poly(1, 10), rbf(0.1, 1)}, 5);
  EXPECT_EQ(chosen.describe(), poly(1, 1).describe());
  EXPECT_DOUBLE_EQ(cross_validate(train, {"a", "b"}, poly(1, 1), 5), 1.0);
}

TEST(ModelSelect, PrefersWorkingKernel) {
  std::vector<LikelihoodEmbedding> xor_data;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 0.15);
  for (int i = 0; i < 40; ++i) {
    const double sx = (i & 1) ? 1 : -1;
    const double sy = (i & 2) ? 1 : -1;
    xor_data.push_back({"g" + std::to_string(i), sx * sy > 0 ? "a" : "b", vec({sx + n(rng), sy + n(rng)})});
  }
  const auto chosen = model_select(xor_data, {"a", "b"}, {poly(1, 1), rbf(1.0, 10)}, 5);
  EXPECT_EQ(chosen.kind, KernelSpec::Kind::gaussian);
}
