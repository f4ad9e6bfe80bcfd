#include "fixtures.hpp"
#include "ragkit/classify.hpp"
#include "ragkit/embedding.hpp"
#include "ragkit/synth.hpp"

#include <gtest/gtest.h>

using namespace ragkit;
using fixture::vec;

namespace {

std::vector<RandomGraphModel> fit_all(const GraphDataset& train) {
  std::vector<RandomGraphModel> models;
  for (const auto& c : train.categories) models.push_back(fit(train.slice(c), c));
  return models;
}

}  // namespace

TEST(Embedding, OneMatchPerGraphAndPrototype) {
  DistortionSpec spec;
  const auto [train, test] = make_dataset(spec, 3);
  const auto models = fit_all(train);
  GraphDataset three = test;
  three.graphs.resize(3);
  const auto before = match_call_counter().load();
  const auto e = embed_dataset(models, three);
  EXPECT_EQ(match_call_counter().load() - before, 6u);
  ASSERT_EQ(e.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(e[i].graph_id, three.graphs[i].id);
    EXPECT_EQ(e[i].features.size(), 2);
    EXPECT_EQ(e[i].features(0), best_log_likelihood(models[0], three.graphs[i]));
  }
}

TEST(Embedding, Deterministic) {
  DistortionSpec spec;
  spec.level = 0.15;
  const auto [train, test] = make_dataset(spec, 5);
  const auto models = fit_all(train);
  const auto a = embed_dataset(models, test);
  const auto b = embed_dataset(models, test);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].features, b[i].features);
}

TEST(Embedding, MaxLikelihoodSeparatesLowDistortion) {
  DistortionSpec spec;
  const auto [train, test] = make_dataset(spec, 15);
  const auto models = fit_all(train);
  EXPECT_GE(rag_ml_classify(models, test).accuracy(), 0.9);
}

TEST(Embedding, OrderModelsFollowsCategories) {
  RandomGraphModel a, b;
  a.category = "a";
  b.category = "b";
  const auto ordered = order_models({b, a}, {"a", "b"});
  EXPECT_EQ(ordered[0].category, "a");
  EXPECT_THROW(order_models({a}, {"a", "b"}), Error);
}

TEST(Standardize, TrainStatisticsApplied) {
  const std::vector<LikelihoodEmbedding> train{{"x", "a", vec({1.0, 5.0})}, {"y", "b", vec({3.0, 5.0})}};
  const auto st = feature_stats(train);
  EXPECT_EQ(st.mean, vec({2.0, 5.0}));
  EXPECT_EQ(st.scale(1), 1.0);  // constant coordinate
  const auto z = standardize(train, st);
  EXPECT_NEAR(z[0].features(0), -z[1].features(0), 1e-15);
  EXPECT_EQ(z[0].features(1), 0.0);
  const auto back = stats_from_json(stats_to_json(st));
  EXPECT_EQ(back.mean, st.mean);
  EXPECT_EQ(back.scale, st.scale);
  EXPECT_THROW(feature_stats({}), Error);
}
