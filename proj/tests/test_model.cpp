#include "fixtures.hpp"
#include "oracles.hpp"
#include "ragkit/gaussian.hpp"
#include "ragkit/model.hpp"
#include "ragkit/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ragkit;
using fixture::vec;

namespace {

const double kLogRoot2Pi = -0.5 * std::log(2 * std::numbers::pi);

double min_eigenvalue(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

Morphism identity_on(const AttributedGraph& g, const RandomGraphModel& m) {
  std::vector<Index> map(g.node_count());
  for (Index a = 0; a < g.node_count(); ++a) map[a] = a;
  return make_morphism(GraphStructure::of(g), m.structure(), map);
}

}  // namespace

TEST(Prototype, CopiesLargestGraph) {
  const auto small = fixture::graph("s", {vec({9.0})});
  const auto big = fixture::graph("b", {vec({1.0}), vec({2.0})}, {{0, 1, 0.5}});
  const auto m = init_prototype({small, big}, "c");
  ASSERT_EQ(m.node_count(), 2);
  ASSERT_EQ(m.edge_count(), 1);
  EXPECT_EQ(m.nodes[1].mean, vec({2.0}));
  EXPECT_EQ(m.nodes[0].covariance, Matrix::Identity(1, 1));
  EXPECT_EQ(m.nodes[0].p_occur, 1.0);
  EXPECT_EQ(m.edges[0].p_occur_given_endpoints, 1.0);
  EXPECT_EQ(m.sample_count, 1);
  EXPECT_TRUE(validate(m));
}

TEST(Prototype, FirstLargestWinsTies) {
  const auto a = fixture::graph("a", {vec({1.0}), vec({1.0})});
  const auto b = fixture::graph("b", {vec({5.0}), vec({5.0})});
  EXPECT_EQ(init_prototype({a, b}, "c").nodes[0].mean, vec({1.0}));
}

TEST(Prototype, EmptyClassIsDataError) {
  try {
    init_prototype({}, "c");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}

TEST(Observe, SecondSampleAveragesMeanAndCovariance) {
  auto m = init_prototype({fixture::graph("a", {vec({0.0})})}, "c");
  const auto g = fixture::graph("b", {vec({1.0})});
  observe(m, g, identity_on(g, m));
  EXPECT_DOUBLE_EQ(m.nodes[0].mean(0), 0.5);
  // (1 - 1/2) * 1 + 1/2 * (1 - 0)^2
  EXPECT_DOUBLE_EQ(m.nodes[0].covariance(0, 0), 1.0);
  EXPECT_EQ(m.sample_count, 2);
}

TEST(Observe, ConstantRateCovariance) {
  auto m = init_prototype({fixture::graph("a", {vec({0.0})})}, "c");
  const auto g = fixture::graph("b", {vec({2.0})});
  observe(m, g, identity_on(g, m), 0.1);
  EXPECT_NEAR(m.nodes[0].mean(0), 0.2, 1e-15);
  // 0.9 * 1 + 0.1 * 4
  EXPECT_NEAR(m.nodes[0].covariance(0, 0), 1.3, 1e-15);
}

TEST(Observe, OccurrenceFrequencies) {
  const auto full = fixture::graph("a", {vec({0.0}), vec({1.0})}, {{0, 1, 0.0}});
  auto m = init_prototype({full}, "c");
  const auto only0 = fixture::graph("b", {vec({0.0})});
  const auto no_edge = fixture::graph("c", {vec({0.0}), vec({1.0})});
  observe(m, full, identity_on(full, m));
  observe(m, no_edge, identity_on(no_edge, m));
  observe(m, only0, identity_on(only0, m));
  EXPECT_DOUBLE_EQ(m.nodes[0].p_occur, 1.0);
  EXPECT_DOUBLE_EQ(m.nodes[1].p_occur, 0.75);
  // edge present in 2 of the 3 samples where both endpoints appear
  EXPECT_DOUBLE_EQ(m.edges[0].p_occur_given_endpoints, 2.0 / 3.0);
  EXPECT_TRUE(validate(m));
}

TEST(Observe, RejectsInvalidMorphismAndRate) {
  auto m = init_prototype({fixture::graph("a", {vec({0.0}), vec({1.0})})}, "c");
  const auto g = fixture::graph("b", {vec({0.0}), vec({1.0})});
  Morphism bad;
  bad.node_map = {0, 0};
  EXPECT_THROW(observe(m, g, bad), Error);
  EXPECT_THROW(observe(m, g, identity_on(g, m), 0.0), Error);
  EXPECT_THROW(observe(m, g, identity_on(g, m), 1.5), Error);
}

TEST(Fit, InverseCountRateGivesRunningMean) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(5.0, 1.0);
  std::vector<AttributedGraph> graphs;
  double sum = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x = n(rng);
    sum += x;
    graphs.push_back(fixture::graph("g" + std::to_string(k), {vec({x})}));
  }
  FitReport report;
  const auto m = fit(graphs, "c", {}, {}, &report);
  EXPECT_NEAR(m.nodes[0].mean(0), sum / 50, 1e-12);
  EXPECT_EQ(report.match_calls, 49u);
  EXPECT_EQ(m.sample_count, 50);
}

TEST(Fit, IdenticalGraphsAreFixedPoint) {
  const auto g = fixture::graph("a", {vec({0.5, -1.0}), vec({2.0, 0.0}), vec({-1.0, 1.0})}, {{0, 1, 0.3}, {1, 2, -0.7}});
  std::vector<AttributedGraph> graphs(10, g);
  const auto m = fit(graphs, "c");
  for (Index i = 0; i < 3; ++i) {
    EXPECT_EQ(m.nodes[i].mean, g.node_attrs[i]);
    EXPECT_EQ(m.nodes[i].p_occur, 1.0);
    // the prototype's unit covariance decays as 1/t
    EXPECT_NEAR((m.nodes[i].covariance - 0.1 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
  for (const auto& e : m.edges) EXPECT_EQ(e.p_occur_given_endpoints, 1.0);
}

TEST(Fit, CovarianceStaysAboveFloorForEveryRate) {
  DistortionSpec spec;
  spec.level = 0.2;
  std::vector<AttributedGraph> graphs;
  RandomStream brng(1, 2, 0, 0);
  const auto base = generate_base(spec, 0, brng);
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomStream rng(1, 0, 0, s);
    graphs.push_back(distort(base, spec, rng));
  }
  for (const char* rate : {"1/t", "0.01", "0.5", "1.0"}) {
    ModelParams p;
    p.eta = LearningRate::parse(rate);
    auto m = init_prototype(graphs, "c", p);
    for (const auto& g : graphs) {
      observe(m, g, match(g, m.structure(), likelihood_compatibility(m)).morphism);
      ASSERT_TRUE(validate(m)) << rate;
      for (const auto& law : m.nodes) EXPECT_GE(min_eigenvalue(law.covariance), p.lambda_min * (1 - 1e-9));
      for (const auto& law : m.edges) EXPECT_GE(min_eigenvalue(law.covariance), p.lambda_min * (1 - 1e-9));
    }
  }
}

TEST(LogLikelihood, SingleNodeAtMean) {
  const auto g = fixture::graph("a", {vec({0.0})});
  const auto m = init_prototype({g}, "c");
  // p clamps to 1 - 1e-6
  EXPECT_NEAR(log_likelihood(m, g, identity_on(g, m)), kLogRoot2Pi + std::log1p(-1e-6), 1e-12);
  const auto none = make_morphism(GraphStructure::of(g), m.structure(), {kUnmatched});
  // outlier density plus ln q with q = 1e-6
  EXPECT_NEAR(log_likelihood(m, g, none), 2 * std::log(1e-6), 1e-9);
  EXPECT_NEAR(std::log(1e-6), -13.8155, 1e-4);
}

TEST(LogLikelihood, TermsOfHalfProbabilityModel) {
  auto m = init_prototype({fixture::graph("a", {vec({0.0}), vec({0.0})}, {{0, 1, 0.0}})}, "c");
  for (auto& n : m.nodes) n.p_occur = 0.5;
  m.edges[0].p_occur_given_endpoints = 0.5;
  // one node present: p * q, the edge is not eligible
  const auto g = fixture::graph("b", {vec({0.0})});
  const auto t = log_likelihood_terms(m, g, identity_on(g, m));
  EXPECT_NEAR(std::exp(t.structural), 0.25, 1e-15);
  EXPECT_NEAR(t.attribute, kLogRoot2Pi, 1e-15);
  EXPECT_EQ(t.outlier, 0.0);
  // empty graph: q * q
  const AttributedGraph empty;
  EXPECT_NEAR(std::exp(log_likelihood_terms(m, empty, make_morphism({}, m.structure(), {})).structural), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(best_log_likelihood(m, empty)), 0.25, 1e-15);
}

TEST(LogLikelihood, StructuralMassSumsToOne) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto m = oracle::random_model(1 + t % 4, t % 5, 1, 1, rng);
    EXPECT_NEAR(oracle::structural_probability_mass(m), 1.0, 1e-9);
  }
}

TEST(LogLikelihood, DimensionMismatchIsDataError) {
  const auto m = init_prototype({fixture::graph("a", {vec({0.0})})}, "c");
  const auto g = fixture::graph("b", {vec({0.0, 1.0})});
  try {
    best_log_likelihood(m, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}

TEST(LogLikelihood, MatcherFindsExhaustiveOptimumOnSmallModels) {
  std::mt19937_64 rng(7);
  int hits = 0;
  for (int t = 0; t < 30; ++t) {
    const auto m = oracle::random_model(4, 4, 2, 1, rng);
    const auto g = oracle::sample_outcome(m, rng, nullptr);
    const double best = oracle::exhaustive_log_likelihood(m, g);
    const double found = best_log_likelihood(m, g);
    EXPECT_LE(found, best + 1e-9);
    if (found >= best - 0.05 * std::abs(best)) ++hits;
  }
  EXPECT_GE(hits, 28);
}

TEST(Gaussian, NaturalGradientIsDisplacement) {
  std::mt19937_64 rng(8);
  for (Index dim = 1; dim <= 4; ++dim) {
    for (int t = 0; t < 25; ++t) {
      const Vector x = oracle::normal_vector(dim, rng);
      const Vector mu = oracle::normal_vector(dim, rng);
      const Matrix cov = oracle::random_spd(dim, rng);
      const Vector g = oracle::finite_difference_mean_gradient(x, mu, cov);
      const Vector d = x - mu;
      EXPECT_LE((cov * g - d).norm(), 1e-5 * std::max(1.0, d.norm()));
      EXPECT_LE((gaussian_mean_gradient(x, mu, cov) - cov.llt().solve(d)).norm(), 1e-10);
    }
  }
}

TEST(Gaussian, FloorRaisesOnlySmallEigenvalues) {
  Matrix c(2, 2);
  c << 1.0, 0.0, 0.0, 1e-8;
  const Matrix f = floor_eigenvalues(c, 1e-4);
  EXPECT_NEAR(f(1, 1), 1e-4, 1e-15);
  EXPECT_NEAR(f(0, 0), 1.0, 1e-15);
  EXPECT_EQ(floor_eigenvalues(Matrix(Matrix::Identity(2, 2)), 1e-4), Matrix::Identity(2, 2));
}

TEST(Params, RateParsing) {
  EXPECT_EQ(LearningRate::parse("1/t").kind, LearningRate::Kind::inverse_count);
  EXPECT_EQ(LearningRate::parse("0.5").value, 0.5);
  EXPECT_THROW(LearningRate::parse("0"), Error);
  EXPECT_THROW(LearningRate::parse("fast"), Error);
  ModelParams p;
  EXPECT_TRUE(p.check());
  p.p_min = 0.6;
  EXPECT_FALSE(p.check());
}
