#pragma once

#include "ragkit/graph.hpp"

#include <cstdint>
#include <random>
#include <utility>

namespace ragkit {

struct DistortionSpec {
  double level = 0.05;
  Index base_nodes = 10;
  double edge_density = 0.4;
  Index node_dim = 2;
  Index edge_dim = 1;
  double attr_noise_sigma = 1.0;
  std::uint64_t seed = 7;

  Validation check() const;
};

/// Counter-based stream: the engine for a key depends only on the key, so
/// samples never shift when other samples are added or removed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t split, std::uint64_t category, std::uint64_t sample);

  std::mt19937_64& engine() { return engine_; }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  Index below(Index n) { return std::uniform_int_distribution<Index>(0, n - 1)(engine_); }

 private:
  std::mt19937_64 engine_;
};

/// Streams used by make_dataset.
enum class Split : std::uint64_t { train = 0, test = 1, base = 2 };

/// Mean of category `category`'s node attributes: +-(1,...,1)/sqrt(dim).
Vector class_center(Index category, Index dim);

/// Random spanning tree plus Erdos-Renyi edges; node attributes around the
/// class center, edge attributes standard normal.
AttributedGraph generate_base(const DistortionSpec& spec, Index category, RandomStream& rng);

struct DistortionStats {
  Index deleted_nodes = 0;
  Index deleted_edges = 0;  ///< among edges whose endpoints both survived
  Index spurious_edges = 0;
  Index spurious_nodes = 0;
  int attempts = 0;
};

/// Deletes nodes and edges, inserts spurious edges and at most one spurious
/// node, perturbs attributes and permutes node identities. Retries up to 10
/// times when every node is deleted.
AttributedGraph distort(const AttributedGraph& base, const DistortionSpec& spec, RandomStream& rng,
                        DistortionStats* stats = nullptr);

/// per_class distorted copies of each class's base graph in both splits.
std::pair<GraphDataset, GraphDataset> make_dataset(const DistortionSpec& spec, Index per_class);

}  // namespace ragkit
