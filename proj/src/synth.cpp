#include "ragkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ragkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string node_name(Index i, Index count) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::max<std::size_t>(2, std::to_string(std::max<Index>(count - 1, 0)).size());
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "n" + digits;
}

Vector standard_normal(Index dim, RandomStream& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

Validation DistortionSpec::check() const {
  if (!(level >= 0 && level <= 1)) return Validation::fail("distortion level must lie in [0, 1]");
  if (base_nodes < 2) return Validation::fail("base graphs need at least 2 nodes");
  if (!(edge_density > 0 && edge_density <= 1)) return Validation::fail("edge density must lie in (0, 1]");
  if (node_dim < 1 || edge_dim < 1) return Validation::fail("attribute dimensions must be positive");
  if (!(attr_noise_sigma > 0)) return Validation::fail("attribute noise sigma must be positive");
  return {};
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t split, std::uint64_t category, std::uint64_t sample) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ split);
  h = splitmix64(h ^ category);
  h = splitmix64(h ^ sample);
  engine_.seed(h);
}

Vector class_center(Index category, Index dim) {
  const double sign = category % 2 == 0 ? 1.0 : -1.0;
  return Vector::Constant(dim, sign / std::sqrt(static_cast<double>(dim)));
}

AttributedGraph generate_base(const DistortionSpec& spec, Index category, RandomStream& rng) {
  if (auto v = spec.check(); !v) throw Error(ErrorKind::usage, v.reason);
  const Index n = spec.base_nodes;
  AttributedGraph g;
  g.id = "base-c" + std::to_string(category);
  const Vector center = class_center(category, spec.node_dim);
  for (Index i = 0; i < n; ++i) {
    g.node_ids.push_back(node_name(i, n));
    g.node_attrs.push_back(center + standard_normal(spec.node_dim, rng));
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::set<std::pair<Index, Index>> present;
  for (Index k = 1; k < n; ++k) present.insert(std::minmax(order[k], order[rng.below(k)]));
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (!present.count({u, v}) && rng.bernoulli(spec.edge_density)) present.insert({u, v});
  for (const auto& [u, v] : present) g.edges.push_back({u, v, standard_normal(spec.edge_dim, rng)});
  return g;
}

AttributedGraph distort(const AttributedGraph& base, const DistortionSpec& spec, RandomStream& rng,
                        DistortionStats* stats) {
  if (auto v = spec.check(); !v) throw Error(ErrorKind::usage, v.reason);
  const double level = spec.level;
  const double noise = level * spec.attr_noise_sigma;

  for (int attempt = 1; attempt <= 10; ++attempt) {
    DistortionStats st;
    st.attempts = attempt;
    std::vector<Index> keep;
    for (Index i = 0; i < base.node_count(); ++i)
      if (!rng.bernoulli(level)) keep.push_back(i);
    st.deleted_nodes = base.node_count() - static_cast<Index>(keep.size());
    if (keep.empty()) continue;

    std::vector<Index> new_index(base.node_count(), kUnmatched);
    std::vector<Vector> attrs;
    for (Index i : keep) {
      new_index[i] = static_cast<Index>(attrs.size());
      attrs.push_back(base.node_attrs[i] + noise * standard_normal(base.node_attrs[i].size(), rng));
    }

    std::set<std::pair<Index, Index>> present;
    std::vector<Edge> edges;
    for (const Edge& e : base.edges) {
      const Index u = new_index[e.u];
      const Index v = new_index[e.v];
      if (u == kUnmatched || v == kUnmatched) continue;
      if (rng.bernoulli(level)) {
        ++st.deleted_edges;
        continue;
      }
      edges.push_back({u, v, e.attr + noise * standard_normal(e.attr.size(), rng)});
      present.insert(std::minmax(u, v));
    }

    if (rng.bernoulli(level)) {
      attrs.push_back(standard_normal(spec.node_dim, rng));
      st.spurious_nodes = 1;
    }
    const Index n = static_cast<Index>(attrs.size());
    for (Index u = 0; u < n; ++u)
      for (Index v = u + 1; v < n; ++v)
        if (!present.count({u, v}) && rng.bernoulli(level * spec.edge_density)) {
          edges.push_back({u, v, standard_normal(spec.edge_dim, rng)});
          ++st.spurious_edges;
        }

    std::vector<Index> perm(n);  // perm[old] = new position
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());

    AttributedGraph out;
    out.id = base.id;
    out.label = base.label;
    out.node_ids.resize(n);
    out.node_attrs.resize(n);
    for (Index i = 0; i < n; ++i) {
      out.node_ids[perm[i]] = node_name(perm[i], n);
      out.node_attrs[perm[i]] = std::move(attrs[i]);
    }
    for (Edge& e : edges) {
      const auto [a, b] = std::minmax(perm[e.u], perm[e.v]);
      out.edges.push_back({a, b, std::move(e.attr)});
    }
    if (stats) *stats = st;
    return canonical_order(out);
  }
  throw Error(ErrorKind::data, "distortion deleted every node in 10 attempts");
}

std::pair<GraphDataset, GraphDataset> make_dataset(const DistortionSpec& spec, Index per_class) {
  if (auto v = spec.check(); !v) throw Error(ErrorKind::usage, v.reason);
  if (per_class < 1) throw Error(ErrorKind::usage, "per_class must be at least 1");
  const std::vector<std::string> categories{"class0", "class1"};

  std::vector<AttributedGraph> bases;
  for (Index c = 0; c < 2; ++c) {
    RandomStream rng(spec.seed, static_cast<std::uint64_t>(Split::base), c, 0);
    bases.push_back(generate_base(spec, c, rng));
  }

  const auto build = [&](Split split, const std::string& prefix) {
    GraphDataset ds;
    ds.categories = categories;
    ds.node_dim = spec.node_dim;
    ds.edge_dim = spec.edge_dim;
    for (Index s = 0; s < per_class; ++s)
      for (Index c = 0; c < 2; ++c) {
        RandomStream rng(spec.seed, static_cast<std::uint64_t>(split), c, static_cast<std::uint64_t>(s));
        AttributedGraph g = distort(bases[c], spec, rng);
        std::string num = std::to_string(s);
        num.insert(0, num.size() < 4 ? 4 - num.size() : 0, '0');
        g.id = prefix + "-c" + std::to_string(c) + "-" + num;
        g.label = categories[c];
        ds.graphs.push_back(std::move(g));
      }
    return ds;
  };
  return {build(Split::train, "train"), build(Split::test, "test")};
}

}  // namespace ragkit
