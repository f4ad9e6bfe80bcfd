#include "ragkit/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace ragkit {

namespace {

constexpr double kMinExponent = -700.0;

void sinkhorn_unchecked(Matrix& m, int iters) {
  const Index rows = m.rows() - 1;
  const Index cols = m.cols() - 1;
  for (int it = 0; it < iters; ++it) {
    Vector r = m.topRows(rows).rowwise().sum();
    r = (r.array() > 0).select(r, 1.0);
    m.topRows(rows).array().colwise() /= r.array();
    Eigen::RowVectorXd c = m.leftCols(cols).colwise().sum();
    c = (c.array() > 0).select(c, 1.0);
    m.leftCols(cols).array().rowwise() /= c.array();
  }
}

}  // namespace

Index Morphism::matched_nodes() const {
  return static_cast<Index>(std::count_if(node_map.begin(), node_map.end(), [](Index t) { return t != kUnmatched; }));
}

Morphism make_morphism(const GraphStructure& source, const GraphStructure& target, std::vector<Index> node_map) {
  Morphism m;
  m.node_map = std::move(node_map);
  m.edge_map.assign(source.edge_count(), kUnmatched);
  for (Index e = 0; e < source.edge_count(); ++e) {
    const auto [a, b] = source.edges()[e];
    const Index i = m.node_map[a];
    const Index j = m.node_map[b];
    if (i != kUnmatched && j != kUnmatched) m.edge_map[e] = target.edge_between(i, j);
  }
  return m;
}

Validation validate(const Morphism& m, const GraphStructure& source, const GraphStructure& target) {
  if (static_cast<Index>(m.node_map.size()) != source.node_count())
    return Validation::fail("morphism node map has wrong length");
  if (static_cast<Index>(m.edge_map.size()) != source.edge_count())
    return Validation::fail("morphism edge map has wrong length");
  std::set<Index> hit;
  for (Index a = 0; a < source.node_count(); ++a) {
    const Index i = m.node_map[a];
    if (i == kUnmatched) continue;
    if (i < 0 || i >= target.node_count())
      return Validation::fail("source node " + std::to_string(a) + " maps outside the target");
    if (!hit.insert(i).second)
      return Validation::fail("node map not injective at target node " + std::to_string(i));
  }
  for (Index e = 0; e < source.edge_count(); ++e) {
    const auto [a, b] = source.edges()[e];
    const Index i = m.node_map[a];
    const Index j = m.node_map[b];
    const Index expected = (i == kUnmatched || j == kUnmatched) ? kUnmatched : target.edge_between(i, j);
    if (m.edge_map[e] != expected)
      return Validation::fail("edge " + std::to_string(e) + " image inconsistent with its endpoints");
  }
  return {};
}

Validation AnnealSchedule::check() const {
  if (!(beta_initial > 0)) return Validation::fail("beta_initial must be positive");
  if (!(beta_rate > 1)) return Validation::fail("beta_rate must exceed 1");
  if (!(beta_final > beta_initial)) return Validation::fail("beta_final must exceed beta_initial");
  if (sinkhorn_iters < 1) return Validation::fail("sinkhorn_iters must be positive");
  if (assignment_iters_per_beta < 1) return Validation::fail("assignment_iters_per_beta must be positive");
  return {};
}

void sinkhorn_normalize(Matrix& m, int iters) {
  if (m.rows() < 1 || m.cols() < 1) throw Error(ErrorKind::numerical, "match matrix must include slack row and column");
  if (!((m.array() > 0).all() && m.allFinite()))
    throw Error(ErrorKind::numerical, "match matrix entries must be strictly positive and finite");
  sinkhorn_unchecked(m, iters);
}

CompatibilityTables CompatibilityTables::zeros(const GraphStructure& source, const GraphStructure& target) {
  CompatibilityTables c;
  c.node = Matrix::Zero(source.node_count(), target.node_count());
  c.source_node_slack = Vector::Zero(source.node_count());
  c.target_node_slack = Vector::Zero(target.node_count());
  c.edge = Matrix::Zero(source.edge_count(), target.edge_count());
  c.source_edge_slack = Vector::Zero(source.edge_count());
  c.target_edge_absent = Vector::Zero(target.edge_count());
  return c;
}

double assignment_value(const CompatibilityTables& c, const GraphStructure& source, const GraphStructure& target,
                        const Morphism& m) {
  double total = 0.0;
  std::vector<bool> target_hit(target.node_count(), false);
  for (Index a = 0; a < source.node_count(); ++a) {
    const Index i = m.node_map[a];
    if (i == kUnmatched) {
      total += c.source_node_slack(a);
    } else {
      total += c.node(a, i);
      target_hit[i] = true;
    }
  }
  for (Index i = 0; i < target.node_count(); ++i)
    if (!target_hit[i]) total += c.target_node_slack(i);

  std::vector<bool> target_edge_hit(target.edge_count(), false);
  for (Index e = 0; e < source.edge_count(); ++e) {
    const Index f = m.edge_map[e];
    if (f == kUnmatched) {
      total += c.source_edge_slack(e);
    } else {
      total += c.edge(e, f);
      target_edge_hit[f] = true;
    }
  }
  for (Index f = 0; f < target.edge_count(); ++f) {
    const auto [i, j] = target.edges()[f];
    if (!target_edge_hit[f] && target_hit[i] && target_hit[j]) total += c.target_edge_absent(f);
  }
  return total;
}

CompatibilityFn gaussian_kernel_compatibility(const AttributedGraph& target) {
  return [&target](const AttributedGraph& source) {
    const auto s = GraphStructure::of(source);
    const auto t = GraphStructure::of(target);
    auto c = CompatibilityTables::zeros(s, t);
    for (Index a = 0; a < s.node_count(); ++a)
      for (Index i = 0; i < t.node_count(); ++i)
        c.node(a, i) = std::exp(-0.5 * (source.node_attrs[a] - target.node_attrs[i]).squaredNorm());
    for (Index e = 0; e < s.edge_count(); ++e)
      for (Index f = 0; f < t.edge_count(); ++f)
        c.edge(e, f) = std::exp(-0.5 * (source.edges[e].attr - target.edges[f].attr).squaredNorm());
    return c;
  };
}

std::vector<Index> discretize(const Matrix& soft, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  const Index n = soft.rows() - 1;
  const Index m = soft.cols() - 1;
  std::vector<Index> out(n, kUnmatched);
  std::vector<bool> row_done(n, false);
  std::vector<bool> col_done(m, false);
  Index remaining = n;
  while (remaining > 0) {
    double best = -std::numeric_limits<double>::infinity();
    Index br = -1;
    Index bc = -1;
    for (Index r = 0; r <= n; ++r) {
      if (r < n && row_done[r]) continue;
      for (Index c = 0; c <= m; ++c) {
        if (r == n && c == m) continue;
        if (c < m && (col_done[c] || (r < n && !allowed(r, c)))) continue;
        if (soft(r, c) > best) {
          best = soft(r, c);
          br = r;
          bc = c;
        }
      }
    }
    if (br < 0) break;
    if (br == n) {
      col_done[bc] = true;
      continue;
    }
    row_done[br] = true;
    --remaining;
    if (bc < m) {
      out[br] = bc;
      col_done[bc] = true;
    }
  }
  return out;
}

namespace {

// First-improvement local search over single reassignments (to any target
// node or to slack) and swaps, on the exact assignment value.
std::vector<Index> refine(const CompatibilityTables& compat, const GraphStructure& src, const GraphStructure& target,
                          const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed, std::vector<Index> map) {
  const Index n = src.node_count();
  const Index m = target.node_count();
  const auto value = [&](const std::vector<Index>& v) {
    return assignment_value(compat, src, target, make_morphism(src, target, v));
  };
  std::vector<Index> holder(m, kUnmatched);
  for (Index a = 0; a < n; ++a)
    if (map[a] != kUnmatched) holder[map[a]] = a;
  double current = value(map);
  bool improved = true;
  while (improved) {
    improved = false;
    for (Index a = 0; a < n; ++a) {
      for (Index i = kUnmatched; i < m; ++i) {
        const Index old = map[a];
        if (i == old || (i != kUnmatched && !allowed(a, i))) continue;
        const Index b = i == kUnmatched ? kUnmatched : holder[i];
        if (b != kUnmatched && old != kUnmatched && !allowed(b, old)) continue;
        std::vector<Index> cand = map;
        cand[a] = i;
        if (b != kUnmatched) cand[b] = old;
        const double v = value(cand);
        if (!(v > current + 1e-12 * (1.0 + std::abs(current)))) continue;
        map = std::move(cand);
        current = v;
        if (old != kUnmatched) holder[old] = b;
        if (i != kUnmatched) holder[i] = a;
        improved = true;
      }
    }
  }
  return map;
}

}  // namespace

std::atomic<std::uint64_t>& match_call_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

MatchResult match(const AttributedGraph& source, const GraphStructure& target, const CompatibilityTables& compat,
                  const AnnealSchedule& schedule) {
  if (source.node_count() == 0) throw Error(ErrorKind::data, "cannot match an empty source graph");
  if (auto v = schedule.check(); !v) throw Error(ErrorKind::usage, "anneal schedule: " + v.reason);
  ++match_call_counter();

  const auto src = GraphStructure::of(source);
  const Index n = src.node_count();
  const Index m = target.node_count();

  MatchResult result;
  if (m == 0) {
    result.morphism = make_morphism(src, target, std::vector<Index>(n, kUnmatched));
    result.soft = Matrix::Ones(n + 1, 1);
    result.score = assignment_value(compat, src, target, result.morphism);
    return result;
  }

  // Gains relative to leaving everything unmatched.
  Matrix gain(n, m);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(n, m);
  for (Index a = 0; a < n; ++a)
    for (Index i = 0; i < m; ++i) {
      const double c = compat.node(a, i);
      allowed(a, i) = c > -std::numeric_limits<double>::infinity();
      gain(a, i) = allowed(a, i) ? c - compat.source_node_slack(a) - compat.target_node_slack(i) : 0.0;
    }

  // Pairwise gain of mapping (a, b) onto the endpoints of target edge f:
  // absent(f) for every pair, corrected by edge(e, f) on source edges.
  const Index es = src.edge_count();
  const Index et = target.edge_count();
  Vector absent = compat.target_edge_absent;
  Matrix edge_gain(es, et);
  for (Index e = 0; e < es; ++e)
    for (Index f = 0; f < et; ++f) edge_gain(e, f) = compat.edge(e, f) - compat.source_edge_slack(e);

  // Anneal on gains in units of the best single node gain.
  double magnitude = 0.0;
  for (Index a = 0; a < n; ++a)
    for (Index i = 0; i < m; ++i)
      if (allowed(a, i)) magnitude = std::max(magnitude, gain(a, i));
  if (magnitude == 0.0) {
    magnitude = gain.cwiseAbs().maxCoeff();
    if (es > 0 && et > 0) magnitude = std::max(magnitude, edge_gain.cwiseAbs().maxCoeff());
    if (n > 1 && et > 0) magnitude = std::max(magnitude, absent.cwiseAbs().maxCoeff());
  }
  if (magnitude > 0 && std::isfinite(magnitude)) {
    gain /= magnitude;
    edge_gain /= magnitude;
    absent /= magnitude;
  }
  for (Index e = 0; e < es; ++e) edge_gain.row(e) -= absent.transpose();

  Matrix soft = Matrix::Ones(n + 1, m + 1);
  sinkhorn_unchecked(soft, schedule.sinkhorn_iters);
  Matrix q(n, m);
  Vector col_mass(m);
  for (double beta = schedule.beta_initial; beta <= schedule.beta_final * (1 + 1e-12); beta *= schedule.beta_rate) {
    for (int it = 0; it < schedule.assignment_iters_per_beta; ++it) {
      q = gain;
      col_mass = soft.topRows(n).leftCols(m).colwise().sum().transpose();
      for (Index f = 0; f < et; ++f) {
        const auto [i, j] = target.edges()[f];
        q.col(i) += absent(f) * (Vector::Constant(n, col_mass(j)) - soft.col(j).head(n));
        q.col(j) += absent(f) * (Vector::Constant(n, col_mass(i)) - soft.col(i).head(n));
        for (Index e = 0; e < es; ++e) {
          const auto [a, b] = src.edges()[e];
          const double w = edge_gain(e, f);
          q(a, i) += w * soft(b, j);
          q(b, i) += w * soft(a, j);
          q(a, j) += w * soft(b, i);
          q(b, j) += w * soft(a, i);
        }
      }
      for (Index a = 0; a < n; ++a) {
        double shift = 0.0;  // slack column carries gain 0
        for (Index i = 0; i < m; ++i)
          if (allowed(a, i)) shift = std::max(shift, beta * q(a, i));
        for (Index i = 0; i < m; ++i)
          soft(a, i) = allowed(a, i) ? std::exp(std::max(beta * q(a, i) - shift, kMinExponent)) : std::exp(kMinExponent);
        soft(a, m) = std::exp(std::max(-shift, kMinExponent));
      }
      soft.row(n).setOnes();
      sinkhorn_unchecked(soft, schedule.sinkhorn_iters);
    }
  }

  auto node_map = discretize(soft, allowed);
  if (schedule.refine) node_map = refine(compat, src, target, allowed, std::move(node_map));
  result.morphism = make_morphism(src, target, std::move(node_map));
  result.soft = std::move(soft);
  result.score = assignment_value(compat, src, target, result.morphism);
  return result;
}

MatchResult match(const AttributedGraph& source, const GraphStructure& target, const CompatibilityFn& compat,
                  const AnnealSchedule& schedule) {
  if (source.node_count() == 0) throw Error(ErrorKind::data, "cannot match an empty source graph");
  return match(source, target, compat(source), schedule);
}

MatchResult match(const AttributedGraph& source, const AttributedGraph& target, const AnnealSchedule& schedule) {
  return match(source, GraphStructure::of(target), gaussian_kernel_compatibility(target), schedule);
}

}  // namespace ragkit
