#include "layergraph/estimators.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace layergraph {

Adjacency::Adjacency(const OverlayGraph& G) : offsets_(G.n() + 1, 0) {
  for (const auto& e : G.union_edges()) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  neighbors_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // union_edges are sorted by (u, v), so each list below comes out sorted:
  // the v-lists receive u's in increasing order, the u-lists receive v's in
  // increasing order, and all u's of a node precede its v's.
  for (const auto& e : G.union_edges()) neighbors_[fill[e.v]++] = e.u;
  for (const auto& e : G.union_edges()) neighbors_[fill[e.u]++] = e.v;
}

TriangleCounts count_triangles(const Adjacency& adj) {
  const std::size_t n = adj.n();
  auto before = [&](NodeId a, NodeId b) {
    const auto da = adj.degree(a), db = adj.degree(b);
    return da < db || (da == db && a < b);
  };
  std::vector<std::size_t> out_offsets(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj.neighbors(u)) out_offsets[u + 1] += before(u, v) ? 1 : 0;
  }
  std::partial_sum(out_offsets.begin(), out_offsets.end(), out_offsets.begin());
  std::vector<NodeId> out(out_offsets.back());
  for (NodeId u = 0; u < n; ++u) {
    std::size_t pos = out_offsets[u];
    for (NodeId v : adj.neighbors(u)) {
      if (before(u, v)) out[pos++] = v;
    }
  }

  TriangleCounts tc;
  tc.per_node.assign(n, 0);
  std::vector<char> mark(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    const std::size_t lo = out_offsets[u], hi = out_offsets[u + 1];
    for (std::size_t i = lo; i < hi; ++i) mark[out[i]] = 1;
    for (std::size_t i = lo; i < hi; ++i) {
      const NodeId v = out[i];
      for (std::size_t j = out_offsets[v]; j < out_offsets[v + 1]; ++j) {
        const NodeId w = out[j];
        if (mark[w]) {
          ++tc.total;
          ++tc.per_node[u];
          ++tc.per_node[v];
          ++tc.per_node[w];
        }
      }
    }
    for (std::size_t i = lo; i < hi; ++i) mark[out[i]] = 0;
  }
  return tc;
}

GraphStatistics graph_statistics(const OverlayGraph& G) {
  const Adjacency adj(G);
  GraphStatistics s;
  const std::size_t n = G.n();
  s.degree.resize(n);
  std::size_t dmax = 0;
  for (NodeId v = 0; v < n; ++v) {
    s.degree[v] = static_cast<std::uint32_t>(adj.degree(v));
    dmax = std::max<std::size_t>(dmax, s.degree[v]);
  }
  auto tc = count_triangles(adj);
  s.triangles = tc.total;
  s.node_triangles = std::move(tc.per_node);
  s.nodes_with_degree.assign(dmax + 1, 0);
  s.triangles_at_degree.assign(dmax + 1, 0);
  for (NodeId v = 0; v < n; ++v) {
    ++s.nodes_with_degree[s.degree[v]];
    s.triangles_at_degree[s.degree[v]] += s.node_triangles[v];
  }
  return s;
}

Pmf GraphStatistics::degree_distribution() const {
  if (degree.empty()) return Pmf::delta(0);
  std::vector<double> counts(nodes_with_degree.begin(), nodes_with_degree.end());
  return Pmf::from_counts(counts);
}

double GraphStatistics::paths_at_degree(std::size_t t) const {
  if (t >= nodes_with_degree.size() || t < 2) return 0.0;
  return static_cast<double>(nodes_with_degree[t]) * static_cast<double>(t) * static_cast<double>(t - 1);
}

std::optional<double> GraphStatistics::global_clustering() const {
  double paths = 0.0;
  for (std::size_t t = 2; t < nodes_with_degree.size(); ++t) paths += paths_at_degree(t);
  if (paths == 0.0) return std::nullopt;
  return 6.0 * static_cast<double>(triangles) / paths;
}

std::optional<double> GraphStatistics::spectrum(std::size_t t) const {
  if (t < 2) throw std::invalid_argument("clustering spectrum needs t >= 2");
  if (t >= nodes_with_degree.size() || nodes_with_degree[t] == 0) return std::nullopt;
  return 2.0 * static_cast<double>(triangles_at_degree[t]) / paths_at_degree(t);
}

Pmf empirical_degree_distribution(const OverlayGraph& G) { return graph_statistics(G).degree_distribution(); }

std::uint64_t triangle_count(const OverlayGraph& G) { return count_triangles(Adjacency(G)).total; }

std::optional<double> global_clustering(const OverlayGraph& G) {
  return graph_statistics(G).global_clustering();
}

std::optional<double> empirical_clustering_spectrum(const OverlayGraph& G, std::size_t t) {
  return graph_statistics(G).spectrum(t);
}

namespace {

struct Dsu {
  std::vector<NodeId> parent;
  std::vector<std::uint32_t> size;

  explicit Dsu(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }

  NodeId find(NodeId v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

Dsu union_find(const OverlayGraph& G) {
  Dsu dsu(G.n());
  for (const auto& e : G.union_edges()) dsu.unite(e.u, e.v);
  return dsu;
}

}  // namespace

ComponentSummary components(const OverlayGraph& G, std::span<const std::size_t> thresholds) {
  Dsu dsu = union_find(G);
  ComponentSummary s;
  for (NodeId v = 0; v < G.n(); ++v) {
    if (dsu.find(v) == v) s.sizes.push_back(dsu.size[v]);
  }
  std::sort(s.sizes.begin(), s.sizes.end(), std::greater<>());
  s.N1 = s.sizes.size() > 0 ? s.sizes[0] : 0;
  s.N2 = s.sizes.size() > 1 ? s.sizes[1] : 0;
  s.thresholds.assign(thresholds.begin(), thresholds.end());
  for (std::size_t t : s.thresholds) {
    std::size_t b = 0;
    for (std::size_t c : s.sizes) {
      if (c <= t) break;
      b += c;
    }
    s.B.push_back(b);
  }
  return s;
}

std::vector<NodeId> component_labels(const OverlayGraph& G) {
  Dsu dsu = union_find(G);
  std::vector<NodeId> smallest(G.n(), static_cast<NodeId>(-1));
  std::vector<NodeId> label(G.n());
  for (NodeId v = 0; v < G.n(); ++v) {
    const NodeId r = dsu.find(v);
    if (smallest[r] == static_cast<NodeId>(-1)) smallest[r] = v;
    label[v] = smallest[r];
  }
  return label;
}

}  // namespace layergraph
