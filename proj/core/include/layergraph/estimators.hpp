#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "layergraph/overlay_graph.hpp"
#include "layergraph/pmf.hpp"

namespace layergraph {

/// Compressed adjacency of the union graph, neighbours sorted by id.
class Adjacency {
 public:
  explicit Adjacency(const OverlayGraph& G);

  std::size_t n() const { return offsets_.size() - 1; }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

/// Per-node degrees and triangle counts of the union graph, plus the
/// per-degree sums that the clustering estimators need. Sums are kept as
/// integers so that statistics pooled over replicates stay exact.
struct GraphStatistics {
  std::vector<std::uint32_t> degree;
  std::vector<std::uint64_t> node_triangles;
  std::uint64_t triangles = 0;
  /// nodes_with_degree[t] = #{i : d_i = t}.
  std::vector<std::uint64_t> nodes_with_degree;
  /// triangles_at_degree[t] = sum of node_triangles[i] over d_i = t.
  std::vector<std::uint64_t> triangles_at_degree;

  Pmf degree_distribution() const;
  /// 6 T / sum_i d_i (d_i - 1); empty when no node has degree >= 2.
  std::optional<double> global_clustering() const;
  /// Closed fraction of the 2-paths centred at degree-t nodes; empty when no
  /// node has degree t.
  std::optional<double> spectrum(std::size_t t) const;
  /// Ordered 2-paths centred at nodes of degree t: nodes_with_degree[t] t (t-1).
  double paths_at_degree(std::size_t t) const;
};

GraphStatistics graph_statistics(const OverlayGraph& G);

Pmf empirical_degree_distribution(const OverlayGraph& G);

struct TriangleCounts {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_node;
};

/// Exact count by orienting each edge towards the endpoint of higher
/// (degree, id) and intersecting out-neighbourhoods.
TriangleCounts count_triangles(const Adjacency& adj);
std::uint64_t triangle_count(const OverlayGraph& G);

std::optional<double> global_clustering(const OverlayGraph& G);
std::optional<double> empirical_clustering_spectrum(const OverlayGraph& G, std::size_t t);

struct ComponentSummary {
  /// Component sizes in decreasing order; they sum to n.
  std::vector<std::size_t> sizes;
  std::size_t N1 = 0;
  std::size_t N2 = 0;
  std::vector<std::size_t> thresholds;
  /// B[j] = number of nodes whose component has more than thresholds[j] nodes.
  std::vector<std::size_t> B;
};

ComponentSummary components(const OverlayGraph& G, std::span<const std::size_t> thresholds = {});

/// Component label of every node: the smallest node id in its component.
std::vector<NodeId> component_labels(const OverlayGraph& G);

}  // namespace layergraph
