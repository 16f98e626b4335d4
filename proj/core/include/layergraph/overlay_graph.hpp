#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "layergraph/layer_model.hpp"

namespace layergraph {

using NodeId = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Layer {
  /// Sampled type; `type.size` always equals nodes.size().
  LayerType type;
  /// Sorted node ids.
  std::vector<NodeId> nodes;
  /// Sorted intra-layer edges between members of `nodes`.
  std::vector<Edge> edges;
};

struct SeedRecord {
  std::uint64_t master = 0;
  std::uint64_t replicate = 0;
  std::string generator;
  /// Describes any percolation applied after generation, e.g. "site theta=0.5 seed=..".
  std::string percolation;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

/// Overlay of layers on nodes 0..n-1 together with the deduplicated union
/// edge set and the number of layers covering each union edge.
class OverlayGraph {
 public:
  OverlayGraph() = default;
  /// Validates layers and builds the union. Throws std::invalid_argument on
  /// out-of-range or duplicate nodes, or edges leaving their layer.
  OverlayGraph(std::size_t n, std::vector<Layer> layers, SeedRecord seed = {},
               std::vector<NodeId> original_ids = {});

  /// Graph whose layers are single edges; handy for fixtures.
  static OverlayGraph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t n() const { return n_; }
  std::size_t m() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const std::vector<Edge>& union_edges() const { return union_edges_; }
  /// multiplicities()[i] = number of layers containing union_edges()[i].
  const std::vector<std::uint32_t>& multiplicities() const { return multiplicity_; }
  const SeedRecord& seed() const { return seed_; }
  /// Node ids in the graph this one was derived from (identity when empty).
  const std::vector<NodeId>& original_ids() const { return original_ids_; }
  NodeId original_id(NodeId v) const { return original_ids_.empty() ? v : original_ids_[v]; }

  std::size_t total_layer_edges() const;

  friend bool operator==(const OverlayGraph&, const OverlayGraph&);

 private:
  std::size_t n_ = 0;
  std::vector<Layer> layers_;
  std::vector<Edge> union_edges_;
  std::vector<std::uint32_t> multiplicity_;
  SeedRecord seed_;
  std::vector<NodeId> original_ids_;
};

bool operator==(const Layer& a, const Layer& b);

}  // namespace layergraph
