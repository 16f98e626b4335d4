#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "layergraph/layer_model.hpp"
#include "layergraph/overlay_graph.hpp"
#include "layergraph/rng.hpp"

namespace layergraph {

struct Percolation {
  enum class Kind { none, site, bond_overlay, bond_layerwise };
  Kind kind = Kind::none;
  double theta = 1.0;
  /// For site percolation: explicit retained node set instead of i.i.d.
  /// retention with probability theta.
  std::optional<std::vector<NodeId>> site_nodes;
};

struct ExperimentConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  LayerTypeDistribution P;
  /// When set, layer k gets explicit_types[k] and P is not sampled.
  std::optional<std::vector<LayerType>> explicit_types;
  Percolation percolation;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// m = round(mu n).
std::size_t layers_for(double mu, std::size_t n);

/// Samples the overlay model (without percolation) for one replicate. Every
/// random draw is keyed by (master seed, replicate, purpose, layer), so the
/// output does not depend on thread scheduling.
OverlayGraph generate(const ExperimentConfig& cfg, std::uint64_t replicate);

/// Induced subgraph on the sorted node set S, relabelled to 0..|S|-1.
OverlayGraph site_percolate(const OverlayGraph& G, const std::vector<NodeId>& S);
/// Keeps each node independently with probability theta.
OverlayGraph site_percolate(const OverlayGraph& G, double theta, std::uint64_t seed);
/// The node set site_percolate(G, theta, seed) keeps.
std::vector<NodeId> site_retained_nodes(std::size_t n, double theta, std::uint64_t seed);

/// One coin per union edge; a layer keeps an edge iff its union edge is kept.
OverlayGraph bond_percolate_overlay(const OverlayGraph& G, double theta, std::uint64_t seed);
/// One coin per (layer, edge).
OverlayGraph bond_percolate_layerwise(const OverlayGraph& G, double theta, std::uint64_t seed);

/// Coupled (overlay-percolated, layerwise-percolated) pair with the first a
/// subgraph of the second. A union edge covered by M layers is kept in the
/// layerwise graph with probability 1 - (1 - theta)^M and, given that, in
/// the overlay graph with probability theta / (1 - (1 - theta)^M).
std::pair<OverlayGraph, OverlayGraph> coupled_bond_pair(const OverlayGraph& G, double theta,
                                                        std::uint64_t seed);

/// Seed used for the percolation pass of a replicate.
std::uint64_t percolation_seed(std::uint64_t master, std::uint64_t replicate);

/// Applies cfg.percolation to G (identity for Kind::none).
OverlayGraph apply_percolation(const OverlayGraph& G, const Percolation& p, std::uint64_t seed);

/// generate followed by apply_percolation.
OverlayGraph realize(const ExperimentConfig& cfg, std::uint64_t replicate);

/// Uniform x-subset of {0..n-1} by sparse Fisher-Yates, returned sorted.
std::vector<NodeId> sample_subset(std::size_t n, std::size_t x, Rng& rng);

}  // namespace layergraph
