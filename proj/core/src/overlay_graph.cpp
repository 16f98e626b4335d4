#include "layergraph/overlay_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace layergraph {

bool operator==(const Layer& a, const Layer& b) {
  return a.type == b.type && a.nodes == b.nodes && a.edges == b.edges;
}

OverlayGraph::OverlayGraph(std::size_t n, std::vector<Layer> layers, SeedRecord seed,
                           std::vector<NodeId> original_ids)
    : n_(n), layers_(std::move(layers)), seed_(std::move(seed)), original_ids_(std::move(original_ids)) {
  if (!original_ids_.empty() && original_ids_.size() != n_) {
    throw std::invalid_argument("OverlayGraph: original id map must have one entry per node");
  }
  std::size_t total = 0;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    auto& L = layers_[k];
    std::sort(L.nodes.begin(), L.nodes.end());
    if (std::adjacent_find(L.nodes.begin(), L.nodes.end()) != L.nodes.end()) {
      throw std::invalid_argument("OverlayGraph: layer " + std::to_string(k) + " repeats a node");
    }
    if (!L.nodes.empty() && L.nodes.back() >= n_) {
      throw std::invalid_argument("OverlayGraph: layer " + std::to_string(k) + " has a node >= n");
    }
    L.type.size = L.nodes.size();
    std::sort(L.edges.begin(), L.edges.end());
    for (const auto& e : L.edges) {
      if (e.u == e.v || !std::binary_search(L.nodes.begin(), L.nodes.end(), e.u) ||
          !std::binary_search(L.nodes.begin(), L.nodes.end(), e.v)) {
        throw std::invalid_argument("OverlayGraph: layer " + std::to_string(k) +
                                    " has an edge outside its node set");
      }
    }
    if (std::adjacent_find(L.edges.begin(), L.edges.end()) != L.edges.end()) {
      throw std::invalid_argument("OverlayGraph: layer " + std::to_string(k) + " repeats an edge");
    }
    total += L.edges.size();
  }
  std::vector<Edge> all;
  all.reserve(total);
  for (const auto& L : layers_) all.insert(all.end(), L.edges.begin(), L.edges.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    union_edges_.push_back(all[i]);
    multiplicity_.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
}

OverlayGraph OverlayGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<Layer> layers;
  layers.reserve(edges.size());
  for (const auto& e : edges) {
    layers.push_back(Layer{{2, 1.0}, {e.u, e.v}, {e}});
  }
  return OverlayGraph(n, std::move(layers));
}

std::size_t OverlayGraph::total_layer_edges() const {
  std::size_t s = 0;
  for (const auto& L : layers_) s += L.edges.size();
  return s;
}

bool operator==(const OverlayGraph& a, const OverlayGraph& b) {
  return a.n_ == b.n_ && a.layers_ == b.layers_ && a.union_edges_ == b.union_edges_ &&
         a.multiplicity_ == b.multiplicity_ && a.seed_ == b.seed_ && a.original_ids_ == b.original_ids_;
}

}  // namespace layergraph
