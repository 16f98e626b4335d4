#include "layergraph/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "layergraph/parallel.hpp"

namespace layergraph {

namespace {

std::uint64_t edge_key(const Edge& e) { return (static_cast<std::uint64_t>(e.u) << 32) | e.v; }

std::string describe(const char* kind, double theta, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s theta=%.17g seed=%llu", kind, theta,
                static_cast<unsigned long long>(seed));
  return buf;
}

SeedRecord with_percolation(SeedRecord rec, const std::string& what) {
  rec.percolation = rec.percolation.empty() ? what : rec.percolation + "; " + what;
  return rec;
}

void check_theta(double theta, const char* what) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": theta must lie in [0,1], got " +
                                std::to_string(theta));
  }
}

// Edges of a Bernoulli(y) graph on the sorted node list `nodes`.
std::vector<Edge> sample_layer_edges(const std::vector<NodeId>& nodes, double y, Rng& rng) {
  std::vector<Edge> edges;
  const std::size_t x = nodes.size();
  if (x < 2 || y <= 0.0) return edges;
  if (y >= 1.0) {
    edges.reserve(x * (x - 1) / 2);
    for (std::size_t i = 0; i < x; ++i)
      for (std::size_t j = i + 1; j < x; ++j) edges.emplace_back(nodes[i], nodes[j]);
    return edges;
  }
  if (y >= 0.25) {
    for (std::size_t i = 0; i < x; ++i)
      for (std::size_t j = i + 1; j < x; ++j)
        if (rng.uniform() < y) edges.emplace_back(nodes[i], nodes[j]);
    return edges;
  }
  // Geometric skipping over the lexicographic pair order (i, j), i < j.
  const double log_q = std::log1p(-y);
  std::size_t i = 0;
  std::size_t j = 0;  // position before the first pair (0, 1)
  for (;;) {
    const double u = rng.uniform();
    const double skip = std::floor(std::log1p(-u) / log_q);
    if (skip >= 1e18) break;
    j += static_cast<std::size_t>(skip) + 1;
    while (j >= x) {
      ++i;
      if (i + 1 >= x) return edges;
      j = j - x + i + 1;
    }
    edges.emplace_back(nodes[i], nodes[j]);
  }
  return edges;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("scale.n must be at least 1");
  if (replicates < 1) throw std::invalid_argument("scale.replicates must be at least 1");
  if (!(percolation.theta >= 0.0 && percolation.theta <= 1.0)) {
    throw std::invalid_argument("percolation.theta must lie in [0,1], got " +
                                std::to_string(percolation.theta));
  }
  if (explicit_types) {
    if (explicit_types->size() != m) {
      throw std::invalid_argument("model.layers must list exactly m layer types");
    }
    for (const auto& t : *explicit_types) {
      if (t.size > n) throw std::invalid_argument("model.layers: layer size exceeds n");
      if (!(t.strength >= 0.0 && t.strength <= 1.0)) {
        throw std::invalid_argument("model.layers: strength must lie in [0,1]");
      }
    }
  } else if (m > 0) {
    if (P.atoms().empty()) throw std::invalid_argument("model.P has no atoms");
    if (P.max_size() > n) {
      throw std::invalid_argument("model.P has layer size " + std::to_string(P.max_size()) +
                                  " above n = " + std::to_string(n));
    }
  }
  if (percolation.site_nodes) {
    for (NodeId v : *percolation.site_nodes) {
      if (v >= n) throw std::invalid_argument("percolation.nodes: node id out of range");
    }
  }
}

std::size_t layers_for(double mu, std::size_t n) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  return static_cast<std::size_t>(std::llround(mu * static_cast<double>(n)));
}

std::vector<NodeId> sample_subset(std::size_t n, std::size_t x, Rng& rng) {
  if (x > n) throw std::invalid_argument("sample_subset: layer size exceeds n");
  std::vector<NodeId> out(x);
  // Sparse Fisher-Yates: positions that were swapped are remembered in a
  // small map; every other position i holds i.
  std::unordered_map<std::uint32_t, std::uint32_t> moved;
  moved.reserve(2 * x);
  auto value_at = [&](std::uint32_t i) {
    auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  for (std::size_t i = 0; i < x; ++i) {
    const auto j = static_cast<std::uint32_t>(i + rng.below(n - i));
    const std::uint32_t vj = value_at(j);
    const std::uint32_t vi = value_at(static_cast<std::uint32_t>(i));
    out[i] = vj;
    moved[j] = vi;
  }
  std::sort(out.begin(), out.end());
  return out;
}

OverlayGraph generate(const ExperimentConfig& cfg, std::uint64_t replicate) {
  cfg.validate();
  std::vector<double> cdf;
  if (!cfg.explicit_types) {
    double c = 0.0;
    for (const auto& a : cfg.P.atoms()) {
      c += a.prob;
      cdf.push_back(c);
    }
  }
  std::vector<Layer> layers(cfg.m);
  parallel_for(cfg.m, [&](std::size_t k) {
    LayerType type;
    if (cfg.explicit_types) {
      type = (*cfg.explicit_types)[k];
    } else {
      Rng r(cfg.master_seed, replicate, Purpose::layer_type, k);
      const double u = r.uniform() * cdf.back();
      const auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      type = cfg.P.atoms()[std::min(idx, cdf.size() - 1)].type;
    }
    if (type.size > cfg.n) throw std::invalid_argument("generate: sampled layer size exceeds n");
    Rng node_rng(cfg.master_seed, replicate, Purpose::layer_nodes, k);
    Rng edge_rng(cfg.master_seed, replicate, Purpose::layer_edges, k);
    Layer L;
    L.type = type;
    L.nodes = sample_subset(cfg.n, type.size, node_rng);
    L.edges = sample_layer_edges(L.nodes, type.strength, edge_rng);
    layers[k] = std::move(L);
  });
  SeedRecord rec{cfg.master_seed, replicate, kGeneratorName, ""};
  return OverlayGraph(cfg.n, std::move(layers), std::move(rec));
}

OverlayGraph site_percolate(const OverlayGraph& G, const std::vector<NodeId>& S) {
  std::vector<std::int64_t> relabel(G.n(), -1);
  std::vector<NodeId> original;
  original.reserve(S.size());
  NodeId next = 0;
  NodeId prev = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const NodeId v = S[i];
    if (v >= G.n()) throw std::invalid_argument("site_percolate: node id out of range");
    if (i > 0 && v <= prev) throw std::invalid_argument("site_percolate: node set must be sorted and unique");
    prev = v;
    relabel[v] = next++;
    original.push_back(G.original_id(v));
  }
  std::vector<Layer> layers;
  layers.reserve(G.m());
  for (const auto& L : G.layers()) {
    Layer out;
    out.type.strength = L.type.strength;
    for (NodeId v : L.nodes)
      if (relabel[v] >= 0) out.nodes.push_back(static_cast<NodeId>(relabel[v]));
    for (const auto& e : L.edges) {
      if (relabel[e.u] >= 0 && relabel[e.v] >= 0) {
        out.edges.emplace_back(static_cast<NodeId>(relabel[e.u]), static_cast<NodeId>(relabel[e.v]));
      }
    }
    out.type.size = out.nodes.size();
    layers.push_back(std::move(out));
  }
  return OverlayGraph(S.size(), std::move(layers),
                      with_percolation(G.seed(), "site nodes=" + std::to_string(S.size())),
                      std::move(original));
}

std::vector<NodeId> site_retained_nodes(std::size_t n, double theta, std::uint64_t seed) {
  check_theta(theta, "site_percolate");
  std::vector<NodeId> S;
  for (std::size_t v = 0; v < n; ++v) {
    if (to_unit(hash_key(seed, static_cast<std::uint64_t>(Purpose::site), v)) < theta) {
      S.push_back(static_cast<NodeId>(v));
    }
  }
  return S;
}

OverlayGraph site_percolate(const OverlayGraph& G, double theta, std::uint64_t seed) {
  OverlayGraph out = site_percolate(G, site_retained_nodes(G.n(), theta, seed));
  SeedRecord rec = with_percolation(G.seed(), describe("site", theta, seed));
  return OverlayGraph(out.n(), out.layers(), std::move(rec), out.original_ids());
}

namespace {

template <class Keep>
OverlayGraph filter_layer_edges(const OverlayGraph& G, SeedRecord rec, Keep keep) {
  std::vector<Layer> layers = G.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& edges = layers[k].edges;
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [&](const Edge& e) { return !keep(k, e); }),
                edges.end());
  }
  return OverlayGraph(G.n(), std::move(layers), std::move(rec), G.original_ids());
}

bool union_kept(const std::vector<Edge>& kept_sorted, const Edge& e) {
  return std::binary_search(kept_sorted.begin(), kept_sorted.end(), e);
}

}  // namespace

OverlayGraph bond_percolate_overlay(const OverlayGraph& G, double theta, std::uint64_t seed) {
  check_theta(theta, "bond_percolate_overlay");
  std::vector<Edge> kept;
  for (const auto& e : G.union_edges()) {
    if (to_unit(hash_key(seed, static_cast<std::uint64_t>(Purpose::bond_overlay), edge_key(e))) < theta) {
      kept.push_back(e);
    }
  }
  return filter_layer_edges(G, with_percolation(G.seed(), describe("bond_overlay", theta, seed)),
                            [&](std::size_t, const Edge& e) { return union_kept(kept, e); });
}

OverlayGraph bond_percolate_layerwise(const OverlayGraph& G, double theta, std::uint64_t seed) {
  check_theta(theta, "bond_percolate_layerwise");
  return filter_layer_edges(
      G, with_percolation(G.seed(), describe("bond_layerwise", theta, seed)),
      [&](std::size_t k, const Edge& e) {
        return to_unit(hash_key(seed, static_cast<std::uint64_t>(Purpose::bond_layerwise), k,
                                edge_key(e))) < theta;
      });
}

std::pair<OverlayGraph, OverlayGraph> coupled_bond_pair(const OverlayGraph& G, double theta,
                                                        std::uint64_t seed) {
  check_theta(theta, "coupled_bond_pair");
  std::vector<Edge> kept_overlay;
  std::vector<Edge> kept_layerwise;
  const auto& edges = G.union_edges();
  const auto& mult = G.multiplicities();
  const auto purpose = static_cast<std::uint64_t>(Purpose::coupling);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double p_tilde = 1.0 - std::pow(1.0 - theta, static_cast<double>(mult[i]));
    const double u1 = to_unit(hash_key(seed, purpose, edge_key(edges[i]), 1));
    if (!(u1 < p_tilde)) continue;
    kept_layerwise.push_back(edges[i]);
    const double p_star = theta / p_tilde;
    const double u2 = to_unit(hash_key(seed, purpose, edge_key(edges[i]), 2));
    if (u2 < p_star) kept_overlay.push_back(edges[i]);
  }
  auto overlay = filter_layer_edges(
      G, with_percolation(G.seed(), describe("coupled_overlay", theta, seed)),
      [&](std::size_t, const Edge& e) { return union_kept(kept_overlay, e); });
  auto layerwise = filter_layer_edges(
      G, with_percolation(G.seed(), describe("coupled_layerwise", theta, seed)),
      [&](std::size_t, const Edge& e) { return union_kept(kept_layerwise, e); });
  return {std::move(overlay), std::move(layerwise)};
}

std::uint64_t percolation_seed(std::uint64_t master, std::uint64_t replicate) {
  return hash_key(master, replicate, 0xbe7c0a7e5eedULL);
}

OverlayGraph apply_percolation(const OverlayGraph& G, const Percolation& p, std::uint64_t seed) {
  switch (p.kind) {
    case Percolation::Kind::none:
      return G;
    case Percolation::Kind::site:
      if (p.site_nodes) {
        std::vector<NodeId> S = *p.site_nodes;
        std::sort(S.begin(), S.end());
        S.erase(std::unique(S.begin(), S.end()), S.end());
        return site_percolate(G, S);
      }
      return site_percolate(G, p.theta, seed);
    case Percolation::Kind::bond_overlay:
      return bond_percolate_overlay(G, p.theta, seed);
    case Percolation::Kind::bond_layerwise:
      return bond_percolate_layerwise(G, p.theta, seed);
  }
  return G;
}

OverlayGraph realize(const ExperimentConfig& cfg, std::uint64_t replicate) {
  return apply_percolation(generate(cfg, replicate), cfg.percolation,
                           percolation_seed(cfg.master_seed, replicate));
}

}  // namespace layergraph
