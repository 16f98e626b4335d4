#include "layergraph/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace layergraph {

NodeLayerIndex::NodeLayerIndex(const OverlayGraph& G) : offsets_(G.n() + 1, 0) {
  for (const auto& L : G.layers()) {
    for (NodeId v : L.nodes) ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < G.n(); ++i) offsets_[i + 1] += offsets_[i];
  layers_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t k = 0; k < G.m(); ++k) {
    for (NodeId v : G.layers()[k].nodes) layers_[fill[v]++] = k;
  }
}

std::vector<NodeId> closure_neighbors(const Layer& layer, NodeId v) {
  const auto& nodes = layer.nodes;
  auto local = [&](NodeId u) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), u) - nodes.begin());
  };
  const std::size_t start = local(v);
  if (start == nodes.size() || nodes[start] != v) {
    throw std::invalid_argument("closure_neighbors: node " + std::to_string(v) + " is not in the layer");
  }
  const std::size_t x = nodes.size();
  std::vector<std::size_t> off(x + 1, 0);
  for (const auto& e : layer.edges) {
    ++off[local(e.u) + 1];
    ++off[local(e.v) + 1];
  }
  for (std::size_t i = 0; i < x; ++i) off[i + 1] += off[i];
  std::vector<std::size_t> adj(off.back());
  std::vector<std::size_t> fill(off.begin(), off.end() - 1);
  for (const auto& e : layer.edges) {
    const std::size_t a = local(e.u), b = local(e.v);
    adj[fill[a]++] = b;
    adj[fill[b]++] = a;
  }
  std::vector<char> seen(x, 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::vector<NodeId> out;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t i = off[a]; i < off[a + 1]; ++i) {
      const std::size_t b = adj[i];
      if (!seen[b]) {
        seen[b] = 1;
        out.push_back(nodes[b]);
        stack.push_back(b);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> ExplorationTrace::visit_order() const {
  std::vector<NodeId> order;
  order.reserve(steps.size());
  for (const auto& s : steps) order.push_back(s.node);
  return order;
}

std::vector<NodeId> ExplorationTrace::output() const {
  auto out = visit_order();
  std::sort(out.begin(), out.end());
  return out;
}

bool ExplorationTrace::any_overlap() const {
  return std::any_of(steps.begin(), steps.end(),
                     [](const ExplorationStep& s) { return s.overlap_type1 || s.overlap_type2; });
}

std::size_t ExplorationTrace::queue_length(std::size_t t) const {
  if (t == 0) return 1;
  if (t <= steps.size()) return steps[t - 1].queue_after;
  return 0;
}

namespace {

using MinQueue = std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>>;

void check_root(const OverlayGraph& G, NodeId root) {
  if (root >= G.n()) {
    throw std::invalid_argument("root " + std::to_string(root) + " is not a node of a graph with " +
                                std::to_string(G.n()) + " nodes");
  }
}

// Shared body of the extraction procedure. `blocked(u)` tells whether u is
// in the initial taboo set or was added by an earlier admission in this
// call; `block(u)` adds u.
template <class Blocked, class Block>
std::vector<std::size_t> extract_impl(std::span<const std::vector<NodeId>> sets, std::size_t ground_size,
                                      std::size_t taboo_size, double alpha, Rng& rng, Blocked blocked,
                                      Block block) {
  std::vector<std::size_t> admitted;
  std::size_t h = taboo_size;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const double u = rng.uniform();
    const auto& S = sets[k];
    if (std::any_of(S.begin(), S.end(), blocked)) continue;
    // p = C(|V| - |H|, x) / C(|V|, x)
    double p = 1.0;
    for (std::size_t r = 0; r < S.size() && p > 0.0; ++r) {
      if (ground_size < h + r + 1) {
        p = 0.0;
      } else {
        p *= static_cast<double>(ground_size - h - r) / static_cast<double>(ground_size - r);
      }
    }
    if (u * p <= alpha) {
      admitted.push_back(k);
      for (NodeId v : S) block(v);
      h += S.size();
    }
  }
  return admitted;
}

}  // namespace

ExplorationTrace restricted_explore(const OverlayGraph& G, NodeId root, std::size_t max_steps) {
  return restricted_explore(G, NodeLayerIndex(G), root, max_steps);
}

ExplorationTrace restricted_explore(const OverlayGraph& G, const NodeLayerIndex& index, NodeId root,
                                    std::size_t max_steps) {
  check_root(G, root);
  const std::size_t n = G.n();
  std::vector<char> layer_explored(G.m(), 0);
  std::vector<char> discovered(n, 0);
  std::vector<char> explored(n, 0);
  std::vector<char> queued(n, 0);
  std::vector<std::size_t> stamp(n, 0);

  ExplorationTrace trace;
  trace.root = root;
  MinQueue queue;
  queue.push(root);
  queued[root] = 1;
  discovered[root] = 1;

  while (!queue.empty()) {
    if (trace.steps.size() >= max_steps) {
      trace.truncated = true;
      break;
    }
    const NodeId v = queue.top();
    queue.pop();
    queued[v] = 0;
    explored[v] = 1;
    const std::size_t t = trace.steps.size() + 1;
    ExplorationStep step;
    step.node = v;

    for (std::uint32_t k : index.layers_of(v)) {
      if (layer_explored[k]) continue;
      for (NodeId u : G.layers()[k].nodes) {
        if (u == v) continue;
        if (discovered[u]) step.overlap_type1 = true;
        if (stamp[u] == t) step.overlap_type2 = true;
        stamp[u] = t;
      }
    }
    for (std::uint32_t k : index.layers_of(v)) {
      if (layer_explored[k]) continue;
      const Layer& L = G.layers()[k];
      for (NodeId z : closure_neighbors(L, v)) {
        if (!explored[z] && !queued[z]) {
          queued[z] = 1;
          queue.push(z);
          step.enqueued.push_back(z);
        }
      }
      layer_explored[k] = 1;
      step.layers.push_back(k);
      for (NodeId u : L.nodes) {
        if (!discovered[u]) {
          discovered[u] = 1;
          step.discovered.push_back(u);
        }
      }
    }
    step.queue_after = queue.size();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

double extraction_alpha_bound(std::size_t ground_size, std::size_t taboo_size,
                              std::span<const std::size_t> set_sizes) {
  std::size_t total = taboo_size;
  std::size_t largest = 0;
  for (std::size_t x : set_sizes) {
    total += x;
    largest = std::max(largest, x);
  }
  if (total > ground_size) return 0.0;
  if (largest == 0) return 1.0;
  return std::pow(1.0 - static_cast<double>(total) / static_cast<double>(ground_size),
                  static_cast<double>(largest));
}

std::vector<std::size_t> extract_disjoint(std::span<const std::vector<NodeId>> sets, std::size_t ground_size,
                                          std::span<const NodeId> taboo, double alpha, Rng& rng,
                                          bool enforce_bound) {
  std::vector<char> in_h(ground_size, 0);
  std::size_t taboo_size = 0;
  for (NodeId v : taboo) {
    if (v >= ground_size) throw std::invalid_argument("extract_disjoint: taboo node outside the ground set");
    if (!in_h[v]) {
      in_h[v] = 1;
      ++taboo_size;
    }
  }
  std::vector<std::size_t> sizes;
  sizes.reserve(sets.size());
  for (const auto& S : sets) {
    for (NodeId v : S) {
      if (v >= ground_size) throw std::invalid_argument("extract_disjoint: set element outside the ground set");
    }
    sizes.push_back(S.size());
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("extract_disjoint: alpha must be non-negative");
  if (enforce_bound) {
    const double bound = extraction_alpha_bound(ground_size, taboo_size, sizes);
    if (alpha > bound) {
      throw std::invalid_argument("extract_disjoint: alpha = " + std::to_string(alpha) +
                                  " exceeds the admissible bound " + std::to_string(bound));
    }
  }
  return extract_impl(
      sets, ground_size, taboo_size, alpha, rng, [&](NodeId v) { return in_h[v] != 0; },
      [&](NodeId v) { in_h[v] = 1; });
}

std::vector<std::size_t> extract_disjoint(std::span<const std::vector<NodeId>> sets, std::size_t ground_size,
                                          std::span<const NodeId> taboo, double alpha, std::uint64_t seed,
                                          bool enforce_bound) {
  Rng rng(seed, 0, Purpose::extraction, 0);
  return extract_disjoint(sets, ground_size, taboo, alpha, rng, enforce_bound);
}

ExplorationTrace balanced_explore(const OverlayGraph& G, NodeId root, const BalancedParams& params) {
  check_root(G, root);
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("balanced_explore: delta must lie in (0,1)");
  }
  const std::size_t n = G.n();
  const std::size_t m = G.m();

  auto less = [](const LayerType& a, const LayerType& b) {
    return a.size != b.size ? a.size < b.size : a.strength < b.strength;
  };
  std::map<LayerType, std::size_t, decltype(less)> type_ids(less);
  std::vector<std::size_t> type_of(m);
  std::size_t max_size = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& L = G.layers()[k];
    type_of[k] = type_ids.try_emplace(L.type, type_ids.size()).first->second;
    max_size = std::max(max_size, L.nodes.size());
  }
  const std::size_t num_types = type_ids.size();
  if (params.horizon) {
    const double tau = static_cast<double>(*params.horizon);
    const double lhs = 2.0 * static_cast<double>(max_size * max_size) * static_cast<double>(num_types) *
                       static_cast<double>(params.nu) * tau / static_cast<double>(n);
    if (lhs > params.delta) {
      throw std::invalid_argument("balanced_explore: 2 M^2 |A| nu tau / n = " + std::to_string(lhs) +
                                  " exceeds delta = " + std::to_string(params.delta));
    }
    if (2.0 * tau > static_cast<double>(n)) throw std::invalid_argument("balanced_explore: horizon exceeds n/2");
  }

  // Available layers, kept per type in swap-remove vectors.
  std::vector<std::vector<std::uint32_t>> avail(num_types);
  std::vector<std::size_t> pos(m);
  std::vector<char> available(m, 1);
  for (std::uint32_t k = 0; k < m; ++k) {
    pos[k] = avail[type_of[k]].size();
    avail[type_of[k]].push_back(k);
  }
  std::vector<std::size_t> initial_count(num_types);
  for (std::size_t a = 0; a < num_types; ++a) initial_count[a] = avail[a].size();
  auto remove_available = [&](std::uint32_t k) {
    auto& vec = avail[type_of[k]];
    const std::uint32_t last = vec.back();
    vec[pos[k]] = last;
    pos[last] = pos[k];
    vec.pop_back();
    available[k] = 0;
  };

  const NodeLayerIndex index(G);
  Rng rng(params.seed, 0, Purpose::exploration, root);
  std::vector<char> discovered(n, 0);
  std::vector<char> explored(n, 0);
  std::vector<char> queued(n, 0);
  std::vector<std::size_t> added(n, 0);
  std::size_t discovered_count = 1;

  ExplorationTrace trace;
  trace.root = root;
  MinQueue queue;
  queue.push(root);
  queued[root] = 1;
  discovered[root] = 1;

  while (!queue.empty()) {
    if (trace.steps.size() >= params.max_steps) {
      trace.truncated = true;
      break;
    }
    const std::size_t t = trace.steps.size() + 1;
    const NodeId v = queue.top();
    queue.pop();
    queued[v] = 0;
    ExplorationStep step;
    step.node = v;

    std::vector<std::uint32_t> wplus;
    for (std::uint32_t k : index.layers_of(v)) {
      if (available[k]) wplus.push_back(k);
    }
    std::vector<std::vector<NodeId>> inputs;
    inputs.reserve(wplus.size());
    std::vector<std::size_t> sizes;
    for (std::uint32_t k : wplus) {
      std::vector<NodeId> S;
      for (NodeId u : G.layers()[k].nodes) {
        if (u != v) S.push_back(u);
      }
      sizes.push_back(S.size());
      inputs.push_back(std::move(S));
    }

    // Ground set: nodes not yet explored (v_t included); taboo: discovered
    // nodes that are not yet explored.
    const std::size_t ground = n - (t - 1);
    const std::size_t taboo = discovered_count - (t - 1);
    const double alpha = (1.0 - params.delta) * (1.0 - static_cast<double>(t - 1) / static_cast<double>(n));
    if (alpha > extraction_alpha_bound(ground, taboo, sizes)) trace.extraction_bound_violated = true;
    const auto chosen = extract_impl(
        std::span<const std::vector<NodeId>>(inputs), ground, taboo, alpha, rng,
        [&](NodeId u) { return (discovered[u] && !explored[u]) || added[u] == t; },
        [&](NodeId u) { added[u] = t; });

    explored[v] = 1;
    for (std::size_t c : chosen) {
      const std::uint32_t k = wplus[c];
      step.layers.push_back(k);
      for (NodeId z : closure_neighbors(G.layers()[k], v)) {
        if (!explored[z] && !queued[z]) {
          queued[z] = 1;
          queue.push(z);
          step.enqueued.push_back(z);
        }
      }
    }
    for (const auto& S : inputs) {
      for (NodeId u : S) {
        if (!discovered[u]) {
          discovered[u] = 1;
          ++discovered_count;
          step.discovered.push_back(u);
        }
      }
    }

    for (std::uint32_t k : wplus) remove_available(k);
    for (std::size_t a = 0; a < num_types; ++a) {
      const std::size_t quota = params.nu * t;
      const std::size_t keep = initial_count[a] > quota ? initial_count[a] - quota : 0;
      auto& vec = avail[a];
      while (vec.size() > keep) remove_available(vec[rng.below(vec.size())]);
    }

    step.queue_after = queue.size();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

namespace {

// Advances the queue-length law by one step in place.
void queue_step(const Pmf& f, std::vector<double>& cur, std::size_t& top, double& overflow) {
  const std::size_t q_max = cur.size() - 1;
  const auto& w = f.weights();
  const std::size_t off = f.offset();
  std::vector<double> next(cur.size(), 0.0);
  next[0] = cur[0];
  std::size_t new_top = 0;
  for (std::size_t q = 1; q <= top; ++q) {
    const double c = cur[q];
    if (c == 0.0) continue;
    overflow += c * f.tail_mass();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t nq = q - 1 + off + i;
      if (nq > q_max) {
        overflow += c * w[i];
      } else {
        next[nq] += c * w[i];
        if (w[i] > 0.0) new_top = std::max(new_top, nq);
      }
    }
  }
  cur.swap(next);
  top = new_top;
}

// Extinct mass only ever grows by non-negative terms, so the complement is
// non-increasing in t even after rounding.
double alive_mass(const std::vector<double>& cur) { return std::clamp(1.0 - cur[0], 0.0, 1.0); }

}  // namespace

QueueTailResult gw_queue_tail_exact(const Pmf& f, std::size_t t, std::size_t q_max) {
  if (q_max < 1) throw std::invalid_argument("gw_queue_tail: q_max must be at least 1");
  std::vector<double> cur(q_max + 1, 0.0);
  cur[1] = 1.0;
  std::size_t top = 1;
  double overflow = 0.0;
  for (std::size_t s = 0; s < t; ++s) queue_step(f, cur, top, overflow);
  return {alive_mass(cur), 0.0, overflow};
}

std::vector<double> gw_queue_tail_curve(const Pmf& f, std::size_t t_max, std::size_t q_max) {
  if (q_max < 1) throw std::invalid_argument("gw_queue_tail: q_max must be at least 1");
  std::vector<double> cur(q_max + 1, 0.0);
  cur[1] = 1.0;
  std::size_t top = 1;
  double overflow = 0.0;
  std::vector<double> rho{1.0};
  rho.reserve(t_max + 1);
  for (std::size_t s = 0; s < t_max; ++s) {
    queue_step(f, cur, top, overflow);
    rho.push_back(alive_mass(cur));
  }
  return rho;
}

QueueTailResult gw_queue_tail_monte_carlo(const Pmf& f, std::size_t t, std::size_t replicates,
                                          std::uint64_t seed) {
  if (replicates == 0) throw std::invalid_argument("gw_queue_tail: need at least one replicate");
  std::vector<double> cum(f.weights().size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) cum[i] = (acc += f.weights()[i]);
  Rng rng(seed, 0, Purpose::monte_carlo, 0);
  std::size_t alive = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    std::size_t q = 1;
    bool forever = false;
    for (std::size_t s = 0; s < t && q > 0; ++s) {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      if (it == cum.end()) {
        forever = true;  // draw landed in the unstored tail
        break;
      }
      q = q - 1 + f.offset() + static_cast<std::size_t>(it - cum.begin());
    }
    if (forever || q > 0) ++alive;
  }
  const double p = static_cast<double>(alive) / static_cast<double>(replicates);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(replicates)), 0.0};
}

}  // namespace layergraph
