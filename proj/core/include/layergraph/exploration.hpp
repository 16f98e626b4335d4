#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "layergraph/overlay_graph.hpp"
#include "layergraph/pmf.hpp"
#include "layergraph/rng.hpp"

namespace layergraph {

/// Layers covering each node, as a compressed list.
class NodeLayerIndex {
 public:
  explicit NodeLayerIndex(const OverlayGraph& G);

  std::span<const std::uint32_t> layers_of(NodeId v) const {
    return {layers_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> layers_;
};

/// Nodes of layer k reachable from v inside that layer, v excluded
/// (the neighbourhood of v in the transitive closure of the layer).
std::vector<NodeId> closure_neighbors(const Layer& layer, NodeId v);

struct ExplorationStep {
  NodeId node = 0;
  /// Layers explored at this step.
  std::vector<std::uint32_t> layers;
  /// Nodes declared discovered for the first time at this step.
  std::vector<NodeId> discovered;
  /// Nodes added to the queue at this step.
  std::vector<NodeId> enqueued;
  /// Some V(G_k) \ {v_t}, for an unexplored layer k covering v_t, meets the
  /// nodes discovered before this step.
  bool overlap_type1 = false;
  /// Two distinct unexplored layers covering v_t share a node other than v_t.
  bool overlap_type2 = false;
  std::size_t queue_after = 0;
};

struct ExplorationTrace {
  NodeId root = 0;
  std::vector<ExplorationStep> steps;
  /// True when the run ended with a nonempty queue because of max_steps.
  bool truncated = false;
  /// Balanced exploration only: some extraction call ran outside the
  /// admissible range of its acceptance parameter.
  bool extraction_bound_violated = false;

  std::vector<NodeId> visit_order() const;
  /// Explored nodes, sorted.
  std::vector<NodeId> output() const;
  bool any_overlap() const;
  /// Queue length after step t (t = 0 gives 1).
  std::size_t queue_length(std::size_t t) const;
};

/// Restricted exploration: repeatedly takes the smallest queued node, and
/// explores every not yet explored layer covering it, enqueueing the
/// node's closure neighbours in that layer. Each layer is explored at most
/// once. Already explored nodes are not enqueued again; re-exploring them
/// could not find an unexplored layer, so the output is unaffected.
ExplorationTrace restricted_explore(const OverlayGraph& G, NodeId root,
                                    std::size_t max_steps = static_cast<std::size_t>(-1));
ExplorationTrace restricted_explore(const OverlayGraph& G, const NodeLayerIndex& index, NodeId root,
                                    std::size_t max_steps = static_cast<std::size_t>(-1));

/// Largest alpha for which admissions are i.i.d. Bernoulli(alpha):
/// (1 - (|H0| + sum |V_k|) / |V|)^{max |V_k|}, or 0 if the sizes do not fit.
double extraction_alpha_bound(std::size_t ground_size, std::size_t taboo_size,
                              std::span<const std::size_t> set_sizes);

/// Randomised extraction of pairwise disjoint sets avoiding the taboo set.
/// Set k is admitted when it misses the running taboo set H and
/// U_k <= alpha C(|V|, |V_k|) / C(|V| - |H|, |V_k|). Sets and taboo nodes
/// are ids in [0, ground_size). Throws std::invalid_argument when alpha is
/// outside [0, extraction_alpha_bound] unless enforce_bound is false.
std::vector<std::size_t> extract_disjoint(std::span<const std::vector<NodeId>> sets, std::size_t ground_size,
                                          std::span<const NodeId> taboo, double alpha, Rng& rng,
                                          bool enforce_bound = true);
std::vector<std::size_t> extract_disjoint(std::span<const std::vector<NodeId>> sets, std::size_t ground_size,
                                          std::span<const NodeId> taboo, double alpha, std::uint64_t seed,
                                          bool enforce_bound = true);

struct BalancedParams {
  std::size_t nu = 1;
  double delta = 0.1;
  /// Horizon tau; when set, 2 M^2 |A| nu tau / n <= delta and tau <= n/2
  /// are checked, with M the largest layer size and A the set of types.
  std::optional<std::size_t> horizon;
  std::uint64_t seed = 0;
  std::size_t max_steps = static_cast<std::size_t>(-1);
};

/// Balanced exploration. Each step discovers the available layers covering
/// v_t, keeps a disjoint subfamily chosen by extract_disjoint with
/// alpha_t = (1 - delta)(1 - (t-1)/n), explores those, and then thins the
/// remaining available layers of each type (x, y) to at most
/// (m_xy - nu t)_+ by uniform random removal.
ExplorationTrace balanced_explore(const OverlayGraph& G, NodeId root, const BalancedParams& params);

struct QueueTailResult {
  double value = 0.0;
  /// Monte Carlo standard error; zero for the exact computation.
  double std_error = 0.0;
  /// Exact mode: mass that left the tracked range and is counted as alive.
  double overflow_mass = 0.0;
};

inline constexpr std::size_t kDefaultQueueCap = 10'000;

/// rho_t(f) = P(Q_t > 0) for Q_0 = 1, Q_t = 1(Q_{t-1} > 0)(Q_{t-1} - 1 + Z_t)
/// with Z_t i.i.d. f. Queue lengths above q_max, and f's tail mass, are
/// folded into an absorbing "alive" state, so the result is an upper bound
/// that is exact when overflow_mass is zero.
QueueTailResult gw_queue_tail_exact(const Pmf& f, std::size_t t, std::size_t q_max = kDefaultQueueCap);
/// rho_0 .. rho_{t_max} in one pass.
std::vector<double> gw_queue_tail_curve(const Pmf& f, std::size_t t_max, std::size_t q_max = kDefaultQueueCap);
QueueTailResult gw_queue_tail_monte_carlo(const Pmf& f, std::size_t t, std::size_t replicates,
                                          std::uint64_t seed);

}  // namespace layergraph
