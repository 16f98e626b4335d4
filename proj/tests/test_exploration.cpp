#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "layergraph/distributions.hpp"
#include "layergraph/estimators.hpp"
#include "layergraph/exploration.hpp"
#include "layergraph/simulator.hpp"
#include "layergraph/theory.hpp"

using namespace layergraph;

namespace {

Layer layer(std::vector<NodeId> nodes, std::vector<Edge> edges, double y = 0.5) {
  Layer L;
  L.type = {nodes.size(), y};
  L.nodes = std::move(nodes);
  L.edges = std::move(edges);
  std::sort(L.edges.begin(), L.edges.end());
  return L;
}

std::vector<NodeId> component_of(const OverlayGraph& G, NodeId root) {
  const auto labels = component_labels(G);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < G.n(); ++v)
    if (labels[v] == labels[root]) out.push_back(v);
  return out;
}

bool subset(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

OverlayGraph random_instance(std::uint64_t seed, std::size_t n = 60) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.m = 25;
  cfg.P = LayerTypeDistribution({{{2, 1.0}, 0.3}, {{4, 0.6}, 0.4}, {{7, 0.3}, 0.3}});
  cfg.master_seed = seed;
  return generate(cfg, 0);
}

}  // namespace

TEST(ClosureNeighbors, FollowsPathsInsideTheLayer) {
  const auto L = layer({1, 3, 5, 7, 9}, {{1, 3}, {3, 5}, {7, 9}});
  EXPECT_EQ(closure_neighbors(L, 1), (std::vector<NodeId>{3, 5}));
  EXPECT_EQ(closure_neighbors(L, 9), (std::vector<NodeId>{7}));
  EXPECT_TRUE(closure_neighbors(layer({2, 4}, {}), 2).empty());
}

TEST(RestrictedExplore, SingleLayerGivesExactComponent) {
  const OverlayGraph G(8, {layer({0, 2, 4, 6, 7}, {{0, 2}, {2, 4}, {4, 6}, {6, 7}})});
  const auto tr = restricted_explore(G, 4);
  EXPECT_EQ(tr.output(), component_of(G, 4));
  EXPECT_FALSE(tr.any_overlap());
  EXPECT_EQ(tr.visit_order().front(), 4u);
  EXPECT_EQ(tr.queue_length(0), 1u);
  EXPECT_THROW(restricted_explore(G, 8), std::invalid_argument);
}

TEST(RestrictedExplore, DisjointLayersGiveExactComponentWithoutFlags) {
  const OverlayGraph G(12, {layer({0, 1, 2}, {{0, 1}, {1, 2}}), layer({3, 4, 5, 6}, {{3, 4}, {5, 6}}),
                            layer({7, 8, 9, 10, 11}, {{7, 8}, {8, 9}, {9, 10}, {10, 11}})});
  for (NodeId root = 0; root < 12; ++root) {
    const auto tr = restricted_explore(G, root);
    EXPECT_EQ(tr.output(), component_of(G, root)) << root;
    EXPECT_FALSE(tr.any_overlap());
  }
}

TEST(RestrictedExplore, MissesNodesBehindAnExploredLayer) {
  // Layer A is split in two pieces {0,1} and {2,3}. The root 0 explores A
  // first, reaches 2 through the chain 1 - 4 - 2, but A is then spent, so
  // node 3 is never found. Padding nodes 5..15 carry an unrelated layer.
  const OverlayGraph G(16, {layer({0, 1, 2, 3}, {{0, 1}, {2, 3}}), layer({1, 4}, {{1, 4}}),
                            layer({2, 4}, {{2, 4}}), layer({5, 6, 7, 8}, {{5, 6}, {6, 7}, {7, 8}})});
  const auto comp = component_of(G, 0);
  EXPECT_EQ(comp, (std::vector<NodeId>{0, 1, 2, 3, 4}));
  const auto tr = restricted_explore(G, 0);
  EXPECT_EQ(tr.output(), (std::vector<NodeId>{0, 1, 2, 4}));
  EXPECT_TRUE(subset(tr.output(), comp));
  bool type1 = false;
  for (const auto& s : tr.steps) type1 = type1 || s.overlap_type1;
  EXPECT_TRUE(type1);
}

TEST(RestrictedExplore, TypeTwoOverlapIsFlagged) {
  // Two unexplored layers covering the root share node 2.
  const OverlayGraph G(4, {layer({0, 1, 2}, {{0, 1}}), layer({0, 2, 3}, {{0, 3}})});
  const auto tr = restricted_explore(G, 0);
  ASSERT_FALSE(tr.steps.empty());
  EXPECT_TRUE(tr.steps[0].overlap_type2);
}

TEST(RestrictedExplore, RandomInstances) {
  std::size_t clean = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto G = random_instance(seed);
    const NodeId root = static_cast<NodeId>(seed % G.n());
    const auto tr = restricted_explore(G, root);
    const auto comp = component_of(G, root);
    const auto out = tr.output();
    EXPECT_TRUE(subset(out, comp)) << seed;
    if (!tr.any_overlap()) {
      ++clean;
      EXPECT_EQ(out, comp) << seed;
    }
    std::set<std::uint32_t> seen;
    for (const auto& s : tr.steps)
      for (auto k : s.layers) EXPECT_TRUE(seen.insert(k).second) << "layer explored twice";
    // Every visited node is visited once and the visit order follows the min-queue.
    const auto order = tr.visit_order();
    EXPECT_EQ(std::set<NodeId>(order.begin(), order.end()).size(), order.size());
  }
  EXPECT_GT(clean, 0u);
}

TEST(RestrictedExplore, MaxStepsTruncates) {
  const OverlayGraph G(5, {layer({0, 1, 2, 3, 4}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}})});
  const auto tr = restricted_explore(G, 0, 2);
  EXPECT_EQ(tr.steps.size(), 2u);
  EXPECT_TRUE(tr.truncated);
}

TEST(ExtractDisjoint, ZeroAlphaAdmitsNothing) {
  const std::vector<std::vector<NodeId>> sets{{0, 1}, {2, 3}, {4, 5}};
  EXPECT_TRUE(extract_disjoint(sets, 100, {}, 0.0, std::uint64_t{1}).empty());
}

TEST(ExtractDisjoint, OutputIsDisjointAndAvoidsTaboo) {
  Rng gen(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<NodeId>> sets;
    for (int k = 0; k < 8; ++k) sets.push_back(sample_subset(40, 3, gen));
    const std::vector<NodeId> taboo{static_cast<NodeId>(trial % 40)};
    const auto chosen = extract_disjoint(sets, 40, taboo, 0.5, gen, false);
    std::set<NodeId> used(taboo.begin(), taboo.end());
    for (auto k : chosen)
      for (NodeId v : sets[k]) EXPECT_TRUE(used.insert(v).second);
  }
}

TEST(ExtractDisjoint, DisjointSetsAreAdmittedWithProbabilityAlpha) {
  // With a large ground set the acceptance threshold is alpha up to 4e-5.
  std::vector<std::vector<NodeId>> sets;
  for (NodeId k = 0; k < 10; ++k) sets.push_back({2 * k, 2 * k + 1});
  const std::size_t trials = 10000;
  const double alpha = 0.4;
  std::vector<std::size_t> hits(sets.size(), 0);
  for (std::size_t i = 0; i < trials; ++i) {
    for (auto k : extract_disjoint(sets, 1000000, {}, alpha, std::uint64_t{i})) ++hits[k];
  }
  const double sd = std::sqrt(alpha * (1 - alpha) / trials);
  for (auto h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, alpha, 4 * sd);
}

TEST(ExtractDisjoint, AlphaAboveBoundIsRejected) {
  const std::vector<std::vector<NodeId>> sets{{0, 1, 2}, {3, 4, 5}};
  const std::size_t sizes[] = {3, 3};
  const double bound = extraction_alpha_bound(20, 2, sizes);
  EXPECT_NEAR(bound, std::pow(1.0 - 8.0 / 20.0, 3), 1e-15);
  const std::vector<NodeId> taboo{10, 11};
  EXPECT_NO_THROW(extract_disjoint(sets, 20, taboo, bound, std::uint64_t{1}));
  EXPECT_THROW(extract_disjoint(sets, 20, taboo, bound + 0.01, std::uint64_t{1}), std::invalid_argument);
  EXPECT_NO_THROW(extract_disjoint(sets, 20, taboo, bound + 0.01, std::uint64_t{1}, false));
  const std::size_t too_big[] = {15, 10};
  EXPECT_EQ(extraction_alpha_bound(20, 0, too_big), 0.0);
}

TEST(BalancedExplore, OutputWithinComponent) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto G = random_instance(seed, 200);
    const NodeId root = static_cast<NodeId>(seed % G.n());
    BalancedParams p;
    p.seed = seed;
    const auto tr = balanced_explore(G, root, p);
    EXPECT_TRUE(subset(tr.output(), component_of(G, root))) << seed;
    std::set<std::uint32_t> seen;
    for (const auto& s : tr.steps)
      for (auto k : s.layers) EXPECT_TRUE(seen.insert(k).second);
  }
}

TEST(BalancedExplore, LargeNuStopsAfterTheFirstStep) {
  const auto G = random_instance(3, 200);
  const NodeId root = G.layers()[0].nodes[0];
  BalancedParams p;
  p.nu = G.m() + 1;
  const auto tr = balanced_explore(G, root, p);
  ASSERT_FALSE(tr.steps.empty());
  for (std::size_t t = 1; t < tr.steps.size(); ++t) EXPECT_TRUE(tr.steps[t].layers.empty());
  EXPECT_TRUE(subset(tr.output(), component_of(G, root)));
}

TEST(BalancedExplore, DisjointLayersMatchRestrictedExploration) {
  std::vector<Layer> layers;
  for (NodeId k = 0; k < 10; ++k) layers.push_back(layer({3 * k, 3 * k + 1, 3 * k + 2}, {{3 * k, 3 * k + 1}, {3 * k + 1, 3 * k + 2}}));
  const OverlayGraph G(100000, std::move(layers));
  BalancedParams p;
  p.delta = 1e-9;
  std::size_t agree = 0;
  for (NodeId root = 0; root < 30; ++root) {
    p.seed = root;
    agree += balanced_explore(G, root, p).output() == restricted_explore(G, root).output() ? 1 : 0;
  }
  EXPECT_EQ(agree, 30u);
}

TEST(BalancedExplore, HorizonConstraintIsChecked) {
  const auto G = random_instance(1, 200);
  BalancedParams p;
  p.horizon = 50;
  EXPECT_THROW(balanced_explore(G, 0, p), std::invalid_argument);
  p.delta = 1.5;
  p.horizon.reset();
  EXPECT_THROW(balanced_explore(G, 0, p), std::invalid_argument);
}

TEST(BalancedExplore, SurvivesAtLeastAsOftenAsTheLowerOffspringTree) {
  // P = delta_(3, 0.5), n = m = 10^4, nu = 1, tau = 50: 2 M^2 |A| nu tau / n = 0.09.
  const std::size_t n = 10000, tau = 50, nu = 1;
  const double delta = 0.1;
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.m = n;
  cfg.P = LayerTypeDistribution::point(3, 0.5);
  cfg.master_seed = 2024;
  const auto G = generate(cfg, 0);

  // Lower offspring law: each of the m - (tau - 1) nu layers kept by the
  // balancing covers v_t with probability 3/n and is admitted with
  // probability at least (1 - delta)(1 - tau/n) >= 0.9 (1 - 0.005).
  const double p = (1.0 - delta) * (1.0 - static_cast<double>(tau) / n) * 3.0 / static_cast<double>(n);
  const Pmf bp = bin_plus(2, 0.5);
  const Pmf inc(0, {1.0 - p + p * bp(0), p * bp(1), p * bp(2)});
  const Pmf f = convolve_power(inc, n - (tau - 1) * nu, 1e-14);
  const double rho = gw_queue_tail_exact(f, tau).value;

  BalancedParams params;
  params.nu = nu;
  params.delta = delta;
  params.horizon = tau;
  params.max_steps = tau;
  const std::size_t R = 400;
  std::size_t alive = 0;
  Rng pick(7);
  for (std::size_t r = 0; r < R; ++r) {
    params.seed = r;
    alive += balanced_explore(G, static_cast<NodeId>(pick.below(n)), params).truncated ? 1 : 0;
  }
  const double frac = static_cast<double>(alive) / R;
  EXPECT_GE(frac, rho - 3.0 * std::sqrt(rho * (1 - rho) / R)) << "rho_tau = " << rho;
}

TEST(QueueTail, Examples) {
  EXPECT_EQ(gw_queue_tail_exact(Pmf::delta(0), 1).value, 0.0);
  EXPECT_EQ(gw_queue_tail_exact(Pmf::delta(0), 0).value, 1.0);
  for (std::size_t t : {1, 5, 100}) EXPECT_EQ(gw_queue_tail_exact(Pmf::delta(1), t).value, 1.0);
  // Bernoulli(q) offspring: alive after t steps iff the first t draws are 1.
  EXPECT_NEAR(gw_queue_tail_exact(bernoulli_pmf(0.7), 4).value, std::pow(0.7, 4), 1e-15);
}

TEST(QueueTail, MonteCarloAgreesWithExact) {
  const Pmf f = poisson_pmf(0.8, 1e-15);
  const auto exact = gw_queue_tail_exact(f, 10);
  const auto mc = gw_queue_tail_monte_carlo(f, 10, 100000, 5);
  EXPECT_NEAR(mc.value, exact.value, 3 * mc.std_error);
  // Only the truncated Poisson tail can spill into the absorbing state.
  EXPECT_LE(exact.overflow_mass, 10 * f.tail_mass());
}

TEST(QueueTail, DecreasesToSurvivalProbability) {
  const Pmf f = poisson_pmf(2.0, 1e-16);
  const auto curve = gw_queue_tail_curve(f, 1000);
  ASSERT_EQ(curve.size(), 1001u);
  EXPECT_EQ(curve[0], 1.0);
  for (std::size_t t = 1; t < curve.size(); ++t) EXPECT_LE(curve[t], curve[t - 1] + 1e-15);
  EXPECT_NEAR(curve[1000], gw_survival(f), 1e-6);
  EXPECT_NEAR(gw_queue_tail_exact(f, 1000).value, curve[1000], 1e-15);
}
