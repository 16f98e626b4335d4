#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "layergraph/distributions.hpp"
#include "oracles.hpp"

using namespace layergraph;

namespace {

void expect_pmf_near(const Pmf& f, const std::vector<double>& expected, double tol) {
  for (std::size_t t = 0; t < expected.size(); ++t) EXPECT_NEAR(f(t), expected[t], tol) << "t=" << t;
  EXPECT_LE(f.support_end(), expected.size() + f.offset() + 1);
}

Pmf random_pmf(std::mt19937_64& gen, std::size_t len) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(len);
  for (auto& v : w) v = u(gen);
  return Pmf::from_counts(w);
}

}  // namespace

TEST(Pmf, InvariantsAreChecked) {
  EXPECT_THROW(Pmf(0, {0.5, 0.2}), std::invalid_argument);
  EXPECT_THROW(Pmf(0, {-0.1, 1.1}), std::invalid_argument);
  EXPECT_NO_THROW(Pmf(0, {0.5, 0.2}, 0.3));
  const Pmf d = Pmf::delta(3);
  EXPECT_EQ(d(3), 1.0);
  EXPECT_EQ(d.mean(), 3.0);
}

TEST(Binomial, Examples) {
  expect_pmf_near(binomial_pmf(0, 0.7), {1.0}, 0);
  expect_pmf_near(binomial_pmf(2, 0.5), {0.25, 0.5, 0.25}, 1e-15);
  // Enumerate the 16 outcomes of four trials.
  double one = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    const int k = __builtin_popcount(mask);
    if (k == 1) one += std::pow(0.3, k) * std::pow(0.7, 4 - k);
  }
  EXPECT_NEAR(binomial_pmf(4, 0.3)(1), one, 1e-15);
  EXPECT_NEAR(binomial_pmf(4, 0.3)(1), 0.4116, 1e-12);
  EXPECT_EQ(binomial_pmf(4, 0.3).tail_mass(), 0.0);
  EXPECT_THROW(binomial_pmf(3, 1.2), std::invalid_argument);
  EXPECT_THROW(binomial_pmf(3, -0.1), std::invalid_argument);
}

TEST(Binomial, LargeTrialCountsStayNormalised) {
  const Pmf f = binomial_pmf(100000, 0.00003);
  EXPECT_NEAR(f.stored_mass() + f.tail_mass(), 1.0, 1e-9);
  EXPECT_NEAR(f.mean(), 3.0, 1e-6);
}

TEST(Poisson, Examples) {
  expect_pmf_near(poisson_pmf(0.0), {1.0}, 0);
  EXPECT_NEAR(poisson_pmf(1.0, 1e-12)(0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_pmf(2.0, 1e-12).mean(), 2.0, 1e-9);
  const Pmf f = poisson_pmf(50.0, 1e-10);
  EXPECT_LE(f.tail_mass(), 1e-10);
  for (std::size_t t = 30; t < 70; t += 7) EXPECT_NEAR(f(t), oracle::poisson(50.0, t), 1e-14);
  EXPECT_THROW(poisson_pmf(-1.0), std::invalid_argument);
}

TEST(Convolve, Examples) {
  const Pmf g = binomial_pmf(3, 0.4);
  const Pmf id = convolve(Pmf::delta(0), g);
  for (std::size_t t = 0; t <= 3; ++t) EXPECT_NEAR(id(t), g(t), 1e-16);
  const Pmf two = convolve(bernoulli_pmf(0.5), bernoulli_pmf(0.5));
  expect_pmf_near(two, {0.25, 0.5, 0.25}, 1e-16);
  const Pmf five = convolve(binomial_pmf(2, 0.3), binomial_pmf(3, 0.3));
  for (std::size_t t = 0; t <= 5; ++t) EXPECT_NEAR(five(t), oracle::binomial(5, t, 0.3), 1e-12);
}

TEST(Convolve, OffsetsAndTails) {
  const Pmf f(2, {0.5, 0.3}, 0.2);
  const Pmf g(1, {0.6, 0.4});
  const Pmf h = convolve(f, g);
  EXPECT_EQ(h.offset(), 3u);
  EXPECT_NEAR(h(3), 0.3, 1e-16);
  EXPECT_NEAR(h(4), 0.5 * 0.4 + 0.3 * 0.6, 1e-16);
  EXPECT_NEAR(h(5), 0.12, 1e-16);
  EXPECT_NEAR(h.tail_mass(), 0.2, 1e-15);
}

TEST(Convolve, PowerMatchesRepeatedConvolution) {
  const Pmf g(0, {0.2, 0.5, 0.3});
  Pmf acc = Pmf::delta(0);
  for (int i = 0; i < 7; ++i) acc = convolve(acc, g);
  const Pmf p = convolve_power(g, 7, 0.0);
  for (std::size_t t = 0; t <= 14; ++t) EXPECT_NEAR(p(t), acc(t), 1e-15);
}

TEST(TotalVariation, Examples) {
  const Pmf f = binomial_pmf(4, 0.3);
  EXPECT_EQ(tv_distance(f, f), 0.0);
  EXPECT_NEAR(tv_distance(Pmf::delta(0), Pmf::delta(1)), 1.0, 1e-16);
  EXPECT_NEAR(tv_distance(bernoulli_pmf(0.5), bernoulli_pmf(0.6)), 0.1, 1e-15);
}

TEST(TotalVariation, IsAMetricOnRandomTriples) {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Pmf a = random_pmf(gen, 1 + trial % 7);
    const Pmf b = random_pmf(gen, 1 + (trial * 3) % 5);
    const Pmf c = random_pmf(gen, 1 + (trial * 5) % 9);
    EXPECT_EQ(tv_distance(a, b), tv_distance(b, a));
    EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-15);
    EXPECT_GE(tv_distance(a, b), 0.0);
    EXPECT_LE(tv_distance(a, b), 1.0);
  }
}

TEST(CompoundPoisson, Examples) {
  const Pmf unit = compound_poisson(2.5, Pmf::delta(1), 1e-14);
  for (std::size_t t = 0; t < 20; ++t) EXPECT_NEAR(unit(t), oracle::poisson(2.5, t), 1e-12);
  const Pmf zero = compound_poisson(0.0, binomial_pmf(2, 0.5));
  EXPECT_EQ(zero(0), 1.0);
  const Pmf half = compound_poisson(1.0, bernoulli_pmf(0.5), 1e-14);
  EXPECT_NEAR(half(0), std::exp(-0.5), 1e-15);
  // Direct mixture: sum_N Poi(1)(N) Bin(N, 0.5)(0).
  double direct = 0.0;
  for (std::size_t N = 0; N < 60; ++N) direct += oracle::poisson(1.0, N) * std::pow(0.5, static_cast<double>(N));
  EXPECT_NEAR(half(0), direct, 1e-14);
  EXPECT_THROW(compound_poisson(-1.0, Pmf::delta(1)), std::invalid_argument);
}

TEST(CompoundPoisson, MatchesDirectMixtureAndMoments) {
  const std::vector<double> g{0.1, 0.3, 0.4, 0.2};
  const Pmf gp(0, g);
  const double lambda = 3.2;
  const Pmf f = compound_poisson(lambda, gp, 1e-14);
  const auto direct = oracle::compound_poisson_direct(lambda, g, 25, 120);
  for (std::size_t t = 0; t <= 25; ++t) EXPECT_NEAR(f(t), direct[t], 1e-13) << t;
  ASSERT_LT(f.tail_mass(), 1e-12);
  const double eg = gp.mean();
  const double eg2 = gp.variance() + eg * eg;
  EXPECT_NEAR(f.mean() / (lambda * eg), 1.0, 1e-8);
  EXPECT_NEAR(f.variance() / (lambda * eg2), 1.0, 1e-8);
}

TEST(CompoundPoisson, TruncationIsRecorded) {
  const Pmf f = compound_poisson(4.0, binomial_pmf(2, 0.5), 1e-6);
  EXPECT_LE(f.tail_mass(), 1e-6);
  EXPECT_NEAR(f.stored_mass() + f.tail_mass(), 1.0, 1e-9);
}

TEST(CompoundPoisson, StopsWhenIncrementWeightsRoundBelowOne) {
  // The stored Bin(20, 0.5) and Bin(200, 0.5) weights sum to slightly less
  // than one; the recursion must still stop near the tolerance.
  for (std::size_t x : {20, 200}) {
    const Pmf g = binomial_pmf(x, 0.5);
    const Pmf f = compound_poisson(3.0, g, 1e-14);
    EXPECT_LT(f.support_end(), 20 * x) << x;
    EXPECT_LT(f.tail_mass(), 1e-12) << x;
    EXPECT_NEAR(f.mean(), 3.0 * x / 2.0, 1e-8 * x) << x;
  }
}

TEST(CompoundPoisson, MixtureMerge) {
  const CompoundPoissonParams single[] = {{1.0, Pmf::delta(1)}};
  const auto s = cpoi_mixture_merge(single);
  EXPECT_EQ(s.lambda, 1.0);
  EXPECT_EQ(s.increments(1), 1.0);

  const CompoundPoissonParams two[] = {{1.0, Pmf::delta(1)}, {1.0, Pmf::delta(2)}};
  const auto m = cpoi_mixture_merge(two);
  EXPECT_EQ(m.lambda, 2.0);
  EXPECT_NEAR(m.increments(1), 0.5, 1e-16);
  EXPECT_NEAR(m.increments(2), 0.5, 1e-16);

  const CompoundPoissonParams parts[] = {{0.5, bernoulli_pmf(0.3)}, {1.5, binomial_pmf(2, 0.3)}};
  const auto merged = cpoi_mixture_merge(parts);
  const Pmf lhs = compound_poisson(merged.lambda, merged.increments, 1e-15);
  const Pmf rhs = convolve(compound_poisson(0.5, bernoulli_pmf(0.3), 1e-15),
                           compound_poisson(1.5, binomial_pmf(2, 0.3), 1e-15));
  EXPECT_LT(tv_distance(lhs, rhs), 1e-10);

  EXPECT_THROW(cpoi_mixture_merge(std::span<const CompoundPoissonParams>{}), std::invalid_argument);
  const CompoundPoissonParams zeros[] = {{0.0, Pmf::delta(1)}};
  EXPECT_THROW(cpoi_mixture_merge(zeros), std::invalid_argument);
}

TEST(CompoundPoisson, PerturbationBound) {
  EXPECT_EQ(cpoi_perturbation_bound(1, 1, 0), 0.0);
  EXPECT_EQ(cpoi_perturbation_bound(1, 2, 0), 1.0);
  EXPECT_NEAR(cpoi_perturbation_bound(2, 2, 0.1), 0.2, 1e-16);
  // Pairs at TV distance exactly 0.1: move 0.1 of mass between two points.
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.15, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(gen), b = u(gen);
    const double c = 1.0 - a - b;
    const Pmf f(0, {a, b, c});
    const Pmf g(0, {a - 0.1, b + 0.1, c});
    ASSERT_NEAR(tv_distance(f, g), 0.1, 1e-12);
    const double tv = tv_distance(compound_poisson(2.0, f, 1e-14), compound_poisson(2.0, g, 1e-14));
    EXPECT_LE(tv, 0.2 + 1e-12);
  }
}

TEST(Connectivity, Examples) {
  EXPECT_EQ(connectivity_prob(1, 0.3), 1.0);
  EXPECT_NEAR(connectivity_prob(2, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(connectivity_prob(3, 0.5), 0.5, 1e-15);
  EXPECT_THROW(connectivity_prob(0, 0.5), std::invalid_argument);
  for (double y : {0.1, 0.35, 0.8}) {
    EXPECT_NEAR(connectivity_prob(3, y), 3 * y * y - 2 * y * y * y, 1e-14);
    for (std::size_t k = 1; k <= 6; ++k) EXPECT_NEAR(connectivity_prob(k, y), oracle::connected_enumerated(k, y), 1e-13);
  }
}

TEST(Connectivity, LargeGraphsStayInRange) {
  // Dense regime: p(k) -> 1. Sparse regime: tiny but positive, in log space.
  EXPECT_NEAR(connectivity_prob(2000, 0.05), 1.0, 1e-12);
  const double lp = log_connectivity_prob(500, 0.001);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_LT(lp, -100.0);
  // Tree count bound: p(k) >= k^{k-2} y^{k-1} (1-y)^{C(k,2)-(k-1)}.
  const double k = 500, y = 0.001;
  const double lower = (k - 2) * std::log(k) + (k - 1) * std::log(y) + (k * (k - 1) / 2 - (k - 1)) * std::log1p(-y);
  EXPECT_GE(lp, lower);
}

TEST(BinPlus, MatchesEnumeration) {
  for (std::size_t x = 0; x <= 4; ++x) {
    for (double y : {0.1, 0.5, 0.9}) {
      const auto ref = oracle::bin_plus_enumerated(x, y);
      const Pmf f = bin_plus(x, y);
      for (std::size_t t = 0; t <= x; ++t) EXPECT_NEAR(f(t), ref[t], 1e-12) << x << " " << y << " " << t;
    }
  }
}

TEST(BinPlus, Examples) {
  expect_pmf_near(bin_plus(1, 0.37), {0.63, 0.37}, 1e-15);
  expect_pmf_near(bin_plus(5, 0.0), {1.0}, 0);
  EXPECT_EQ(bin_plus(5, 1.0)(5), 1.0);
  expect_pmf_near(bin_plus(2, 0.5), {0.25, 0.25, 0.5}, 1e-15);
}

TEST(BinPlus, DominatesBinomial) {
  for (std::size_t x : {3, 10, 40, 200}) {
    for (double y : {0.01, 0.1, 0.3, 0.7}) {
      const Pmf b = binomial_pmf(x, y);
      const Pmf p = bin_plus(x, y);
      for (std::size_t t = 0; t <= x; ++t) EXPECT_GE(b.cdf(t) + 1e-12, p.cdf(t)) << x << " " << y << " " << t;
    }
  }
}

TEST(TransitiveDegree, Examples) {
  EXPECT_NEAR(expected_transitive_degree(1, 0.42), 0.42, 1e-15);
  EXPECT_NEAR(expected_transitive_degree(7, 1.0), 7.0, 1e-12);
  EXPECT_NEAR(expected_transitive_degree(2, 0.5), 1.25, 1e-15);
}

TEST(TransitiveDegree, MonotoneAndAboveBinomialMean) {
  for (std::size_t x : {5, 50, 250, 1000, 5000}) {
    double prev = 0.0;
    for (double y = 0.0; y <= 1.0 + 1e-12; y += 0.05) {
      const double r = expected_transitive_degree(x, std::min(y, 1.0));
      EXPECT_GE(r + 1e-9, static_cast<double>(x) * std::min(y, 1.0));
      EXPECT_GE(r + 1e-9, prev);
      EXPECT_LE(r, static_cast<double>(x) + 1e-9);
      prev = r;
    }
  }
}

TEST(TransitiveDegree, LargeLayerApproximationTracksExactValue) {
  // Above the exact limit an approximation is used; compare it with the
  // exact law just above the limit, across the critical window.
  for (double c : {0.5, 0.9, 1.1, 1.5, 3.0}) {
    const std::size_t x = 1200;
    const double y = c / static_cast<double>(x);
    const double exact = bin_plus(x, y).mean();
    const double approx = expected_transitive_degree(x, y);
    EXPECT_NEAR(approx / exact, 1.0, 0.1) << "c=" << c;
  }
}
