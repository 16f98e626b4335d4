#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "layergraph/pmf.hpp"

namespace layergraph {

/// Default truncation tolerance for PMFs with unbounded support.
inline constexpr double kDefaultTruncation = 1e-10;

/// Bin(x, y): support exactly {0..x}, no tail.
Pmf binomial_pmf(std::size_t x, double y);
Pmf bernoulli_pmf(double y);

/// Poi(lambda), stored until the cumulative mass reaches 1 - tol.
Pmf poisson_pmf(double lambda, double tol = kDefaultTruncation);

/// Exact convolution. The result's tail is the probability that either
/// factor fell in its tail.
Pmf convolve(const Pmf& f, const Pmf& g);

/// Convolution power f^{*k} by repeated squaring; each product is truncated
/// at cumulative mass 1 - tol with the cut mass moved to the tail.
Pmf convolve_power(const Pmf& f, std::size_t k, double tol = kDefaultTruncation);

/// Total variation distance on stored supports. Tail masses are counted as
/// disagreeing mass, giving an upper estimate; identical stored
/// representations are at distance zero.
double tv_distance(const Pmf& f, const Pmf& g);

/// CPoi(lambda, g) by the Panjer recursion
///   f(0) = exp(-lambda (1 - g(0))),  f(t) = lambda/t sum_{k=1..t} k g(k) f(t-k),
/// stored until cumulative mass reaches the stored-g total minus tol, or
/// until `max_support` points have been produced.
Pmf compound_poisson(double lambda, const Pmf& g, double tol = kDefaultTruncation,
                     std::size_t max_support = std::size_t{1} << 22);

struct CompoundPoissonParams {
  double lambda = 0.0;
  Pmf increments;
};

/// Rate and increment law of a sum of independent compound Poisson variables.
CompoundPoissonParams cpoi_mixture_merge(std::span<const CompoundPoissonParams> components);

/// min(l1, l2) * tv_fg + |l1 - l2|, an upper bound on
/// d_TV(CPoi(l1, f), CPoi(l2, g)) when d_TV(f, g) = tv_fg.
double cpoi_perturbation_bound(double lambda1, double lambda2, double tv_fg);

/// Probability that the Bernoulli graph on k nodes with link probability y
/// is connected.
double connectivity_prob(std::size_t k, double y);
/// Natural logarithm of connectivity_prob; finite well below double range.
double log_connectivity_prob(std::size_t k, double y);

/// Bin+(x, y): law of the number of other nodes in the component of a fixed
/// node of a Bernoulli graph on x + 1 nodes with link probability y.
Pmf bin_plus(std::size_t x, double y);

/// Layers above this size use the large-layer approximation in
/// expected_transitive_degree.
inline constexpr std::size_t kExactTransitiveDegreeLimit = 256;

/// Mean of Bin+(x, y). Exact for x <= `exact_limit`; above it the value
/// comes from the sparse-graph limit with c = x y (small clusters of mean
/// size 1/(1 - c(1 - r)) and a giant fraction r solving 1 - r = exp(-c r)),
/// corrected by a finite-size factor tabulated from the exact law as a
/// function of (c - 1)(x+1)^{1/3}.
double expected_transitive_degree(std::size_t x, double y,
                                  std::size_t exact_limit = kExactTransitiveDegreeLimit);

namespace detail {

/// log C(n, k).
double log_choose(std::size_t n, std::size_t k);

/// Adds w * Bin(x, y)(t) into out[t] for all t whose binomial weight is at
/// least `cutoff`, walking outwards from the mode. `out` must have at least
/// x + 1 entries. Returns the mass (times w) that was not added.
double add_binomial(std::size_t x, double y, double w, std::span<double> out, double cutoff);

/// Survival probability of a Galton-Watson process with Poi(c) offspring.
double poisson_survival(double c);

}  // namespace detail

}  // namespace layergraph
