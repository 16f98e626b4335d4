#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "layergraph/distributions.hpp"
#include "layergraph/pmf.hpp"

namespace layergraph {

struct LayerType {
  std::size_t size = 0;   // x
  double strength = 0.0;  // y

  friend bool operator==(const LayerType&, const LayerType&) = default;
};

struct LayerAtom {
  LayerType type;
  double prob = 0.0;
};

/// Parameters of the power-law family p(x) ~ a x^-alpha, q(x) = min(1, b x^-beta)
/// realised on [x_min, x_max]. `a` is the finite-range normaliser.
struct PowerLawParams {
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::size_t x_min = 1;
  std::size_t x_max = 1;
};

/// Finitely supported distribution of layer types. Atoms are kept sorted by
/// (size, strength), duplicates merged and zero-probability atoms dropped.
class LayerTypeDistribution {
 public:
  LayerTypeDistribution() = default;
  /// Probabilities must be non-negative and sum to one within 1e-9; they are
  /// renormalised exactly afterwards.
  explicit LayerTypeDistribution(std::vector<LayerAtom> atoms,
                                 std::optional<PowerLawParams> power_law = std::nullopt);

  static LayerTypeDistribution point(std::size_t x, double y);

  const std::vector<LayerAtom>& atoms() const { return atoms_; }
  const std::optional<PowerLawParams>& power_law() const { return power_law_; }
  std::size_t max_size() const;

 private:
  std::vector<LayerAtom> atoms_;
  std::optional<PowerLawParams> power_law_;
};

struct CrossMoment {
  int r = 0;
  int s = 0;
  double value = 0.0;
  /// Set when the analytic family has a divergent moment; `value` then holds
  /// the finite-range sum.
  bool infinite = false;
};

/// Falling factorial (x)_r.
double falling_factorial(std::size_t x, int r);

/// (P)_rs = E[(X)_r Y^s].
CrossMoment cross_moment(const LayerTypeDistribution& P, int r, int s);

/// Bin_rs(P). Throws UndefinedQuantity when (P)_rs is zero or flagged infinite.
/// Binomial weights below `cutoff` are dropped into the tail. The default only
/// skips values that would underflow anyway, but keeps the work per atom near
/// O(sqrt(x)) instead of O(x).
Pmf mixed_binomial(const LayerTypeDistribution& P, int r, int s,
                   double cutoff = std::numeric_limits<double>::min());

/// Bin+_rs(P). Layers with x - r above `exact_limit` use a large-layer law
/// (a Borel small-cluster part plus a point mass at the giant cluster); the
/// exact recursion costs O(x^2) per distinct strength.
Pmf mixed_bin_plus(const LayerTypeDistribution& P, int r, int s,
                   std::size_t exact_limit = kExactTransitiveDegreeLimit);

/// Large-layer approximation of Bin+(x, y) used by mixed_bin_plus.
Pmf bin_plus_large(std::size_t x, double y);

/// Atoms x in [x_min, x_max] with p(x) proportional to x^-alpha and strength
/// min(1, b x^-beta). Throws for alpha <= 2.
LayerTypeDistribution power_law_distribution(double alpha, double beta, double b,
                                             std::size_t x_min, std::size_t x_max);

/// Maps sizes above M to zero.
LayerTypeDistribution truncate_sizes(const LayerTypeDistribution& P, std::size_t M);

/// Binomial thinning of sizes: (x, y) -> (Bin(x, theta), y). Thinned atoms
/// with probability below `cutoff` are folded into the size-zero atom.
LayerTypeDistribution site_thinned(const LayerTypeDistribution& P, double theta,
                                   double cutoff = 1e-15);

/// Strength scaling (x, y) -> (x, theta y).
LayerTypeDistribution bond_scaled(const LayerTypeDistribution& P, double theta);

/// {"atoms": [{"x","y","p"}...], "power_law": {...}}. Reading accepts the
/// descriptor alone, in which case the atoms are generated from it.
nlohmann::json to_json(const LayerTypeDistribution& P);
LayerTypeDistribution layer_distribution_from_json(const nlohmann::json& j);

}  // namespace layergraph
