#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace layergraph {

/// Finitely stored probability mass function on the non-negative integers.
///
/// Weights are stored on the contiguous range [offset, offset + size). Any
/// probability that lives above the stored range (because a producing
/// operation truncated an infinite support) is carried in `tail_mass`, so
/// that stored mass plus tail mass is one up to rounding.
class Pmf {
 public:
  /// Point mass at zero.
  Pmf();
  Pmf(std::size_t offset, std::vector<double> weights, double tail_mass = 0.0);

  static Pmf delta(std::size_t k);
  /// Builds a PMF from non-negative frequencies, normalising them to sum one.
  static Pmf from_counts(std::span<const double> counts);

  std::size_t offset() const { return offset_; }
  const std::vector<double>& weights() const { return weights_; }
  double tail_mass() const { return tail_mass_; }

  /// One past the largest stored support point.
  std::size_t support_end() const { return offset_ + weights_.size(); }

  /// Weight at t; zero outside the stored range.
  double operator()(std::size_t t) const;

  double stored_mass() const;
  double mean() const;
  double variance() const;
  /// P(X <= t) using stored weights only.
  double cdf(std::size_t t) const;
  /// Probability generating function sum_t z^t f(t) over the stored range.
  double pgf(double z) const;

  /// Dense copy with offset zero; convenient for index arithmetic.
  std::vector<double> dense() const;

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::size_t offset_ = 0;
  std::vector<double> weights_;
  double tail_mass_ = 0.0;
};

/// Mixture sum_i w_i f_i with non-negative weights summing to one.
Pmf mixture(std::span<const double> weights, std::span<const Pmf> components);

}  // namespace layergraph
