#include "layergraph/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace layergraph {

namespace {

constexpr double kMassSlack = 1e-9;

}  // namespace

Pmf::Pmf() : offset_(0), weights_{1.0}, tail_mass_(0.0) {}

Pmf::Pmf(std::size_t offset, std::vector<double> weights, double tail_mass)
    : offset_(offset), weights_(std::move(weights)), tail_mass_(tail_mass) {
  if (!(tail_mass_ >= 0.0 && tail_mass_ <= 1.0)) {
    throw std::invalid_argument("Pmf: tail mass must lie in [0,1], got " +
                                std::to_string(tail_mass_));
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("Pmf: weights must be finite and non-negative");
    }
    total += w;
  }
  if (std::abs(total + tail_mass_ - 1.0) > kMassSlack) {
    throw std::invalid_argument("Pmf: stored mass plus tail mass is " +
                                std::to_string(total + tail_mass_) + ", expected 1");
  }
}

Pmf Pmf::delta(std::size_t k) { return Pmf(k, {1.0}, 0.0); }

Pmf Pmf::from_counts(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::invalid_argument("Pmf::from_counts: counts must have positive total");
  }
  std::vector<double> w(counts.begin(), counts.end());
  for (double& v : w) v /= total;
  return Pmf(0, std::move(w), 0.0);
}

double Pmf::operator()(std::size_t t) const {
  if (t < offset_ || t >= support_end()) return 0.0;
  return weights_[t - offset_];
}

double Pmf::stored_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    m += static_cast<double>(offset_ + i) * weights_[i];
  }
  return m;
}

double Pmf::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double d = static_cast<double>(offset_ + i) - mu;
    v += d * d * weights_[i];
  }
  return v;
}

double Pmf::cdf(std::size_t t) const {
  if (t < offset_) return 0.0;
  const std::size_t last = std::min(t + 1, support_end()) - offset_;
  return std::accumulate(weights_.begin(), weights_.begin() + static_cast<std::ptrdiff_t>(last), 0.0);
}

double Pmf::pgf(double z) const {
  // Horner from the top of the stored range.
  double acc = 0.0;
  for (std::size_t i = weights_.size(); i-- > 0;) acc = acc * z + weights_[i];
  return acc * std::pow(z, static_cast<double>(offset_));
}

std::vector<double> Pmf::dense() const {
  std::vector<double> out(support_end(), 0.0);
  std::copy(weights_.begin(), weights_.end(), out.begin() + static_cast<std::ptrdiff_t>(offset_));
  return out;
}

Pmf mixture(std::span<const double> weights, std::span<const Pmf> components) {
  if (weights.size() != components.size() || weights.empty()) {
    throw std::invalid_argument("mixture: need one weight per component");
  }
  std::size_t lo = components[0].offset();
  std::size_t hi = 0;
  for (const auto& c : components) {
    lo = std::min(lo, c.offset());
    hi = std::max(hi, c.support_end());
  }
  std::vector<double> w(hi - lo, 0.0);
  double tail = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const auto& cw = c.weights();
    for (std::size_t j = 0; j < cw.size(); ++j) w[c.offset() - lo + j] += weights[i] * cw[j];
    tail += weights[i] * c.tail_mass();
  }
  return Pmf(lo, std::move(w), std::min(1.0, tail));
}

}  // namespace layergraph
