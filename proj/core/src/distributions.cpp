#include "layergraph/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace layergraph {

namespace detail {

double log_choose(std::size_t n, std::size_t k) {
  if (k > n) return -INFINITY;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double add_binomial(std::size_t x, double y, double w, std::span<double> out, double cutoff) {
  if (out.size() < x + 1) throw std::invalid_argument("add_binomial: output span too short");
  if (y <= 0.0) {
    out[0] += w;
    return 0.0;
  }
  if (y >= 1.0) {
    out[x] += w;
    return 0.0;
  }
  const auto mode = static_cast<std::size_t>(std::floor((static_cast<double>(x) + 1.0) * y));
  const std::size_t m = std::min(mode, x);
  const double lq = std::log1p(-y);
  const double ly = std::log(y);
  const double odds = y / (1.0 - y);
  const double peak = std::exp(log_choose(x, m) + static_cast<double>(m) * ly +
                               static_cast<double>(x - m) * lq);
  double added = 0.0;
  double b = peak;
  for (std::size_t t = m;; ++t) {
    if (b < cutoff) break;
    out[t] += w * b;
    added += b;
    if (t == x) break;
    b *= static_cast<double>(x - t) / static_cast<double>(t + 1) * odds;
  }
  b = peak;
  for (std::size_t t = m; t > 0;) {
    b *= static_cast<double>(t) / static_cast<double>(x - t + 1) / odds;
    --t;
    if (b < cutoff) break;
    out[t] += w * b;
    added += b;
  }
  return w * std::max(0.0, 1.0 - added);
}

double poisson_survival(double c) {
  if (!(c > 1.0)) return 0.0;
  // h(r) = 1 - r - exp(-c r) is positive on (0, r*) and negative above.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double h = -mid - std::expm1(-c * mid);
    if (h > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

namespace {

void check_probability(double y, const char* what) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability must lie in [0,1], got " +
                                std::to_string(y));
  }
}

// Cuts `w` after the first index where the cumulative mass reaches
// `target`, returning the dropped mass.
double truncate_at(std::vector<double>& w, double target) {
  double cum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (cum >= target) {
      double dropped = 0.0;
      for (std::size_t j = i + 1; j < w.size(); ++j) dropped += w[j];
      w.resize(i + 1);
      return dropped;
    }
  }
  return 0.0;
}

Pmf make_pmf(std::size_t offset, std::vector<double> w, double tail) {
  // Round-off can leave the total a hair above one; never let the tail go negative.
  return Pmf(offset, std::move(w), std::clamp(tail, 0.0, 1.0));
}

}  // namespace

Pmf binomial_pmf(std::size_t x, double y) {
  check_probability(y, "binomial_pmf");
  std::vector<double> w(x + 1, 0.0);
  detail::add_binomial(x, y, 1.0, w, 0.0);
  return Pmf(0, std::move(w), 0.0);
}

Pmf bernoulli_pmf(double y) { return binomial_pmf(1, y); }

Pmf poisson_pmf(double lambda, double tol) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson_pmf: rate must be finite and non-negative");
  }
  if (lambda == 0.0) return Pmf::delta(0);
  std::vector<double> w;
  double cum = 0.0;
  const double ll = std::log(lambda);
  for (std::size_t t = 0;; ++t) {
    const double v = std::exp(-lambda + static_cast<double>(t) * ll -
                              std::lgamma(static_cast<double>(t) + 1.0));
    w.push_back(v);
    cum += v;
    if (cum >= 1.0 - tol && static_cast<double>(t) >= lambda) break;
  }
  return make_pmf(0, std::move(w), 1.0 - cum);
}

Pmf convolve(const Pmf& f, const Pmf& g) {
  const auto& a = f.weights();
  const auto& b = g.weights();
  std::vector<double> w(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) w[i + j] += a[i] * b[j];
  }
  const double tail = 1.0 - (1.0 - f.tail_mass()) * (1.0 - g.tail_mass());
  return make_pmf(f.offset() + g.offset(), std::move(w), tail);
}

Pmf convolve_power(const Pmf& f, std::size_t k, double tol) {
  auto trimmed = [tol](const Pmf& p) {
    std::vector<double> w = p.weights();
    const double dropped = truncate_at(w, p.stored_mass() - tol);
    return make_pmf(p.offset(), std::move(w), p.tail_mass() + dropped);
  };
  Pmf result = Pmf::delta(0);
  Pmf base = f;
  while (k > 0) {
    if (k & 1u) result = trimmed(convolve(result, base));
    k >>= 1u;
    if (k > 0) base = trimmed(convolve(base, base));
  }
  return result;
}

double tv_distance(const Pmf& f, const Pmf& g) {
  if (f == g) return 0.0;
  const std::size_t lo = std::min(f.offset(), g.offset());
  const std::size_t hi = std::max(f.support_end(), g.support_end());
  double s = 0.0;
  for (std::size_t t = lo; t < hi; ++t) s += std::abs(f(t) - g(t));
  return std::min(1.0, 0.5 * s + 0.5 * (f.tail_mass() + g.tail_mass()));
}

Pmf compound_poisson(double lambda, const Pmf& g, double tol, std::size_t max_support) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("compound_poisson: rate must be finite and non-negative");
  }
  const double g0 = g(0);
  if (lambda == 0.0 || g0 >= 1.0) return Pmf::delta(0);
  const double exponent = lambda * (1.0 - g0);
  if (exponent > 700.0) {
    throw std::domain_error("compound_poisson: lambda*(1-g(0)) = " + std::to_string(exponent) +
                            " underflows the recursion start");
  }
  const std::vector<double> gd = g.dense();
  // Mass the stored recursion can reach: no increment may land outside the
  // stored weights. Using their actual sum, rather than 1 - tail_mass, keeps
  // rounding in g from pushing the target out of reach.
  const double stored = std::accumulate(gd.begin(), gd.end(), 0.0);
  const double reachable = std::exp(-lambda * (1.0 - stored));
  const double target = reachable - std::max(tol, 1e-14);

  std::vector<double> kg(gd.size(), 0.0);
  for (std::size_t k = 1; k < gd.size(); ++k) kg[k] = static_cast<double>(k) * gd[k];

  std::vector<double> f;
  f.push_back(std::exp(-exponent));
  double cum = f[0];
  double carry = 0.0;  // Neumaier compensation for cum
  while (cum + carry < target && f.size() < max_support) {
    const std::size_t t = f.size();
    const std::size_t kmax = std::min(t, gd.size() - 1);
    double s = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) s += kg[k] * f[t - k];
    const double v = lambda / static_cast<double>(t) * s;
    f.push_back(v);
    const double next = cum + v;
    carry += std::abs(cum) >= std::abs(v) ? (cum - next) + v : (v - next) + cum;
    cum = next;
  }
  return make_pmf(0, std::move(f), 1.0 - (cum + carry));
}

CompoundPoissonParams cpoi_mixture_merge(std::span<const CompoundPoissonParams> components) {
  if (components.empty()) throw std::invalid_argument("cpoi_mixture_merge: empty component list");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
      throw std::invalid_argument("cpoi_mixture_merge: rates must be finite and non-negative");
    }
    total += c.lambda;
  }
  if (!(total > 0.0)) throw std::invalid_argument("cpoi_mixture_merge: all rates are zero");
  std::vector<double> w;
  std::vector<Pmf> gs;
  for (const auto& c : components) {
    w.push_back(c.lambda / total);
    gs.push_back(c.increments);
  }
  return {total, mixture(w, gs)};
}

double cpoi_perturbation_bound(double lambda1, double lambda2, double tv_fg) {
  return std::min(lambda1, lambda2) * tv_fg + std::abs(lambda1 - lambda2);
}

}  // namespace layergraph
