#include "layergraph/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "layergraph/errors.hpp"

namespace layergraph {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double finite_moment(const LayerTypeDistribution& P, int r, int s) {
  const auto m = cross_moment(P, r, s);
  return m.infinite ? std::numeric_limits<double>::infinity() : m.value;
}

bool all_strengths_zero(const LayerTypeDistribution& P) {
  for (const auto& a : P.atoms()) {
    if (a.type.size >= 2 && a.type.strength > 0.0) return false;
  }
  return true;
}

// First `len` entries of a * b, taking both as dense from zero.
std::vector<double> conv_prefix(const std::vector<double>& a, const std::vector<double>& b,
                                std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < std::min(a.size(), len); ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

Pmf limiting_degree_distribution(const ModelLimit& M, double tol) {
  const double p10 = finite_moment(M.P, 1, 0);
  if (!(p10 > 0.0) || !std::isfinite(p10)) {
    throw UndefinedQuantity("limiting degree distribution: (P)_10 must be finite and positive");
  }
  if (all_strengths_zero(M.P)) return Pmf::delta(0);
  return compound_poisson(M.mu * p10, mixed_binomial(M.P, 1, 0), tol);
}

Pmf limiting_transitive_offspring(const ModelLimit& M, double tol) {
  const double p10 = finite_moment(M.P, 1, 0);
  if (!(p10 > 0.0) || !std::isfinite(p10)) {
    throw UndefinedQuantity("transitive offspring law: (P)_10 must be finite and positive");
  }
  if (all_strengths_zero(M.P)) return Pmf::delta(0);
  return compound_poisson(M.mu * p10, mixed_bin_plus(M.P, 1, 0), tol);
}

double clustering_coefficient(const ModelLimit& M, ClusteringRegime regime) {
  const double p21 = finite_moment(M.P, 2, 1);
  const double p32 = finite_moment(M.P, 3, 2);
  const double p33 = finite_moment(M.P, 3, 3);
  if (!(p21 > 0.0)) throw UndefinedQuantity("clustering coefficient: (P)_21 is zero");
  if (!std::isfinite(p21) || !std::isfinite(p32) || !std::isfinite(p33)) {
    throw UndefinedQuantity("clustering coefficient: (P)_21, (P)_32 and (P)_33 must be finite");
  }
  switch (regime) {
    case ClusteringRegime::sublinear:
      if (!(p32 > 0.0)) throw UndefinedQuantity("clustering coefficient: (P)_32 is zero");
      return p33 / p32;
    case ClusteringRegime::linear:
      return p33 / (p32 + M.mu * p21 * p21);
    case ClusteringRegime::superlinear:
      return 0.0;
  }
  return 0.0;
}

ClusteringSpectrum::ClusteringSpectrum(const ModelLimit& M, std::size_t t_max, double tol)
    : t_max_(t_max) {
  if (t_max < 2) throw std::invalid_argument("clustering spectrum: t_max must be at least 2");
  const double p21 = finite_moment(M.P, 2, 1);
  const double p32 = finite_moment(M.P, 3, 2);
  const double p33 = finite_moment(M.P, 3, 3);
  for (double v : {p21, p32, p33}) {
    if (!std::isfinite(v)) throw UndefinedQuantity("clustering spectrum: a required moment is infinite");
  }
  const Pmf f = limiting_degree_distribution(M, tol);
  f_end_ = f.support_end();
  f_tail_ = f.tail_mass();
  const std::vector<double> fd = f.dense();
  const std::size_t len = t_max - 1;  // indices 0..t_max-2

  num_.assign(len, 0.0);
  den_.assign(len, 0.0);
  if (p33 > 0.0) {
    const auto c = conv_prefix(fd, mixed_binomial(M.P, 3, 3).dense(), len);
    for (std::size_t i = 0; i < len; ++i) num_[i] = p33 * c[i];
  }
  if (p32 > 0.0) {
    const auto c = conv_prefix(fd, mixed_binomial(M.P, 3, 2).dense(), len);
    for (std::size_t i = 0; i < len; ++i) den_[i] += p32 * c[i];
  }
  if (p21 > 0.0) {
    const auto g21 = mixed_binomial(M.P, 2, 1).dense();
    const auto c = conv_prefix(conv_prefix(fd, g21, len), g21, len);
    for (std::size_t i = 0; i < len; ++i) den_[i] += M.mu * p21 * p21 * c[i];
  }
}

bool ClusteringSpectrum::answerable(std::size_t t) const {
  if (t < 2 || t > t_max_) return false;
  const double den = den_[t - 2];
  if (!(den > 0.0)) return false;
  // The mixed binomials are stored exactly; only f was truncated. Values at
  // index t - 2 are exact as long as f was stored that far.
  const double uncertainty = (t - 2 < f_end_) ? 0.0 : f_tail_;
  return uncertainty < 0.01 * den;
}

double ClusteringSpectrum::numerator(std::size_t t) const {
  if (t < 2 || t > t_max_) throw UndefinedQuantity("clustering spectrum: degree out of range");
  return num_[t - 2];
}

double ClusteringSpectrum::denominator(std::size_t t) const {
  if (t < 2 || t > t_max_) throw UndefinedQuantity("clustering spectrum: degree out of range");
  return den_[t - 2];
}

double ClusteringSpectrum::operator()(std::size_t t) const {
  if (t < 2 || t > t_max_) {
    throw UndefinedQuantity("clustering spectrum: degree " + std::to_string(t) + " out of range");
  }
  if (!answerable(t)) {
    throw UndefinedQuantity("clustering spectrum: degree " + std::to_string(t) +
                            " is not answerable at this truncation");
  }
  return std::clamp(num_[t - 2] / den_[t - 2], 0.0, 1.0);
}

double clustering_spectrum(const ModelLimit& M, std::size_t t, double tol) {
  return ClusteringSpectrum(M, std::max<std::size_t>(t, 2), tol)(t);
}

double gw_survival(const Pmf& f, double tol, std::size_t max_iter) {
  if (f(1) >= 1.0) return 1.0;
  if (f.mean() <= 1.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < max_iter; ++i) {
    const double next = f.pgf(s);
    if (std::abs(next - s) < tol) return std::clamp(1.0 - next, 0.0, 1.0);
    s = next;
  }
  throw NonConvergence("gw_survival: no convergence within " + std::to_string(max_iter) +
                       " iterations");
}

double giant_fraction(const ModelLimit& M, double tol) {
  return gw_survival(limiting_transitive_offspring(M, tol));
}

ModelLimit percolated_limits(const ModelLimit& M, PercolationMode mode) {
  if (!(mode.theta > 0.0 && mode.theta <= 1.0)) {
    throw std::invalid_argument("percolated_limits: theta must lie in (0,1]");
  }
  if (mode.kind == PercolationMode::Kind::site) {
    return {M.mu / mode.theta, site_thinned(M.P, mode.theta)};
  }
  return {M.mu, bond_scaled(M.P, mode.theta)};
}

double r_naught(const ModelLimit& M, double theta, std::size_t size_cap) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("r_naught: theta must lie in [0,1]");
  if (theta == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& a : M.P.atoms()) {
    const std::size_t x = a.type.size;
    if (x < 2 || x > size_cap) continue;
    sum += expected_transitive_degree(x - 1, theta * a.type.strength) * static_cast<double>(x) * a.prob;
  }
  return M.mu * sum;
}

double theta_one(const ModelLimit& M, std::size_t size_cap, double tol) {
  if (r_naught(M, 1.0, size_cap) < 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  if (r_naught(M, std::numeric_limits<double>::min(), size_cap) >= 1.0) return 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (r_naught(M, mid, size_cap) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::convergent:
      return "convergent";
    case GrowthClass::divergent:
      return "divergent";
    case GrowthClass::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::optional<double> predicted_theta_two(const PowerLawParams& pl) {
  if (pl.alpha > 3.0 || pl.beta > 1.0) return 1.0;
  if (pl.beta == 1.0) {
    if (pl.b > 1.0) return 1.0 / pl.b;
    return 1.0;
  }
  if (pl.beta >= 0.0 && pl.beta < 1.0) return 0.0;
  return std::nullopt;
}

ThetaTwoReport theta_two_diagnostic(const ModelLimit& M, double theta,
                                    const std::vector<std::size_t>& cap_schedule) {
  if (cap_schedule.size() < 2) {
    throw std::invalid_argument("theta_two_diagnostic: need at least two caps");
  }
  for (std::size_t i = 1; i < cap_schedule.size(); ++i) {
    if (cap_schedule[i] <= cap_schedule[i - 1]) {
      throw std::invalid_argument("theta_two_diagnostic: caps must be increasing");
    }
  }
  ThetaTwoReport rep;
  rep.theta = theta;
  rep.caps = cap_schedule;
  for (std::size_t cap : cap_schedule) rep.r0.push_back(r_naught(M, theta, cap));
  if (M.P.power_law()) rep.predicted_theta_two = predicted_theta_two(*M.P.power_law());

  const std::size_t k = rep.r0.size();
  const double r_prev = rep.r0[k - 2];
  const double r_last = rep.r0[k - 1];
  if (!(r_prev > 0.0)) {
    rep.loglog_slope = 0.0;
    rep.last_relative_increment = 0.0;
    rep.classification = r_last > 0.0 ? GrowthClass::inconclusive : GrowthClass::convergent;
    return rep;
  }
  rep.loglog_slope = std::log(r_last / r_prev) /
                     std::log(static_cast<double>(cap_schedule[k - 1]) /
                              static_cast<double>(cap_schedule[k - 2]));
  rep.last_relative_increment = (r_last - r_prev) / r_last;
  bool shrinking = true;
  for (std::size_t i = 2; i < k; ++i) {
    if (rep.r0[i] - rep.r0[i - 1] > rep.r0[i - 1] - rep.r0[i - 2]) shrinking = false;
  }
  if (rep.loglog_slope >= kDivergenceSlope) {
    rep.classification = GrowthClass::divergent;
  } else if (shrinking && rep.last_relative_increment < 0.05) {
    rep.classification = GrowthClass::convergent;
  } else {
    rep.classification = GrowthClass::inconclusive;
  }
  return rep;
}

PowerLawPrediction power_law_predictions(const PowerLawParams& pl, double mu,
                                         const LayerTypeDistribution* P) {
  if (!(pl.alpha > 2.0)) {
    throw std::invalid_argument("power_law_predictions: alpha must exceed 2");
  }
  PowerLawPrediction out;
  const double a = pl.a;
  const double b = pl.b;
  const double beta = pl.beta;
  if (beta >= 1.0) {
    out.heavy_tailed = false;
    out.delta = kNaN;
    out.d = kNaN;
    out.spectrum_exponent = kNaN;
    out.spectrum_constant = kNaN;
    out.c1 = out.c2 = out.c3 = kNaN;
    double m = 0.0;
    for (std::size_t x = std::max<std::size_t>(pl.x_min, 1); x <= pl.x_max; ++x) {
      const double xd = static_cast<double>(x);
      m = std::max(m, (xd - 1.0) * std::min(1.0, b * std::pow(xd, -beta)));
    }
    out.light_tail_bound = m;
    return out;
  }
  out.delta = 1.0 + (pl.alpha - 2.0) / (1.0 - beta);
  out.d = mu / (1.0 - beta) * a * std::pow(b, out.delta - 1.0);
  for (auto [r, s] : {std::pair{1, 0}, std::pair{2, 1}, std::pair{3, 2}, std::pair{3, 3}}) {
    const double drs = 1.0 + (pl.alpha + s * beta - r - 1.0) / (1.0 - beta);
    out.delta_rs[{r, s}] = drs;
    if (P != nullptr) {
      const auto m = cross_moment(*P, r, s);
      out.d_rs[{r, s}] = (m.infinite || !(m.value > 0.0))
                             ? kNaN
                             : a * std::pow(b, s) / m.value * std::pow(b, drs - 1.0) / (1.0 - beta);
    }
  }
  out.c1 = std::pow(b, 1.0 / (1.0 - beta));
  out.c3 = P != nullptr ? mu * cross_moment(*P, 3, 3).value : kNaN;
  out.c2 = out.c1 + out.c3;
  if (beta == 0.0) {
    out.spectrum_exponent = 0.0;
    out.spectrum_constant = std::min(1.0, b);
  } else if (beta < 2.0 / 3.0) {
    out.spectrum_exponent = beta / (1.0 - beta);
    out.spectrum_constant = out.c1;
  } else if (beta == 2.0 / 3.0) {
    out.spectrum_exponent = 2.0;
    out.spectrum_constant = out.c2;
  } else {
    out.spectrum_exponent = 2.0;
    out.spectrum_constant = out.c3;
  }
  return out;
}

}  // namespace layergraph
