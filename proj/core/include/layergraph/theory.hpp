#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "layergraph/distributions.hpp"
#include "layergraph/layer_model.hpp"
#include "layergraph/pmf.hpp"

namespace layergraph {

/// Layers per node mu together with the limiting layer type distribution.
struct ModelLimit {
  double mu = 1.0;
  LayerTypeDistribution P;
};

enum class ClusteringRegime { sublinear, linear, superlinear };

/// CPoi(mu (P)_10, Bin_10(P)).
Pmf limiting_degree_distribution(const ModelLimit& M, double tol = kDefaultTruncation);

/// Offspring law of the transitive-closure branching process,
/// CPoi(mu (P)_10, Bin+_10(P)).
Pmf limiting_transitive_offspring(const ModelLimit& M, double tol = kDefaultTruncation);

/// Limit of the model clustering coefficient in the chosen m/n regime.
double clustering_coefficient(const ModelLimit& M, ClusteringRegime regime);

/// Limiting clustering spectrum sigma(t) for 2 <= t <= t_max. All convolutions
/// are precomputed once. A degree t is answerable when the truncation of f can
/// change the denominator by less than 1% of its value.
class ClusteringSpectrum {
 public:
  ClusteringSpectrum(const ModelLimit& M, std::size_t t_max, double tol = kDefaultTruncation);

  std::size_t t_max() const { return t_max_; }
  bool answerable(std::size_t t) const;
  /// Throws UndefinedQuantity when t is out of range, unanswerable or has a
  /// zero denominator.
  double operator()(std::size_t t) const;
  double numerator(std::size_t t) const;
  double denominator(std::size_t t) const;
  /// Largest degree for which the limiting degree law was stored.
  std::size_t degree_support_end() const { return f_end_; }

 private:
  std::size_t t_max_;
  std::size_t f_end_ = 0;
  double f_tail_ = 0.0;
  std::vector<double> num_;   // (P)_33 (f * g33)(t - 2)
  std::vector<double> den_;   // (P)_32 (f * g32)(t - 2) + mu (P)_21^2 (f * g21 * g21)(t - 2)
};

double clustering_spectrum(const ModelLimit& M, std::size_t t, double tol = kDefaultTruncation);

/// Survival probability 1 - s* of a Galton-Watson process, s* the smallest
/// fixed point of the offspring generating function. Throws NonConvergence.
double gw_survival(const Pmf& f, double tol = 1e-12, std::size_t max_iter = 1'000'000);

/// Limiting giant component fraction rho(f+).
double giant_fraction(const ModelLimit& M, double tol = kDefaultTruncation);

struct PercolationMode {
  enum class Kind { site, bond };
  Kind kind = Kind::bond;
  double theta = 1.0;
};

/// Site: (mu / theta, binomially thinned P). Bond: (mu, strengths scaled by theta).
ModelLimit percolated_limits(const ModelLimit& M, PercolationMode mode);

/// R0(theta) = mu sum_{x <= cap} R(x - 1, theta y) x P(x, y).
double r_naught(const ModelLimit& M, double theta,
                std::size_t size_cap = static_cast<std::size_t>(-1));

/// sup{theta : R0(theta) < 1} by bisection.
double theta_one(const ModelLimit& M, std::size_t size_cap = static_cast<std::size_t>(-1),
                 double tol = 1e-9);

enum class GrowthClass { convergent, divergent, inconclusive };
std::string to_string(GrowthClass c);

struct ThetaTwoReport {
  double theta = 0.0;
  std::vector<std::size_t> caps;
  std::vector<double> r0;
  double loglog_slope = 0.0;
  double last_relative_increment = 0.0;
  GrowthClass classification = GrowthClass::inconclusive;
  /// Analytic threshold for the power-law family when one is known.
  std::optional<double> predicted_theta_two;
};

inline constexpr double kDivergenceSlope = 0.2;

/// Evaluates R0 along an increasing cap schedule and classifies its growth:
/// divergent if the final log-log slope is at least 0.2; convergent if the
/// slope is below 0.2, increments shrink, and the last relative increment is
/// below 5%; otherwise inconclusive.
ThetaTwoReport theta_two_diagnostic(const ModelLimit& M, double theta,
                                    const std::vector<std::size_t>& cap_schedule);

/// Analytic theta_2 for the power-law family, if determined by (alpha, beta, b).
std::optional<double> predicted_theta_two(const PowerLawParams& pl);

struct PowerLawPrediction {
  bool heavy_tailed = true;
  double delta = 0.0;  // degree exponent
  double d = 0.0;      // degree constant
  double spectrum_exponent = 0.0;
  double spectrum_constant = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  /// Keyed by (r, s) for rs in {10, 21, 32, 33}.
  std::map<std::pair<int, int>, double> delta_rs;
  std::map<std::pair<int, int>, double> d_rs;
  /// For beta >= 1: sup (x - 1) q(x), bounding the generating function.
  std::optional<double> light_tail_bound;
};

/// Exponents and constants for the power-law family. Moments (P)_rs are taken
/// from `P` when supplied (needed for c3 and d_rs); the finite-range
/// normaliser in `pl.a` plays the role of the constant a.
PowerLawPrediction power_law_predictions(const PowerLawParams& pl, double mu,
                                         const LayerTypeDistribution* P = nullptr);

}  // namespace layergraph
