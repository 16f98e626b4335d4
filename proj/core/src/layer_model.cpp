#include "layergraph/layer_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "layergraph/errors.hpp"

namespace layergraph {

namespace {

constexpr double kProbSlack = 1e-9;

void check_theta(double theta, const char* what) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": theta must lie in [0,1], got " +
                                std::to_string(theta));
  }
}

bool analytic_moment_diverges(const PowerLawParams& pl, int r, int s) {
  // The strength saturates at one only for finitely many sizes, so the tail
  // behaves like x^{r - alpha - s beta}.
  return pl.alpha + s * pl.beta <= r + 1;
}

}  // namespace

LayerTypeDistribution::LayerTypeDistribution(std::vector<LayerAtom> atoms,
                                             std::optional<PowerLawParams> power_law)
    : power_law_(power_law) {
  double total = 0.0;
  std::map<std::pair<std::size_t, double>, double> merged;
  for (const auto& a : atoms) {
    if (!(a.prob >= 0.0) || !std::isfinite(a.prob)) {
      throw std::invalid_argument("LayerTypeDistribution: atom probabilities must be non-negative");
    }
    if (!(a.type.strength >= 0.0 && a.type.strength <= 1.0)) {
      throw std::invalid_argument("LayerTypeDistribution: strength must lie in [0,1], got " +
                                  std::to_string(a.type.strength));
    }
    total += a.prob;
    if (a.prob > 0.0) merged[{a.type.size, a.type.strength}] += a.prob;
  }
  if (std::abs(total - 1.0) > kProbSlack) {
    throw std::invalid_argument("LayerTypeDistribution: probabilities sum to " +
                                std::to_string(total) + ", expected 1");
  }
  atoms_.reserve(merged.size());
  for (const auto& [key, p] : merged) atoms_.push_back({{key.first, key.second}, p / total});
}

LayerTypeDistribution LayerTypeDistribution::point(std::size_t x, double y) {
  return LayerTypeDistribution({{{x, y}, 1.0}});
}

std::size_t LayerTypeDistribution::max_size() const {
  std::size_t m = 0;
  for (const auto& a : atoms_) m = std::max(m, a.type.size);
  return m;
}

double falling_factorial(std::size_t x, int r) {
  double v = 1.0;
  for (int i = 0; i < r; ++i) {
    if (x < static_cast<std::size_t>(i) + 1) return 0.0;
    v *= static_cast<double>(x - static_cast<std::size_t>(i));
  }
  return v;
}

CrossMoment cross_moment(const LayerTypeDistribution& P, int r, int s) {
  if (r < 0 || s < 0) throw std::invalid_argument("cross_moment: r and s must be non-negative");
  CrossMoment m{r, s, 0.0, false};
  for (const auto& a : P.atoms()) {
    m.value += falling_factorial(a.type.size, r) * std::pow(a.type.strength, s) * a.prob;
  }
  if (P.power_law()) m.infinite = analytic_moment_diverges(*P.power_law(), r, s);
  return m;
}

namespace {

double usable_moment(const LayerTypeDistribution& P, int r, int s, const char* what) {
  const auto m = cross_moment(P, r, s);
  if (m.infinite) {
    throw UndefinedQuantity(std::string(what) + ": (P)_" + std::to_string(r) + std::to_string(s) +
                            " is infinite for this family");
  }
  if (!(m.value > 0.0)) {
    throw UndefinedQuantity(std::string(what) + ": (P)_" + std::to_string(r) + std::to_string(s) +
                            " is zero");
  }
  return m.value;
}

Pmf trimmed(std::vector<double> w, double tail) {
  std::size_t lo = 0;
  while (lo + 1 < w.size() && w[lo] == 0.0) ++lo;
  std::size_t hi = w.size();
  while (hi > lo + 1 && w[hi - 1] == 0.0) --hi;
  std::vector<double> kept(w.begin() + static_cast<std::ptrdiff_t>(lo),
                           w.begin() + static_cast<std::ptrdiff_t>(hi));
  double total = 0.0;
  for (double v : kept) total += v;
  tail = std::clamp(tail, 0.0, 1.0);
  // Accumulated rounding from many atoms; rescale the stored part so the
  // invariant holds exactly.
  if (total > 0.0) {
    for (double& v : kept) v *= (1.0 - tail) / total;
  }
  return Pmf(lo, std::move(kept), tail);
}

}  // namespace

Pmf mixed_binomial(const LayerTypeDistribution& P, int r, int s, double cutoff) {
  const double norm = usable_moment(P, r, s, "mixed_binomial");
  const std::size_t hi = P.max_size();
  std::vector<double> w(hi + 1, 0.0);
  double dropped = 0.0;
  for (const auto& a : P.atoms()) {
    const double weight = falling_factorial(a.type.size, r) * std::pow(a.type.strength, s) * a.prob / norm;
    if (weight == 0.0) continue;
    dropped += detail::add_binomial(a.type.size - static_cast<std::size_t>(r), a.type.strength,
                                    weight, w, cutoff);
  }
  return trimmed(std::move(w), dropped);
}

namespace {

// Adds weight * bin_plus_large(x, y) into w, which must cover 0..x.
void add_bin_plus_large(std::size_t x, double y, double weight, std::vector<double>& w) {
  if (x == 0 || y == 0.0) {
    w[0] += weight;
    return;
  }
  if (y == 1.0) {
    w[x] += weight;
    return;
  }
  const std::size_t n = x + 1;
  const double c = static_cast<double>(x) * y;
  const double rho = detail::poisson_survival(c);
  const double dual = c * (1.0 - rho);
  // Borel(dual) cluster sizes k >= 1 restricted to k <= n.
  std::vector<double> borel;
  double borel_total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double lv = -dual * kk + (kk - 1.0) * std::log(dual * kk) - std::lgamma(kk + 1.0);
    const double v = k == 1 ? std::exp(-dual) : std::exp(lv);
    borel.push_back(v);
    borel_total += v;
    if (kk > 2.0 / (1.0 - dual) + 50.0 && v < 1e-18 * borel_total) break;
  }
  const double scale = weight * (1.0 - rho) / borel_total;
  for (std::size_t k = 0; k < borel.size(); ++k) w[k] += scale * borel[k];
  if (rho > 0.0) {
    const double giant = std::clamp(std::round(rho * static_cast<double>(n)), 1.0, static_cast<double>(n));
    w[static_cast<std::size_t>(giant) - 1] += weight * rho;
  }
}

}  // namespace

Pmf bin_plus_large(std::size_t x, double y) {
  std::vector<double> w(x + 1, 0.0);
  add_bin_plus_large(x, y, 1.0, w);
  return trimmed(std::move(w), 0.0);
}

Pmf mixed_bin_plus(const LayerTypeDistribution& P, int r, int s, std::size_t exact_limit) {
  const double norm = usable_moment(P, r, s, "mixed_bin_plus");
  const std::size_t hi = P.max_size();
  std::vector<double> w(hi + 1, 0.0);
  for (const auto& a : P.atoms()) {
    const double weight = falling_factorial(a.type.size, r) * std::pow(a.type.strength, s) * a.prob / norm;
    if (weight == 0.0) continue;
    const std::size_t x = a.type.size - static_cast<std::size_t>(r);
    if (x > exact_limit) {
      add_bin_plus_large(x, a.type.strength, weight, w);
      continue;
    }
    const Pmf b = bin_plus(x, a.type.strength);
    const auto& bw = b.weights();
    for (std::size_t i = 0; i < bw.size(); ++i) w[b.offset() + i] += weight * bw[i];
  }
  return trimmed(std::move(w), 0.0);
}

LayerTypeDistribution power_law_distribution(double alpha, double beta, double b,
                                             std::size_t x_min, std::size_t x_max) {
  if (!(alpha > 2.0)) {
    throw std::invalid_argument("power_law_distribution: alpha must exceed 2 (finite mean size), got " +
                                std::to_string(alpha));
  }
  if (!(beta >= 0.0)) throw std::invalid_argument("power_law_distribution: beta must be non-negative");
  if (!(b > 0.0)) throw std::invalid_argument("power_law_distribution: b must be positive");
  if (x_min < 1 || x_max < x_min) {
    throw std::invalid_argument("power_law_distribution: need 1 <= x_min <= x_max");
  }
  std::vector<LayerAtom> atoms;
  atoms.reserve(x_max - x_min + 1);
  double z = 0.0;
  for (std::size_t x = x_min; x <= x_max; ++x) {
    const double xd = static_cast<double>(x);
    const double p = std::pow(xd, -alpha);
    z += p;
    atoms.push_back({{x, std::min(1.0, b * std::pow(xd, -beta))}, p});
  }
  for (auto& a : atoms) a.prob /= z;
  return LayerTypeDistribution(std::move(atoms), PowerLawParams{alpha, beta, 1.0 / z, b, x_min, x_max});
}

LayerTypeDistribution truncate_sizes(const LayerTypeDistribution& P, std::size_t M) {
  std::vector<LayerAtom> atoms = P.atoms();
  bool changed = false;
  for (auto& a : atoms) {
    if (a.type.size > M) {
      a.type.size = 0;
      changed = true;
    }
  }
  if (!changed) return P;
  return LayerTypeDistribution(std::move(atoms));
}

LayerTypeDistribution site_thinned(const LayerTypeDistribution& P, double theta, double cutoff) {
  check_theta(theta, "site_thinned");
  if (theta == 1.0) return P;
  std::map<std::pair<std::size_t, double>, double> merged;
  double folded = 0.0;
  std::vector<double> scratch;
  for (const auto& a : P.atoms()) {
    const std::size_t x = a.type.size;
    scratch.assign(x + 1, 0.0);
    folded += detail::add_binomial(x, theta, a.prob, scratch, cutoff / std::max(a.prob, 1e-300));
    for (std::size_t t = 0; t <= x; ++t) {
      if (scratch[t] > 0.0) merged[{t, a.type.strength}] += scratch[t];
    }
  }
  std::vector<LayerAtom> atoms;
  atoms.reserve(merged.size() + 1);
  for (const auto& [key, p] : merged) atoms.push_back({{key.first, key.second}, p});
  if (folded > 0.0) atoms.push_back({{0, 0.0}, folded});
  double total = 0.0;
  for (const auto& a : atoms) total += a.prob;
  for (auto& a : atoms) a.prob /= total;
  return LayerTypeDistribution(std::move(atoms));
}

LayerTypeDistribution bond_scaled(const LayerTypeDistribution& P, double theta) {
  check_theta(theta, "bond_scaled");
  if (theta == 1.0) return P;
  std::vector<LayerAtom> atoms = P.atoms();
  for (auto& a : atoms) a.type.strength *= theta;
  return LayerTypeDistribution(std::move(atoms));
}

nlohmann::json to_json(const LayerTypeDistribution& P) {
  nlohmann::json j;
  auto& arr = j["atoms"] = nlohmann::json::array();
  for (const auto& a : P.atoms()) {
    arr.push_back({{"x", a.type.size}, {"y", a.type.strength}, {"p", a.prob}});
  }
  if (const auto& pl = P.power_law()) {
    j["power_law"] = {{"alpha", pl->alpha}, {"beta", pl->beta}, {"a", pl->a},
                      {"b", pl->b},         {"x_min", pl->x_min}, {"x_max", pl->x_max}};
  }
  return j;
}

namespace {

void check_power_law_keys(const nlohmann::json& d) {
  if (!d.is_object()) throw FormatError("layer distribution: power_law must be an object");
  for (const auto& [key, _] : d.items()) {
    if (key != "alpha" && key != "beta" && key != "a" && key != "b" && key != "x_min" && key != "x_max") {
      throw FormatError("layer distribution: unknown power_law key '" + key + "'");
    }
  }
}

}  // namespace

LayerTypeDistribution layer_distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("layer distribution: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "atoms" && key != "power_law") {
      throw FormatError("layer distribution: unknown key '" + key + "'");
    }
  }
  try {
    if (j.contains("atoms")) {
      std::vector<LayerAtom> atoms;
      for (const auto& rec : j.at("atoms")) {
        for (const auto& [key, _] : rec.items()) {
          if (key != "x" && key != "y" && key != "p") {
            throw FormatError("layer distribution: unknown atom key '" + key + "'");
          }
        }
        atoms.push_back({{rec.at("x").get<std::size_t>(), rec.at("y").get<double>()},
                         rec.at("p").get<double>()});
      }
      std::optional<PowerLawParams> pl;
      if (j.contains("power_law")) {
        const auto& d = j.at("power_law");
        check_power_law_keys(d);
        pl = PowerLawParams{d.at("alpha").get<double>(), d.at("beta").get<double>(),
                            d.value("a", 0.0),           d.at("b").get<double>(),
                            d.at("x_min").get<std::size_t>(), d.at("x_max").get<std::size_t>()};
      }
      return LayerTypeDistribution(std::move(atoms), pl);
    }
    if (j.contains("power_law")) {
      const auto& d = j.at("power_law");
      check_power_law_keys(d);
      return power_law_distribution(d.at("alpha").get<double>(), d.at("beta").get<double>(),
                                    d.at("b").get<double>(), d.value("x_min", std::size_t{1}),
                                    d.at("x_max").get<std::size_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("layer distribution: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("layer distribution: ") + e.what());
  }
  throw FormatError("layer distribution: need 'atoms' or 'power_law'");
}

}  // namespace layergraph
