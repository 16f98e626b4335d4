#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "layergraph/simulator.hpp"
#include "layergraph/theory.hpp"

namespace layergraph::app {

struct TheorySection {
  /// Overrides the model's mu for predictions only (negative controls).
  std::optional<double> mu;
  std::size_t t_max = 10;
  std::vector<std::size_t> size_caps;
  std::vector<double> theta_grid;
  double truncation = kDefaultTruncation;
};

struct Tolerances {
  double degree_tv = 0.02;
  double clustering = 0.01;
  double spectrum = 0.05;
  double giant = 0.03;
  double second_component = 0.01;
};

struct OutputSection {
  bool dumps = true;
  bool binary = false;
  std::size_t spectrum_t_max = 6;
  std::size_t degree_max = 30;
  std::vector<std::size_t> component_thresholds{1, 10, 100};
};

struct RunConfig {
  ExperimentConfig experiment;
  /// Layers per node of the model (m / n when only m was given).
  double mu = 1.0;
  TheorySection theory;
  Tolerances tolerances;
  OutputSection outputs;
  /// Effective configuration after command-line overrides.
  nlohmann::json echo;
  std::uint64_t hash = 0;

  ModelLimit model_limit() const { return {theory.mu.value_or(mu), experiment.P}; }
};

/// FNV-1a over the canonical serialisation (keys sorted) of the document.
std::uint64_t config_hash(const nlohmann::json& j);
std::string hash_hex(std::uint64_t h);

/// Throws FormatError naming the offending field path, e.g.
/// "percolation.theta must lie in [0,1]" or "unknown key model.layrs".
RunConfig parse_config(nlohmann::json j, std::optional<std::uint64_t> seed_override = std::nullopt,
                       std::optional<std::size_t> replicates_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt,
                      std::optional<std::size_t> replicates_override = std::nullopt);

}  // namespace layergraph::app
