#include "config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "layergraph/errors.hpp"

namespace layergraph::app {

using nlohmann::json;

std::uint64_t config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw FormatError("config: " + path + ": " + msg);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

template <class T>
T get(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(join(path, key), "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(join(path, key), "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    fail(join(path, key), e.what());
  }
}

template <class T>
std::vector<T> get_list(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(join(path, key), "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json wrapper = {{"item", v[i]}};
    out.push_back(get<T>(wrapper, join(path, key) + "[" + std::to_string(i) + "]", "item"));
  }
  return out;
}

void parse_model(const json& j, RunConfig& rc, std::optional<std::size_t>& m_given,
                 std::optional<double>& mu_given) {
  only_keys(j, "model", {"mu", "m", "P", "layers"});
  if (j.contains("mu")) {
    mu_given = get<double>(j, "model", "mu");
    if (!(*mu_given >= 0.0)) fail("model.mu", "must be non-negative");
  }
  if (j.contains("m")) m_given = get<std::size_t>(j, "model", "m");
  if (j.contains("P")) {
    try {
      rc.experiment.P = layer_distribution_from_json(j.at("P"));
    } catch (const FormatError& e) {
      fail("model.P", e.what());
    } catch (const std::invalid_argument& e) {
      fail("model.P", e.what());
    }
  }
  if (j.contains("layers")) {
    const auto& arr = j.at("layers");
    if (!arr.is_array()) fail("model.layers", "expected a list of {x, y}");
    std::vector<LayerType> types;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "model.layers[" + std::to_string(i) + "]";
      only_keys(arr[i], p, {"x", "y"});
      types.push_back({get<std::size_t>(arr[i], p, "x"), get<double>(arr[i], p, "y")});
    }
    if (!m_given) m_given = types.size();
    rc.experiment.explicit_types = std::move(types);
  }
  if (!j.contains("P") && !j.contains("layers")) fail("model", "needs 'P' or 'layers'");
}

}  // namespace

RunConfig parse_config(json j, std::optional<std::uint64_t> seed_override,
                       std::optional<std::size_t> replicates_override) {
  only_keys(j, "", {"model", "scale", "percolation", "theory", "tolerances", "outputs"});
  if (!j.contains("model")) fail("model", "missing stanza");
  if (!j.contains("scale")) fail("scale", "missing stanza");
  if (seed_override) j["scale"]["seed"] = *seed_override;
  if (replicates_override) j["scale"]["replicates"] = *replicates_override;

  RunConfig rc;
  std::optional<std::size_t> m_given;
  std::optional<double> mu_given;
  parse_model(j.at("model"), rc, m_given, mu_given);

  const auto& scale = j.at("scale");
  only_keys(scale, "scale", {"n", "replicates", "seed"});
  if (!scale.contains("n")) fail("scale.n", "missing");
  auto& ex = rc.experiment;
  ex.n = get<std::size_t>(scale, "scale", "n");
  if (ex.n < 1) fail("scale.n", "must be at least 1");
  if (scale.contains("replicates")) ex.replicates = get<std::size_t>(scale, "scale", "replicates");
  if (scale.contains("seed")) ex.master_seed = get<std::uint64_t>(scale, "scale", "seed");

  if (m_given) {
    ex.m = *m_given;
    rc.mu = mu_given.value_or(static_cast<double>(ex.m) / static_cast<double>(ex.n));
  } else if (mu_given) {
    rc.mu = *mu_given;
    ex.m = layers_for(rc.mu, ex.n);
  } else {
    fail("model", "needs 'mu' or 'm'");
  }

  if (j.contains("percolation")) {
    const auto& p = j.at("percolation");
    only_keys(p, "percolation", {"kind", "theta", "nodes"});
    const std::string kind = p.contains("kind") ? get<std::string>(p, "percolation", "kind") : "none";
    if (kind == "none") {
      ex.percolation.kind = Percolation::Kind::none;
    } else if (kind == "site") {
      ex.percolation.kind = Percolation::Kind::site;
    } else if (kind == "bond_overlay") {
      ex.percolation.kind = Percolation::Kind::bond_overlay;
    } else if (kind == "bond_layerwise") {
      ex.percolation.kind = Percolation::Kind::bond_layerwise;
    } else {
      fail("percolation.kind", "expected none, site, bond_overlay or bond_layerwise, got '" + kind + "'");
    }
    if (p.contains("theta")) {
      ex.percolation.theta = get<double>(p, "percolation", "theta");
      if (!(ex.percolation.theta >= 0.0 && ex.percolation.theta <= 1.0)) {
        fail("percolation.theta", "must lie in [0,1], got " + p.at("theta").dump());
      }
    }
    if (p.contains("nodes")) {
      if (ex.percolation.kind != Percolation::Kind::site) fail("percolation.nodes", "only valid for site percolation");
      auto nodes = get_list<std::size_t>(p, "percolation", "nodes");
      std::vector<NodeId> ids(nodes.begin(), nodes.end());
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      ex.percolation.site_nodes = std::move(ids);
    }
  }

  if (j.contains("theory")) {
    const auto& t = j.at("theory");
    only_keys(t, "theory", {"mu", "t_max", "size_caps", "theta_grid", "truncation"});
    if (t.contains("mu")) rc.theory.mu = get<double>(t, "theory", "mu");
    if (t.contains("t_max")) rc.theory.t_max = get<std::size_t>(t, "theory", "t_max");
    if (t.contains("size_caps")) rc.theory.size_caps = get_list<std::size_t>(t, "theory", "size_caps");
    if (t.contains("theta_grid")) {
      rc.theory.theta_grid = get_list<double>(t, "theory", "theta_grid");
      for (double th : rc.theory.theta_grid) {
        if (!(th >= 0.0 && th <= 1.0)) fail("theory.theta_grid", "values must lie in [0,1]");
      }
    }
    if (t.contains("truncation")) rc.theory.truncation = get<double>(t, "theory", "truncation");
  }

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    only_keys(t, "tolerances", {"degree_tv", "clustering", "spectrum", "giant", "second_component"});
    auto& tol = rc.tolerances;
    if (t.contains("degree_tv")) tol.degree_tv = get<double>(t, "tolerances", "degree_tv");
    if (t.contains("clustering")) tol.clustering = get<double>(t, "tolerances", "clustering");
    if (t.contains("spectrum")) tol.spectrum = get<double>(t, "tolerances", "spectrum");
    if (t.contains("giant")) tol.giant = get<double>(t, "tolerances", "giant");
    if (t.contains("second_component")) tol.second_component = get<double>(t, "tolerances", "second_component");
  }

  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    only_keys(o, "outputs", {"dumps", "binary", "spectrum_t_max", "degree_max", "component_thresholds"});
    auto& out = rc.outputs;
    if (o.contains("dumps")) out.dumps = get<bool>(o, "outputs", "dumps");
    if (o.contains("binary")) out.binary = get<bool>(o, "outputs", "binary");
    if (o.contains("spectrum_t_max")) out.spectrum_t_max = get<std::size_t>(o, "outputs", "spectrum_t_max");
    if (o.contains("degree_max")) out.degree_max = get<std::size_t>(o, "outputs", "degree_max");
    if (o.contains("component_thresholds")) {
      out.component_thresholds = get_list<std::size_t>(o, "outputs", "component_thresholds");
    }
  }

  try {
    ex.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  rc.echo = std::move(j);
  rc.hash = config_hash(rc.echo);
  return rc;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override,
                      std::optional<std::size_t> replicates_override) {
  std::ifstream is(path);
  if (!is) throw FormatError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    // The parser message carries line and column.
    throw FormatError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(std::move(j), seed_override, replicates_override);
}

}  // namespace layergraph::app
