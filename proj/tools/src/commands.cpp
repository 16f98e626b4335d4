#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "layergraph/distributions.hpp"
#include "layergraph/errors.hpp"
#include "layergraph/estimators.hpp"
#include "layergraph/graph_io.hpp"
#include "layergraph/parallel.hpp"
#include "layergraph/rng.hpp"
#include "layergraph/simulator.hpp"
#include "layergraph/theory.hpp"

namespace layergraph::app {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double v) { return json(v); }

void base_meta(Report& r, const std::string& command, const RunConfig& rc) {
  r.meta("command", command);
  r.meta("config_hash", hash_hex(rc.hash));
  r.meta("master_seed", rc.experiment.master_seed);
  r.meta("replicates", rc.experiment.replicates);
  r.meta("generator", kGeneratorName);
  r.meta("config", rc.echo);
}

void emit(const Report& r, const CommonOptions& opt, std::ostream& out) {
  if (opt.out_dir.empty()) {
    r.write(out, opt.format);
  } else {
    r.write_dir(opt.out_dir, opt.format);
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// percolated_limits, extended to bond theta = 0 where every layer is empty.
ModelLimit percolated(const ModelLimit& M, bool bond, double theta) {
  if (bond && theta == 0.0) return {M.mu, bond_scaled(M.P, 0.0)};
  return percolated_limits(M, {bond ? PercolationMode::Kind::bond : PercolationMode::Kind::site, theta});
}

/// Limit object matching the configured percolation.
ModelLimit target_limit(const RunConfig& rc) {
  ModelLimit M = rc.model_limit();
  const auto& p = rc.experiment.percolation;
  switch (p.kind) {
    case Percolation::Kind::none:
      return M;
    case Percolation::Kind::site: {
      const double theta = p.site_nodes ? static_cast<double>(p.site_nodes->size()) / static_cast<double>(rc.experiment.n)
                                        : p.theta;
      return percolated(M, false, theta);
    }
    case Percolation::Kind::bond_overlay:
    case Percolation::Kind::bond_layerwise:
      return percolated(M, true, p.theta);
  }
  return M;
}

std::string percolation_name(Percolation::Kind k) {
  switch (k) {
    case Percolation::Kind::none: return "none";
    case Percolation::Kind::site: return "site";
    case Percolation::Kind::bond_overlay: return "bond_overlay";
    case Percolation::Kind::bond_layerwise: return "bond_layerwise";
  }
  return "?";
}

struct ReplicateResult {
  GraphStatistics stats;
  ComponentSummary comps;
  std::size_t n = 0;
};

std::vector<ReplicateResult> simulate(const ExperimentConfig& cfg) {
  std::vector<ReplicateResult> results(cfg.replicates);
  parallel_for(cfg.replicates, [&](std::size_t r) {
    const OverlayGraph G = realize(cfg, r);
    results[r] = {graph_statistics(G), components(G), G.n()};
  });
  return results;
}

}  // namespace

void add_graph_analysis(Report& report, const std::string& source, const OverlayGraph& G, std::size_t t_max,
                        const std::vector<std::size_t>& thresholds) {
  const GraphStatistics s = graph_statistics(G);
  const ComponentSummary c = components(G, thresholds);
  const double n = static_cast<double>(G.n());

  auto& deg = report.table("degree", {"source", "degree", "count", "fraction"});
  for (std::size_t t = 0; t < s.nodes_with_degree.size(); ++t) {
    if (s.nodes_with_degree[t] == 0) continue;
    deg.add({source, t, s.nodes_with_degree[t], num(static_cast<double>(s.nodes_with_degree[t]) / n)});
  }
  if (G.n() == 0) deg.add({source, 0, 0, num(kNaN)});

  auto& est = report.table("estimate", {"source", "statistic", "t", "value", "count", "undefined"});
  est.add({source, "nodes", nullptr, G.n(), G.n(), false});
  est.add({source, "layers", nullptr, G.m(), G.m(), false});
  est.add({source, "union_edges", nullptr, G.union_edges().size(), G.union_edges().size(), false});
  est.add({source, "triangles", nullptr, s.triangles, s.triangles, false});
  std::uint64_t deg2 = 0;
  for (std::size_t t = 2; t < s.nodes_with_degree.size(); ++t) deg2 += s.nodes_with_degree[t];
  const auto tau = s.global_clustering();
  est.add({source, "tau_hat", nullptr, num(tau.value_or(kNaN)), deg2, !tau.has_value()});
  for (std::size_t t = 2; t <= t_max; ++t) {
    const auto sig = s.spectrum(t);
    const std::uint64_t cnt = t < s.nodes_with_degree.size() ? s.nodes_with_degree[t] : 0;
    est.add({source, "sigma_hat", t, num(sig.value_or(kNaN)), cnt, !sig.has_value()});
  }
  est.add({source, "N1", nullptr, c.N1, G.n(), false});
  est.add({source, "N2", nullptr, c.N2, G.n(), false});
  est.add({source, "components", nullptr, c.sizes.size(), G.n(), false});
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
    est.add({source, "B", c.thresholds[i], c.B[i], G.n(), false});
  }
}

Report theory_report(const RunConfig& rc) {
  Report r;
  base_meta(r, "theory", rc);
  const ModelLimit M = rc.model_limit();
  const double tol = rc.theory.truncation;
  auto& th = r.table("theory", {"quantity", "t", "theta", "value", "tag", "note"});

  auto guarded = [&](const std::string& quantity, const std::string& tag, auto&& compute) {
    try {
      th.add({quantity, nullptr, nullptr, num(compute()), tag, ""});
    } catch (const UndefinedQuantity& e) {
      th.add({quantity, nullptr, nullptr, num(kNaN), tag, e.what()});
    } catch (const NonConvergence& e) {
      th.add({quantity, nullptr, nullptr, num(kNaN), tag, e.what()});
    }
  };

  th.add({"mu", nullptr, nullptr, num(M.mu), "input", rc.theory.mu ? "theory.mu override" : ""});
  guarded("mean_degree", "limit-degree-law", [&] { return M.mu * cross_moment(M.P, 2, 1).value; });
  try {
    const Pmf f = limiting_degree_distribution(M, tol);
    for (std::size_t t = 0; t <= rc.outputs.degree_max; ++t) {
      th.add({"degree_law", t, nullptr, num(f(t)), "limit-degree-law", ""});
    }
    th.add({"degree_law_tail", nullptr, nullptr, num(f.tail_mass()), "limit-degree-law", "mass beyond stored support"});
  } catch (const std::exception& e) {
    th.add({"degree_law", nullptr, nullptr, num(kNaN), "limit-degree-law", e.what()});
  }
  guarded("tau", "clustering-coefficient", [&] { return clustering_coefficient(M, ClusteringRegime::linear); });
  if (rc.theory.t_max >= 2) {
    try {
      const ClusteringSpectrum spec(M, rc.theory.t_max, tol);
      for (std::size_t t = 2; t <= rc.theory.t_max; ++t) {
        try {
          th.add({"sigma", t, nullptr, num(spec(t)), "clustering-spectrum", ""});
        } catch (const UndefinedQuantity& e) {
          th.add({"sigma", t, nullptr, num(kNaN), "clustering-spectrum", e.what()});
        }
      }
    } catch (const std::exception& e) {
      th.add({"sigma", nullptr, nullptr, num(kNaN), "clustering-spectrum", e.what()});
    }
  }
  guarded("giant_fraction", "giant-component", [&] { return giant_fraction(M, tol); });
  for (double theta : rc.theory.theta_grid) {
    try {
      th.add({"r0", nullptr, theta, num(r_naught(M, theta)), "bond-reproduction-number", ""});
    } catch (const std::exception& e) {
      th.add({"r0", nullptr, theta, num(kNaN), "bond-reproduction-number", e.what()});
    }
  }
  guarded("theta_one", "bond-threshold-giant", [&] { return theta_one(M); });

  if (!rc.theory.size_caps.empty()) {
    auto& t2 = r.table("theta_two", {"theta", "cap", "r0", "loglog_slope", "last_relative_increment",
                                     "classification", "predicted_theta_two"});
    for (double theta : rc.theory.theta_grid) {
      const ThetaTwoReport rep = theta_two_diagnostic(M, theta, rc.theory.size_caps);
      for (std::size_t i = 0; i < rep.caps.size(); ++i) {
        t2.add({theta, rep.caps[i], num(rep.r0[i]), num(rep.loglog_slope), num(rep.last_relative_increment),
                to_string(rep.classification), num(rep.predicted_theta_two.value_or(kNaN))});
      }
    }
  }

  if (const auto& pl = M.P.power_law()) {
    const PowerLawPrediction pred = power_law_predictions(*pl, M.mu, &M.P);
    auto& pt = r.table("power_law", {"quantity", "value", "note"});
    pt.add({"heavy_tailed", pred.heavy_tailed, ""});
    pt.add({"degree_exponent", num(pred.delta), ""});
    pt.add({"degree_constant", num(pred.d), ""});
    pt.add({"spectrum_exponent", num(pred.spectrum_exponent), ""});
    pt.add({"spectrum_constant", num(pred.spectrum_constant), ""});
    pt.add({"c1", num(pred.c1), ""});
    pt.add({"c2", num(pred.c2), ""});
    pt.add({"c3", num(pred.c3), ""});
    for (const auto& [rs, v] : pred.delta_rs) {
      pt.add({"delta_" + std::to_string(rs.first) + std::to_string(rs.second), num(v), ""});
    }
    for (const auto& [rs, v] : pred.d_rs) {
      pt.add({"d_" + std::to_string(rs.first) + std::to_string(rs.second), num(v), ""});
    }
    if (pred.light_tail_bound) pt.add({"light_tail_bound", num(*pred.light_tail_bound), "beta >= 1"});
    const auto t2 = predicted_theta_two(*pl);
    pt.add({"predicted_theta_two", num(t2.value_or(kNaN)), t2 ? "" : "not determined by (alpha, beta, b)"});
  }
  return r;
}

Report compare_report(const RunConfig& rc, bool& passed) {
  Report r;
  base_meta(r, "compare", rc);
  r.meta("percolation", percolation_name(rc.experiment.percolation.kind));
  const auto results = simulate(rc.experiment);
  const ModelLimit L = target_limit(rc);
  const double tol = rc.theory.truncation;
  const auto& tl = rc.tolerances;
  const std::string emp = "simulation pooled over " + std::to_string(results.size()) + " replicates";

  auto& mt = r.table("metric", {"metric", "empirical", "theory", "error", "tolerance", "pass", "empirical_source",
                                "theory_source", "note"});
  passed = true;
  auto add = [&](const std::string& name, double e, double t, double err, double tolerance, bool ok,
                 const std::string& esrc, const std::string& tsrc, const std::string& note) {
    passed = passed && ok;
    mt.add({name, num(e), num(t), num(err), num(tolerance), ok, esrc, tsrc, note});
  };

  // Degree law.
  std::vector<double> counts;
  for (const auto& res : results) {
    const auto& nd = res.stats.nodes_with_degree;
    if (counts.size() < nd.size()) counts.resize(nd.size(), 0.0);
    for (std::size_t t = 0; t < nd.size(); ++t) counts[t] += static_cast<double>(nd[t]);
  }
  const bool any_nodes = std::any_of(counts.begin(), counts.end(), [](double c) { return c > 0; });
  const Pmf emp_f = any_nodes ? Pmf::from_counts(counts) : Pmf::delta(0);
  const Pmf f = limiting_degree_distribution(L, tol);
  const double tv = tv_distance(emp_f, f);
  add("degree_tv", tv, 0.0, tv, tl.degree_tv, tv <= tl.degree_tv, emp + " (degree histogram)",
      "compound Poisson limit law", "");

  // Global clustering: mean of the per-replicate plug-in values.
  double tau_sum = 0.0;
  std::size_t tau_n = 0;
  for (const auto& res : results) {
    if (auto v = res.stats.global_clustering()) {
      tau_sum += *v;
      ++tau_n;
    }
  }
  std::optional<double> tau_theory;
  std::string tau_note;
  try {
    tau_theory = clustering_coefficient(L, ClusteringRegime::linear);
  } catch (const UndefinedQuantity& e) {
    tau_note = e.what();
  }
  if (tau_n == 0 && !tau_theory) {
    add("clustering_abs_error", kNaN, kNaN, 0.0, tl.clustering, true, emp, "limit clustering coefficient",
        "undefined on both sides: " + tau_note);
  } else if (tau_n == 0 || !tau_theory) {
    add("clustering_abs_error", tau_n ? tau_sum / static_cast<double>(tau_n) : kNaN, tau_theory.value_or(kNaN), kNaN,
        tl.clustering, false, emp, "limit clustering coefficient",
        tau_n == 0 ? "no replicate has a node of degree >= 2" : tau_note);
  } else {
    const double e = tau_sum / static_cast<double>(tau_n);
    add("clustering_abs_error", e, *tau_theory, std::abs(e - *tau_theory), tl.clustering,
        std::abs(e - *tau_theory) <= tl.clustering, "mean of " + std::to_string(tau_n) + " replicate estimates",
        "limit clustering coefficient", "");
  }

  // Spectrum, pooled ratio over replicates.
  const std::size_t smax = rc.outputs.spectrum_t_max;
  if (smax >= 2) {
    std::optional<ClusteringSpectrum> spec;
    std::string spec_note;
    try {
      spec.emplace(L, smax, tol);
    } catch (const std::exception& e) {
      spec_note = e.what();
    }
    for (std::size_t t = 2; t <= smax; ++t) {
      double num_tri = 0.0, paths = 0.0;
      for (const auto& res : results) {
        if (t < res.stats.nodes_with_degree.size()) {
          num_tri += 2.0 * static_cast<double>(res.stats.triangles_at_degree[t]);
          paths += res.stats.paths_at_degree(t);
        }
      }
      const std::string name = "spectrum_abs_error_t" + std::to_string(t);
      std::optional<double> theory;
      std::string note = spec_note;
      if (spec) {
        try {
          theory = (*spec)(t);
        } catch (const UndefinedQuantity& e) {
          note = e.what();
        }
      }
      if (paths == 0.0 || !theory) {
        // Missing on either side is reported, never imputed.
        add(name, paths > 0 ? num_tri / paths : kNaN, theory.value_or(kNaN), kNaN, tl.spectrum, true, emp,
            "limit clustering spectrum", "skipped: " + (paths == 0.0 ? std::string("no node of this degree") : note));
        continue;
      }
      const double e = num_tri / paths;
      add(name, e, *theory, std::abs(e - *theory), tl.spectrum, std::abs(e - *theory) <= tl.spectrum, emp,
          "limit clustering spectrum", "");
    }
  }

  // Components.
  double n1 = 0.0, n2max = 0.0;
  for (const auto& res : results) {
    const double n = std::max<double>(1.0, static_cast<double>(res.n));
    n1 += static_cast<double>(res.comps.N1) / n;
    n2max = std::max(n2max, static_cast<double>(res.comps.N2) / n);
  }
  n1 /= static_cast<double>(results.size());
  const double rho = giant_fraction(L, tol);
  add("giant_abs_error", n1, rho, std::abs(n1 - rho), tl.giant, std::abs(n1 - rho) <= tl.giant,
      "mean largest component fraction", "branching-process survival of the transitive offspring law", "");
  add("second_component", n2max, 0.0, n2max, tl.second_component, n2max <= tl.second_component,
      "max second component fraction", "vanishes in the limit", "");
  return r;
}

Report sweep_report(const RunConfig& rc) {
  Report r;
  base_meta(r, "sweep", rc);
  std::vector<double> grid = rc.theory.theta_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  }
  Percolation::Kind kind = rc.experiment.percolation.kind;
  if (kind == Percolation::Kind::none) kind = Percolation::Kind::bond_overlay;
  const bool bond = kind != Percolation::Kind::site;
  const ModelLimit M = rc.model_limit();
  r.meta("percolation", percolation_name(kind));
  try {
    r.meta("theta_one", theta_one(M));
  } catch (const std::exception& e) {
    r.meta("theta_one", e.what());
  }

  auto& st = r.table("sweep", {"theta", "kind", "mean_N1_fraction", "sd_N1_fraction", "max_N2_fraction",
                               "theory_giant", "r0"});
  for (double theta : grid) {
    ExperimentConfig cfg = rc.experiment;
    cfg.percolation = {kind, theta, std::nullopt};
    const auto results = simulate(cfg);
    double s = 0.0, s2 = 0.0, n2 = 0.0;
    for (const auto& res : results) {
      const double n = std::max<double>(1.0, static_cast<double>(res.n));
      const double v = static_cast<double>(res.comps.N1) / n;
      s += v;
      s2 += v * v;
      n2 = std::max(n2, static_cast<double>(res.comps.N2) / n);
    }
    const double R = static_cast<double>(results.size());
    const double mean = s / R;
    const double sd = R > 1 ? std::sqrt(std::max(0.0, (s2 - R * mean * mean) / (R - 1))) : 0.0;
    double rho = kNaN;
    try {
      rho = giant_fraction(percolated(M, bond, theta), rc.theory.truncation);
    } catch (const std::exception&) {
    }
    st.add({theta, percolation_name(kind), num(mean), num(sd), num(n2), num(rho),
            num(bond ? r_naught(M, theta) : kNaN)});
  }
  return r;
}

int cmd_generate(const CommonOptions& opt, std::ostream& out, std::ostream&) {
  const Stopwatch sw;
  const RunConfig rc = load_config(opt.config, opt.seed, opt.replicates);
  const std::filesystem::path dir = opt.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(opt.out_dir);
  std::filesystem::create_directories(dir);
  Report r;
  base_meta(r, "generate", rc);
  auto& t = r.table("dump", {"replicate", "path", "n", "m", "union_edges", "layer_edges"});
  for (std::size_t rep = 0; rep < rc.experiment.replicates; ++rep) {
    const OverlayGraph G = realize(rc.experiment, rep);
    char name[48];
    std::snprintf(name, sizeof name, "replicate_%04zu.%s", rep, rc.outputs.binary ? "lgb" : "lgd");
    const auto path = dir / name;
    if (rc.outputs.dumps) save_dump(path, G, rc.hash, rc.outputs.binary);
    t.add({rep, rc.outputs.dumps ? path.string() : std::string(), G.n(), G.m(), G.union_edges().size(),
           G.total_layer_edges()});
  }
  if (opt.timing) r.meta("runtime_seconds", sw.seconds());
  r.write(out, opt.format);
  return 0;
}

int cmd_analyze(const CommonOptions& opt, const AnalyzeOptions& aopt, std::ostream& out, std::ostream&) {
  const Stopwatch sw;
  Report r;
  r.meta("command", "analyze");
  auto& src = r.table("source", {"source", "config_hash", "master_seed", "replicate", "generator", "percolation"});
  for (const auto& path : aopt.dumps) {
    const GraphDump d = load_dump(path);
    const auto& s = d.graph.seed();
    src.add({path, hash_hex(d.config_hash), s.master, s.replicate, s.generator, s.percolation});
    add_graph_analysis(r, path, d.graph, aopt.t_max, aopt.thresholds);
  }
  if (opt.timing) r.meta("runtime_seconds", sw.seconds());
  emit(r, opt, out);
  return 0;
}

int cmd_theory(const CommonOptions& opt, std::ostream& out, std::ostream&) {
  const Stopwatch sw;
  const RunConfig rc = load_config(opt.config, opt.seed, opt.replicates);
  Report r = theory_report(rc);
  if (opt.timing) r.meta("runtime_seconds", sw.seconds());
  emit(r, opt, out);
  return 0;
}

int cmd_compare(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  const Stopwatch sw;
  const RunConfig rc = load_config(opt.config, opt.seed, opt.replicates);
  bool passed = false;
  Report r = compare_report(rc, passed);
  if (opt.timing) r.meta("runtime_seconds", sw.seconds());
  emit(r, opt, out);
  if (!passed) {
    err << "compare: failing metrics:";
    for (const auto& row : r.find("metric")->rows) {
      if (!row[5].get<bool>()) err << ' ' << row[0].get<std::string>();
    }
    err << '\n';
    return 1;
  }
  return 0;
}

int cmd_sweep(const CommonOptions& opt, std::ostream& out, std::ostream&) {
  const Stopwatch sw;
  const RunConfig rc = load_config(opt.config, opt.seed, opt.replicates);
  Report r = sweep_report(rc);
  if (opt.timing) r.meta("runtime_seconds", sw.seconds());
  emit(r, opt, out);
  return 0;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and exact numerics for overlays of Bernoulli random-graph layers"};
  app.require_subcommand(1);
  CommonOptions opt;
  AnalyzeOptions aopt;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  const std::map<std::string, Format> formats{{"csv", Format::csv}, {"machine", Format::machine}};

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "JSON experiment configuration");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override scale.seed");
    sub->add_option("--replicates", replicates, "Override scale.replicates")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", opt.out_dir, "Directory for dumps or report files");
    sub->add_option("--format", opt.format, "Report format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_flag("--timing", opt.timing, "Record wall-clock runtime in the report");
  };

  auto* gen = app.add_subcommand("generate", "Sample graphs and write dumps");
  common(gen, true);
  auto* ana = app.add_subcommand("analyze", "Estimators on graph dumps");
  common(ana, false);
  ana->add_option("dumps", aopt.dumps, "Dump files")->required()->check(CLI::ExistingFile);
  ana->add_option("--t-max", aopt.t_max, "Largest degree in the spectrum table");
  ana->add_option("--thresholds", aopt.thresholds, "Component size thresholds for B_t");
  auto* the = app.add_subcommand("theory", "Limit predictions for a model");
  common(the, true);
  auto* cmp = app.add_subcommand("compare", "Simulate and compare with theory; exit 1 on tolerance failure");
  common(cmp, true);
  auto* swp = app.add_subcommand("sweep", "Giant component along a percolation grid");
  common(swp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  if (gen->count("--seed") || ana->count("--seed") || the->count("--seed") || cmp->count("--seed") ||
      swp->count("--seed")) {
    opt.seed = seed;
  }
  if (replicates > 0) opt.replicates = replicates;

  try {
    if (*gen) return cmd_generate(opt, out, err);
    if (*ana) return cmd_analyze(opt, aopt, out, err);
    if (*the) return cmd_theory(opt, out, err);
    if (*cmp) return cmd_compare(opt, out, err);
    if (*swp) return cmd_sweep(opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace layergraph::app
