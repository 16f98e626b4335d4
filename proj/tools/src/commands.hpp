#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "layergraph/overlay_graph.hpp"
#include "report.hpp"

namespace layergraph::app {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::string out_dir;
  Format format = Format::csv;
  bool timing = false;
};

struct AnalyzeOptions {
  std::vector<std::string> dumps;
  std::size_t t_max = 10;
  std::vector<std::size_t> thresholds{1, 10, 100};
};

/// Degree table and estimator records ("degree" and "estimate" tables) for
/// one graph, labelled by `source`.
void add_graph_analysis(Report& report, const std::string& source, const OverlayGraph& G, std::size_t t_max,
                        const std::vector<std::size_t>& thresholds);

/// Limit predictions for the configured model ("theory", "theta_two" and
/// "power_law" tables). Quantities that are undefined for the model are
/// reported with the library's message in the note column.
Report theory_report(const RunConfig& rc);

/// Simulation against theory ("metric" table). `passed` is set when every
/// metric is within its tolerance.
Report compare_report(const RunConfig& rc, bool& passed);

/// Giant component fraction along theory.theta_grid ("sweep" table).
Report sweep_report(const RunConfig& rc);

int cmd_generate(const CommonOptions& opt, std::ostream& out, std::ostream& err);
int cmd_analyze(const CommonOptions& opt, const AnalyzeOptions& aopt, std::ostream& out, std::ostream& err);
int cmd_theory(const CommonOptions& opt, std::ostream& out, std::ostream& err);
int cmd_compare(const CommonOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommonOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code. Exit codes:
/// 0 success, 1 compare tolerance failure, 2 usage or input error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace layergraph::app
