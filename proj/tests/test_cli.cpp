#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "layergraph/errors.hpp"
#include "layergraph/estimators.hpp"
#include "layergraph/graph_io.hpp"

using namespace layergraph;
using namespace layergraph::app;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("layergraph_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "layergraph");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
  }

  json run_machine(std::vector<std::string> args) {
    args.push_back("--format");
    args.push_back("machine");
    std::string out, err;
    const int code = run(args, &out, &err);
    EXPECT_EQ(code, 0) << err;
    return json::parse(out);
  }

  fs::path dir_;
};

const json* find_row(const json& table, const std::string& key, const std::string& value) {
  for (const auto& row : table) {
    if (row.at(key) == value) return &row;
  }
  return nullptr;
}

const std::string kMinimal = R"({
  "model": {"m": 5, "P": {"atoms": [{"x": 3, "y": 0.5, "p": 1.0}]}},
  "scale": {"n": 10, "replicates": 1, "seed": 7}
})";

}  // namespace

TEST_F(Cli, ConfigErrorsNameTheField) {
  auto expect_message = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(json::parse(text));
      ADD_FAILURE() << "accepted: " << text;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_message(R"({"model":{"m":5,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":10},
                     "percolation":{"kind":"bond_overlay","theta":1.5}})",
                 "percolation.theta");
  expect_message(R"({"model":{"m":5,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":10,"replicats":2}})",
                 "scale.replicats");
  expect_message(R"({"model":{"m":5,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":10},
                     "tolerances":{"degree_tvv":0.1}})",
                 "tolerances.degree_tvv");
  expect_message(R"({"model":{"m":5,"P":{"atoms":[{"x":30,"y":0.5,"p":1}]}},"scale":{"n":10}})", "model.P");

  const auto path = write("broken.json", "{\n  \"model\": {\n    \"m\": 5,,\n  }\n}\n");
  try {
    load_config(path);
    ADD_FAILURE();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }

  std::string err;
  const auto bad = write("bad.json", R"({"model":{"m":5,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":10},
                                         "percolation":{"kind":"site","theta":1.5}})");
  EXPECT_EQ(run({"generate", "--config", bad.string(), "--out-dir", dir_.string()}, nullptr, &err), 2);
  EXPECT_NE(err.find("percolation.theta"), std::string::npos) << err;
}

TEST_F(Cli, GenerateWritesOneDumpPerReplicate) {
  const auto cfg = write("minimal.json", kMinimal);
  const auto out = dir_ / "dumps";
  ASSERT_EQ(run({"generate", "--config", cfg.string(), "--out-dir", out.string(), "--replicates", "3"}), 0);
  std::set<std::uint64_t> replicates;
  std::vector<OverlayGraph> graphs;
  for (int r = 0; r < 3; ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "replicate_%04d.lgd", r);
    const auto d = load_dump(out / name);
    EXPECT_EQ(d.graph.m(), 5u);
    EXPECT_EQ(d.graph.n(), 10u);
    EXPECT_EQ(d.graph.seed().master, 7u);
    replicates.insert(d.graph.seed().replicate);
    graphs.push_back(d.graph);
  }
  EXPECT_EQ(replicates.size(), 3u);
  EXPECT_FALSE(graphs[0] == graphs[1] && graphs[1] == graphs[2]);
}

TEST_F(Cli, AnalyzeMatchesInMemoryEstimators) {
  const auto cfg = write("a.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                      "scale":{"n":3000,"replicates":1,"seed":11}})");
  for (bool binary : {false, true}) {
    const auto out = dir_ / (binary ? "bin" : "text");
    std::vector<std::string> gen{"generate", "--config", cfg.string(), "--out-dir", out.string()};
    if (binary) {
      const auto cfgb = write("b.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                           "scale":{"n":3000,"replicates":1,"seed":11},"outputs":{"binary":true}})");
      gen[2] = cfgb.string();
    }
    ASSERT_EQ(run(gen), 0);
    const auto dump = out / (binary ? "replicate_0000.lgb" : "replicate_0000.lgd");
    const json from_cli = run_machine({"analyze", dump.string(), "--t-max", "8"});

    const RunConfig rc = load_config(cfg);
    const OverlayGraph G = realize(rc.experiment, 0);
    Report mem;
    add_graph_analysis(mem, dump.string(), G, 8, {1, 10, 100});
    const json expect = mem.to_json();
    EXPECT_EQ(from_cli["tables"]["degree"], expect["tables"]["degree"]);
    EXPECT_EQ(from_cli["tables"]["estimate"], expect["tables"]["estimate"]);
  }
}

TEST_F(Cli, AnalyzeSmallGraphs) {
  const Edge tri[] = {{0, 1}, {1, 2}, {0, 2}};
  save_dump(dir_ / "tri.lgd", OverlayGraph::from_edges(3, tri), 0);
  const Edge k4m[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
  save_dump(dir_ / "k4m.lgd", OverlayGraph::from_edges(4, k4m), 0);
  save_dump(dir_ / "empty.lgd", OverlayGraph::from_edges(5, {}), 0);

  const json r = run_machine({"analyze", (dir_ / "tri.lgd").string(), (dir_ / "k4m.lgd").string(),
                              (dir_ / "empty.lgd").string()});
  auto stat = [&](const std::string& source, const std::string& name) -> json {
    for (const auto& row : r["tables"]["estimate"]) {
      if (row["source"] == (dir_ / source).string() && row["statistic"] == name) return row["value"];
    }
    return nullptr;
  };
  EXPECT_EQ(stat("tri.lgd", "tau_hat"), 1.0);
  EXPECT_EQ(stat("k4m.lgd", "tau_hat"), 0.75);
  EXPECT_TRUE(stat("empty.lgd", "tau_hat").is_null());
  for (const auto& row : r["tables"]["degree"]) {
    if (row["source"] == (dir_ / "empty.lgd").string()) {
      EXPECT_EQ(row["degree"], 0);
      EXPECT_EQ(row["fraction"], 1.0);
    }
  }

  write("corrupt.lgd", "LGDUMP 1\nn 3\nm x\n");
  std::string err;
  EXPECT_EQ(run({"analyze", (dir_ / "corrupt.lgd").string()}, nullptr, &err), 2);
  EXPECT_FALSE(err.empty());
}

TEST_F(Cli, TheoryExamples) {
  const auto er = write("er.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":2,"y":1,"p":1}]}},"scale":{"n":100}})");
  const json a = run_machine({"theory", "--config", er.string()});
  const json* giant = find_row(a["tables"]["theory"], "quantity", "giant_fraction");
  ASSERT_TRUE(giant);
  EXPECT_NEAR((*giant)["value"].get<double>(), 0.79681213, 1e-8);
  const json* tau_edge = find_row(a["tables"]["theory"], "quantity", "tau");
  ASSERT_TRUE(tau_edge);
  EXPECT_EQ((*tau_edge)["value"], 0.0);

  const auto fixed = write("fixed.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":100}})");
  const json b = run_machine({"theory", "--config", fixed.string()});
  const json* tau = find_row(b["tables"]["theory"], "quantity", "tau");
  ASSERT_TRUE(tau);
  EXPECT_NEAR((*tau)["value"].get<double>(), 1.0 / 14.0, 1e-15);
  EXPECT_FALSE((*tau)["tag"].get<std::string>().empty());

  const auto pl = write("pl.json", R"({"model":{"mu":1.0,"P":{"power_law":{"alpha":3.5,"beta":0.5,"b":1,"x_min":1,"x_max":200}}},
                                     "scale":{"n":1000},"theory":{"t_max":4}})");
  const json c = run_machine({"theory", "--config", pl.string()});
  const json* delta = find_row(c["tables"]["power_law"], "quantity", "degree_exponent");
  ASSERT_TRUE(delta);
  EXPECT_EQ((*delta)["value"], 4.0);
  const json* sx = find_row(c["tables"]["power_law"], "quantity", "spectrum_exponent");
  ASSERT_TRUE(sx);
  EXPECT_EQ((*sx)["value"], 1.0);
}

TEST_F(Cli, UndefinedQuantitiesAreReportedWithTheirReason) {
  const auto edge = write("edge.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":2,"y":0,"p":1}]}},"scale":{"n":100}})");
  const json r = run_machine({"theory", "--config", edge.string()});
  const json* tau = find_row(r["tables"]["theory"], "quantity", "tau");
  ASSERT_TRUE(tau);
  EXPECT_TRUE((*tau)["value"].is_null());
  EXPECT_NE((*tau)["note"].get<std::string>().find("(P)_21"), std::string::npos);
}

TEST_F(Cli, EqualHashAndSeedGiveIdenticalReports) {
  const auto cfg = write("c.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                      "scale":{"n":2000,"replicates":2,"seed":5},"theory":{"t_max":4}})");
  std::string a, b;
  run({"compare", "--config", cfg.string()}, &a);
  run({"compare", "--config", cfg.string()}, &b);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("config_hash"), std::string::npos);
  std::string c;
  run({"compare", "--config", cfg.string(), "--seed", "6"}, &c);
  EXPECT_NE(a, c);
}

TEST_F(Cli, CompareNegativeControlFailsWithNamedMetric) {
  const auto good = write("good.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                         "scale":{"n":20000,"replicates":2,"seed":3},"theory":{"t_max":4}})");
  std::string out, err;
  EXPECT_EQ(run({"compare", "--config", good.string()}, &out, &err), 0) << out << err;

  const auto wrong = write("wrong.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                          "scale":{"n":20000,"replicates":2,"seed":3},"theory":{"mu":2.0,"t_max":4}})");
  EXPECT_EQ(run({"compare", "--config", wrong.string()}, &out, &err), 1);
  EXPECT_NE(err.find("degree_tv"), std::string::npos) << err;
}

TEST_F(Cli, ZeroThetaBondPercolationPassesTrivially) {
  const auto cfg = write("zero.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},
                                         "scale":{"n":5000,"replicates":1,"seed":3},
                                         "percolation":{"kind":"bond_overlay","theta":0}})");
  std::string out, err;
  EXPECT_EQ(run({"compare", "--config", cfg.string(), "--format", "machine"}, &out, &err), 0) << err;
  const json r = json::parse(out);
  const json* giant = find_row(r["tables"]["metric"], "metric", "giant_abs_error");
  ASSERT_TRUE(giant);
  EXPECT_EQ((*giant)["theory"], 0.0);
  EXPECT_EQ((*giant)["pass"], true);
}

TEST_F(Cli, UsageErrors) {
  std::string err;
  EXPECT_EQ(run({"frobnicate"}, nullptr, &err), 2);
  EXPECT_EQ(run({"theory", "--config", (dir_ / "missing.json").string()}, nullptr, &err), 2);
  EXPECT_EQ(run({"theory", "--config", write("m.json", kMinimal).string(), "--format", "xml"}, nullptr, &err), 2);
}

TEST_F(Cli, OutDirReceivesTables) {
  const auto cfg = write("t.json", R"({"model":{"mu":1.0,"P":{"atoms":[{"x":3,"y":0.5,"p":1}]}},"scale":{"n":100},
                                      "theory":{"t_max":4}})");
  ASSERT_EQ(run({"theory", "--config", cfg.string(), "--out-dir", (dir_ / "rep").string()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "theory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "meta.json"));
}
