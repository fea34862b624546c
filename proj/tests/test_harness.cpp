// Copyright 2026 The cgm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include "cgm/error.hpp"
#include "cgm/harness.hpp"

namespace cgm {
namespace {

namespace fs = std::filesystem;

ExperimentConfig parse(const std::string& text) { return ExperimentConfig::from_json(Json::parse(text)); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const char* kSmallSingleEr = R"({"name": "single-er", "rng_seed": 3, "replicates": 3,
  "parameters": {"n": 20, "m": 3, "q": [0.0, 0.1, 0.4], "seeds": 3}})";

TEST(Config, DefaultsAndOverrides) {
  const auto cfg = parse(R"({"name": "two-er"})");
  EXPECT_EQ(cfg.kind, ExperimentKind::kTwoEr);
  EXPECT_EQ(cfg.replicates, 10);
  EXPECT_EQ(cfg.threads, 1);
  EXPECT_EQ(cfg.two_er.n, 80);
  EXPECT_EQ(parse(R"({"name": "two-er", "scale": "paper"})").replicates, 50);
  EXPECT_EQ(parse(R"({"name": "theory-suite"})").replicates, 1);
  const auto s = parse(kSmallSingleEr);
  EXPECT_EQ(s.single_er.n, 20);
  EXPECT_EQ(s.single_er.q.size(), 3u);
  EXPECT_EQ(s.rng_seed, 3u);
  EXPECT_EQ(parse(R"({"name": "single-er"})").single_er.q.size(), 21u);
}

TEST(Config, Rejections) {
  const char* bad[] = {
      R"([])",
      R"({})",
      R"({"name": "triple-er"})",
      R"({"name": "single-er", "bogus": 1})",
      R"({"name": "single-er", "parameters": {"bogus": 1}})",
      R"({"name": "single-er", "parameters": {"p": 1.5}})",
      R"({"name": "single-er", "parameters": {"q": [0.1, -0.2]}})",
      R"({"name": "single-er", "parameters": {"q": []}})",
      R"({"name": "single-er", "replicates": 0})",
      R"({"name": "single-er", "threads": 0})",
      R"({"name": "single-er", "rng_seed": -1})",
      R"({"name": "single-er", "scale": "huge"})",
      R"({"name": "single-er", "parameters": {"n": 4, "seeds": 5}})",
      R"({"name": "single-er", "parameters": {"n": "ten"}})",
      R"({"name": "cosie-grid", "parameters": {"n": 5, "dim": 6}})",
      R"({"name": "cluster-pipeline", "parameters": {"scans": 5, "in_sample": 5}})",
      R"({"name": "connectome-surrogate", "parameters": {"modes": ["colour"]}})",
  };
  for (const char* text : bad) EXPECT_THROW(parse(text), ConfigError) << text;
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST(Harness, SingleErRowsAndMonotoneTrend) {
  const auto cfg = parse(kSmallSingleEr);
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.rows.size(), 9u);
  double clean = 0.0;
  for (const auto& r : result.rows) {
    EXPECT_EQ(r.experiment, "single-er");
    EXPECT_EQ(r.strategy, "coarse");
    ASSERT_TRUE(r.accuracy.has_value());
    EXPECT_GE(*r.accuracy, 0.0);
    EXPECT_LE(*r.accuracy, 1.0);
    if (r.param("q") == "0") clean += *r.accuracy;
  }
  EXPECT_DOUBLE_EQ(clean, 3.0);
  EXPECT_EQ(result.manifest.at("rows").get<int>(), 9);
  EXPECT_EQ(result.manifest.at("experiment").get<std::string>(), "single-er");
}

TEST(Harness, ByteIdenticalAcrossThreadCounts) {
  auto cfg = parse(kSmallSingleEr);
  const std::string one = results_csv(run_experiment(cfg).rows);
  cfg.threads = 3;
  EXPECT_EQ(results_csv(run_experiment(cfg).rows), one);
  cfg.rng_seed = 4;
  EXPECT_NE(results_csv(run_experiment(cfg).rows), one);

  auto two = parse(R"({"name": "two-er", "replicates": 2,
    "parameters": {"n": 20, "m1": 3, "m2": 5, "q": [0.1]}})");
  const std::string a = results_csv(run_experiment(two).rows);
  two.threads = 4;
  EXPECT_EQ(results_csv(run_experiment(two).rows), a);
}

TEST(Harness, CsvParseRoundTripAndValidation) {
  const auto rows = run_experiment(parse(kSmallSingleEr)).rows;
  const std::string csv = results_csv(rows);
  EXPECT_EQ(lines(csv).front(), "experiment,replicate,n,m,p,q,strategy,objective,accuracy,winner_class");
  std::istringstream in(csv);
  const auto back = parse_results_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(results_csv(back), csv);

  const auto reject = [](const std::string& text) {
    std::istringstream s(text);
    EXPECT_THROW(parse_results_csv(s), IoError) << text;
  };
  reject("");
  reject("experiment,replicate,strategy,objective,accuracy\n");
  reject("experiment,replicate,strategy,objective,accuracy,winner_class\nx,0,coarse,1\n");
  reject("experiment,replicate,strategy,objective,accuracy,winner_class\nx,0,coarse,1,1.5,\n");
  reject("experiment,replicate,strategy,objective,accuracy,winner_class\nx,0,coarse,-1,0.5,\n");
  reject("experiment,replicate,strategy,objective,accuracy,winner_class\nx,0,coarse,abc,0.5,\n");
  std::istringstream ok("experiment,replicate,check,strategy,objective,accuracy,winner_class\ntheory-suite,0,c,theory,-2,1,\n");
  EXPECT_EQ(parse_results_csv(ok).size(), 1u);
}

TEST(Harness, TimingColumnIsOptional) {
  const auto rows = run_experiment(parse(kSmallSingleEr)).rows;
  EXPECT_NE(lines(results_csv(rows, true)).front().find(",elapsed_ms"), std::string::npos);
  EXPECT_EQ(lines(results_csv(rows)).front().find("elapsed_ms"), std::string::npos);
}

TEST(Harness, WriteResultsAndUnwritablePath) {
  const fs::path dir = fs::temp_directory_path() / "cgm_harness_out";
  fs::remove_all(dir);
  const auto result = run_experiment(parse(kSmallSingleEr));
  write_results(result, dir / "nested");
  EXPECT_TRUE(fs::exists(dir / "nested" / "results.csv"));
  EXPECT_TRUE(fs::exists(dir / "nested" / "manifest.json"));
  // a regular file where a directory is expected
  detail::write_text(dir / "blocker", "x");
  EXPECT_THROW(write_results(result, dir / "blocker"), IoError);
  EXPECT_THROW(write_results(result, dir / "blocker" / "below"), IoError);
  fs::remove_all(dir);
}

TEST(PlotData, ObjectiveVsQ) {
  const auto rows = run_experiment(parse(kSmallSingleEr)).rows;
  const auto tables = emit_plot_data(rows, "objective-vs-q");
  ASSERT_EQ(tables.size(), 1u);
  EXPECT_EQ(tables[0].file_name, "objective_vs_q.csv");
  const auto l = lines(tables[0].csv);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "q,mean_objective,mean_accuracy");
  EXPECT_EQ(l[1].substr(0, 2), "0,");
  EXPECT_EQ(l[1].substr(l[1].size() - 2), ",1");

  const auto two = run_experiment(parse(R"({"name": "two-er", "replicates": 1,
    "parameters": {"n": 20, "m1": 3, "m2": 5, "q": [0.1, 0.2]}})"));
  EXPECT_EQ(two.rows.size(), 12u);
  const auto t2 = lines(emit_plot_data(two.rows, "objective-vs-q")[0].csv);
  EXPECT_EQ(t2[0], "class,strategy,q,mean_objective,mean_accuracy");
  EXPECT_EQ(t2.size(), 13u);
}

TEST(PlotData, CosieHeatmapLayout) {
  const auto result = run_experiment(parse(R"({"name": "cosie-grid", "replicates": 1,
    "parameters": {"n": 24, "dim": 3, "l_first": 2, "l_other": 1, "seeds": 3}})"));
  EXPECT_EQ(result.rows.size(), 36u);
  const auto tables = emit_plot_data(result.rows, "cosie-heatmap");
  ASSERT_EQ(tables.size(), 2u);
  for (const auto& t : tables) {
    const auto l = lines(t.csv);
    ASSERT_EQ(l.size(), 10u) << t.file_name;
    EXPECT_EQ(l[0], "row,2,3,4,5,6,7,8,9,10");
    for (std::size_t i = 1; i < l.size(); ++i) {
      std::vector<std::string> cells;
      std::istringstream in(l[i]);
      for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
      cells.resize(10);
      EXPECT_EQ(cells[0], std::to_string(i + 1));
      for (std::size_t j = 1; j < 10; ++j) EXPECT_EQ(cells[j].empty(), i == j) << t.file_name << " " << i << "," << j;
    }
  }
}

TEST(PlotData, ConnectomeMatrixLayout) {
  const auto result = run_experiment(parse(R"({"name": "connectome-surrogate",
    "parameters": {"n": 14, "modes": ["binary"], "seeds": 2, "sgm_max_iters": 5}})"));
  const auto tables = emit_plot_data(result.rows, "connectome-matrix");
  ASSERT_EQ(tables.size(), 2u);
  EXPECT_EQ(tables[0].file_name, "connectome_binary_objective.csv");
  const auto l = lines(tables[0].csv);
  ASSERT_EQ(l.size(), 138u);
  EXPECT_EQ(std::count(l[0].begin(), l[0].end(), ','), 15);
  EXPECT_EQ(l[136].substr(0, 10), "clustered,");
  EXPECT_EQ(l[137].substr(0, 7), "coarse,");
  const auto means = emit_plot_data(result.rows, "connectome-class-means");
  ASSERT_EQ(means.size(), 1u);
  EXPECT_EQ(lines(means[0].csv).size(), 16u);
}

TEST(PlotData, Errors) {
  const auto rows = run_experiment(parse(kSmallSingleEr)).rows;
  EXPECT_THROW(emit_plot_data(rows, "pie-chart"), InvalidArgument);
  EXPECT_THROW(emit_plot_data({}, "objective-vs-q"), InvalidArgument);
  EXPECT_THROW(emit_plot_data(rows, "cosie-heatmap"), InvalidArgument);
  EXPECT_EQ(plot_specs_for(ExperimentKind::kTheorySuite).size(), 0u);
}

TEST(Harness, TheorySuiteSmallRun) {
  const auto result = run_experiment(parse(R"({"name": "theory-suite",
    "parameters": {"instances": 20, "mc_draws": 2000, "normal_n": 40, "normal_reps": 200, "lemma_instances": 20}})"));
  std::set<std::string> checks;
  for (const auto& r : result.rows) {
    checks.insert(r.param("check"));
    EXPECT_EQ(r.strategy, "theory");
  }
  EXPECT_EQ(checks.size(), 13u);
  for (const auto& r : result.rows) {
    const auto& c = r.param("check");
    if (c.rfind("sbm-", 0) == 0 || c.find("violations") != std::string::npos) {
      EXPECT_EQ(*r.accuracy, 1.0) << c;
    }
  }
}

TEST(Harness, ClusterPipelineSmallRun) {
  const auto result = run_experiment(parse(R"({"name": "cluster-pipeline",
    "parameters": {"n": 30, "classes": 4, "scans": 4, "in_sample": 3, "q": 0.02, "seeds": 3}})"));
  ASSERT_EQ(result.rows.size(), 4u);
  for (const auto& r : result.rows) {
    EXPECT_EQ(r.param("ari"), "1");
    EXPECT_EQ(r.winner_class, detail::int_param(r, "out_class"));
  }
}

}  // namespace
}  // namespace cgm
