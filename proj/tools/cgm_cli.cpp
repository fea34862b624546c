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

// Command-line front end. Exit codes: 0 success, 2 configuration or usage
// error, 3 I/O error, 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgm/cgm.hpp"
#include "cgm/harness.hpp"
#include "cgm/io.hpp"

namespace fs = std::filesystem;
using cgm::Json;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct Globals {
  std::uint64_t rng_seed = 0;
  int threads = 1;
  std::string out = ".";
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw cgm::ConfigError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw cgm::ConfigError(std::string(what) + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_list(text, what)) {
    if (v != static_cast<int>(v)) throw cgm::ConfigError(std::string(what) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// "t:r,t:r,..." pairs of target and reference vertices.
cgm::SeedSet parse_seed_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  if (text.empty()) return cgm::SeedSet(pairs);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw cgm::ConfigError("--seed-pairs: expected t:r entries");
    try {
      pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw cgm::ConfigError("--seed-pairs: cannot parse '" + item + "'");
    }
  }
  return cgm::SeedSet(std::move(pairs));
}

fs::path output_path(const Globals& g, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute() || p.has_parent_path()) return p;
  std::error_code ec;
  fs::create_directories(g.out, ec);
  return fs::path(g.out) / p;
}

void write_json(const Globals& g, const std::string& name, const Json& j) {
  const fs::path path = output_path(g, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cgm::IoError(cgm::IoErrorCode::kOpenFailed, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw cgm::IoError(cgm::IoErrorCode::kWriteFailed, "write failed for " + path.string());
  std::cout << path.string() << '\n';
}

Json match_json(const cgm::MatchResult& r) {
  Json j;
  j["perm"] = r.perm.map();
  j["objective"] = r.objective;
  j["trace"] = r.trace_value;
  j["iterations"] = r.iters;
  j["converged"] = r.converged;
  return j;
}

std::vector<cgm::Graph> load_all(const std::vector<std::string>& paths) {
  std::vector<cgm::Graph> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(cgm::load_graph(p));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered graph matching: generate, flip, match, cluster, theory checks and experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--rng-seed", g.rng_seed, "Root RNG seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a random graph");
  std::string model = "er", sizes_text, lambda_text, gen_output = "graph.csv";
  int gen_n = 50;
  double gen_p = 0.5;
  gen->add_option("--model", model, "er or sbm")->check(CLI::IsMember({"er", "sbm"}));
  gen->add_option("--n", gen_n, "Vertex count (er)")->check(CLI::PositiveNumber);
  gen->add_option("--p", gen_p, "Edge probability (er)");
  gen->add_option("--sizes", sizes_text, "Comma-separated block sizes (sbm)");
  gen->add_option("--lambda", lambda_text, "Row-major KxK block probabilities (sbm)");
  gen->add_option("-o,--output", gen_output, "Output graph file (.csv dense, .tsv edge list)");

  // flip
  auto* flip = app.add_subcommand("flip", "Bit-flip a binary graph");
  std::string flip_input, flip_output = "flipped.csv";
  double flip_p = 0.1;
  flip->add_option("-i,--input", flip_input, "Input graph file")->required();
  flip->add_option("--p", flip_p, "Flip probability");
  flip->add_option("-o,--output", flip_output, "Output graph file");

  // match
  auto* match = app.add_subcommand("match", "Seeded graph matching of a target against references");
  std::string target_path, seed_text, labels_text, match_mode = "single", match_output = "match.json";
  std::vector<std::string> reference_paths;
  int restarts = 1, max_iters = 30;
  match->add_option("-t,--target", target_path, "Target (out-of-sample) graph")->required();
  match->add_option("-r,--reference", reference_paths, "Reference graph(s)")->required();
  match->add_option("--mode", match_mode, "single, coarse, clustered or fine")
      ->check(CLI::IsMember({"single", "coarse", "clustered", "fine"}));
  match->add_option("--labels", labels_text, "Class label per reference (clustered mode)");
  match->add_option("--seed-pairs", seed_text, "Seeds as t:r,t:r,...");
  match->add_option("--restarts", restarts, "Frank-Wolfe restarts")->check(CLI::PositiveNumber);
  match->add_option("--max-iters", max_iters, "Frank-Wolfe iterations per restart")->check(CLI::PositiveNumber);
  match->add_option("-o,--output", match_output, "Output JSON file");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster graphs by Frobenius distance, classical MDS and k-means");
  std::vector<std::string> cluster_inputs;
  std::string truth_text, cluster_output = "clusters.json";
  int k = 2, dim = 0, kmeans_restarts = 25;
  cluster->add_option("-i,--input", cluster_inputs, "Graph files")->required();
  cluster->add_option("-k,--clusters", k, "Number of clusters")->check(CLI::PositiveNumber);
  cluster->add_option("--dim", dim, "Embedding dimension (0 selects by scree elbow)");
  cluster->add_option("--restarts", kmeans_restarts, "k-means restarts")->check(CLI::PositiveNumber);
  cluster->add_option("--truth", truth_text, "Comma-separated true labels for an ARI report");
  cluster->add_option("-o,--output", cluster_output, "Output JSON file");

  // theory
  auto* theory = app.add_subcommand("theory", "Exact moment calculators");
  std::string theory_what = "sbm-example", b1_path, b2_path, sigma_text, theory_output = "theory.json";
  int m1 = 5, m2 = 5, samples = 0;
  double theory_p = 0.3;
  theory->add_option("what", theory_what, "sbm-example or gap")->check(CLI::IsMember({"sbm-example", "gap"}));
  theory->add_option("--b1", b1_path, "First background (gap)");
  theory->add_option("--b2", b2_path, "Second background (gap)");
  theory->add_option("--m1", m1, "In-sample count of class 1 (gap)");
  theory->add_option("--m2", m2, "In-sample count of class 2 (gap)");
  theory->add_option("--p", theory_p, "Flip probability (gap)");
  theory->add_option("--sigma", sigma_text, "Relative shuffle as a comma-separated image list (gap)");
  theory->add_option("--samples", samples, "Also simulate this many standardized gaps (gap)");
  theory->add_option("-o,--output", theory_output, "Output JSON file");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  std::string config_path;
  bool no_plots = false;
  experiment->add_option("-c,--config", config_path, "JSON experiment config")->required();
  experiment->add_flag("--no-plots", no_plots, "Skip plot tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    const cgm::RngSeed root{g.rng_seed, 0};
    if (*gen) {
      cgm::Graph out;
      if (model == "er") {
        if (!(gen_p >= 0.0 && gen_p <= 1.0)) throw cgm::ConfigError("--p must lie in [0,1]");
        out = cgm::sample_er(gen_n, gen_p, root.split("gen"));
      } else {
        if (sizes_text.empty() || lambda_text.empty()) throw cgm::ConfigError("sbm needs --sizes and --lambda");
        const std::vector<int> sizes = parse_int_list(sizes_text, "--sizes");
        const std::vector<double> lam = parse_list(lambda_text, "--lambda");
        const auto kb = static_cast<Eigen::Index>(sizes.size());
        if (static_cast<Eigen::Index>(lam.size()) != kb * kb) throw cgm::ConfigError("--lambda must have K*K entries");
        cgm::Matrix l(kb, kb);
        for (Eigen::Index a = 0; a < kb; ++a) {
          for (Eigen::Index b = 0; b < kb; ++b) l(a, b) = lam[a * kb + b];
        }
        out = cgm::sample_sbm(cgm::SbmSpec(sizes, l), root.split("gen"));
      }
      const fs::path path = output_path(g, gen_output);
      cgm::save_graph(out, path);
      std::cout << path.string() << '\n';
    } else if (*flip) {
      if (!(flip_p >= 0.0 && flip_p <= 1.0)) throw cgm::ConfigError("--p must lie in [0,1]");
      const cgm::Graph in = cgm::load_graph(flip_input);
      const fs::path path = output_path(g, flip_output);
      cgm::save_graph(cgm::bitflip(in, flip_p, root.split("flip")), path);
      std::cout << path.string() << '\n';
    } else if (*match) {
      const cgm::Graph target = cgm::load_graph(target_path);
      const std::vector<cgm::Graph> refs = load_all(reference_paths);
      const cgm::SeedSet seeds = parse_seed_pairs(seed_text);
      cgm::SgmOptions opts;
      opts.restarts = restarts;
      opts.max_iters = max_iters;
      opts.rng = root.split("match");
      Json j;
      j["mode"] = match_mode;
      if (match_mode == "single") {
        if (refs.size() != 1) throw cgm::ConfigError("single mode takes exactly one reference");
        j["match"] = match_json(cgm::sgm_match(target, refs.front(), seeds, opts));
      } else if (match_mode == "coarse") {
        j["match"] = match_json(cgm::coarse_match(target, refs, seeds, opts).match);
      } else if (match_mode == "fine") {
        std::vector<cgm::MatchResult> all;
        const auto rep = cgm::fine_match(target, refs, seeds, opts, std::nullopt, &all);
        j["best_reference"] = rep.source;
        j["match"] = match_json(rep.match);
        j["objectives"] = Json::array();
        for (const auto& r : all) j["objectives"].push_back(r.objective);
      } else {
        if (labels_text.empty()) throw cgm::ConfigError("clustered mode needs --labels");
        const std::vector<int> labels = parse_int_list(labels_text, "--labels");
        if (labels.size() != refs.size()) throw cgm::ConfigError("--labels must give one label per reference");
        const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
        const auto cm = cgm::clustered_match(target, refs, labels, classes, seeds, opts);
        j["winner"] = cm.winner;
        j["deltas"] = cm.deltas;
        j["match"] = match_json(cm.per_class[cm.winner]);
      }
      write_json(g, match_output, j);
    } else if (*cluster) {
      const std::vector<cgm::Graph> gs = load_all(cluster_inputs);
      if (static_cast<int>(gs.size()) < k) throw cgm::ConfigError("fewer graphs than clusters");
      const cgm::DistanceMatrix d = cgm::pairwise_distances(gs);
      const int used_dim = dim > 0 ? dim : cgm::elbow_dimension(d, std::min(d.m(), 30));
      const cgm::Labeling lab = cgm::kmeans(cgm::cmds_embed(d, used_dim), k, kmeans_restarts, root.split("cluster"));
      Json j;
      j["dim"] = used_dim;
      j["labels"] = lab.labels;
      if (!truth_text.empty()) {
        const std::vector<int> truth = parse_int_list(truth_text, "--truth");
        if (truth.size() != gs.size()) throw cgm::ConfigError("--truth must give one label per graph");
        const int tk = *std::max_element(truth.begin(), truth.end()) + 1;
        j["ari"] = cgm::adjusted_rand_index(lab, cgm::Labeling{truth, tk});
      }
      write_json(g, cluster_output, j);
    } else if (*theory) {
      Json j;
      if (theory_what == "sbm-example") {
        const double a = 0.3, eps = 0.5, r = 0.1;
        cgm::Matrix l1(3, 3), l2(3, 3), l3(3, 3);
        l1 << a, r, r, r, r, r, r, r, r;
        l2 << r, r, r, r, a + eps, r, r, r, r;
        l3 << r, r, r, r, r, r, r, r, a + eps;
        const std::vector<cgm::Matrix> lambdas{l1, l2, l3};
        const cgm::Permutation id = cgm::Permutation::identity(3), swap(std::vector<int>{1, 0, 2});
        const std::vector<double> sizes{1, 1, 1}, flips{0.4, 0.1, 0.1};
        for (const auto& [name, counts] : std::vector<std::pair<std::string, std::vector<double>>>{
                 {"m2=2m1,m3=0", {1, 2, 0}}, {"m1=m2=m3", {1, 1, 1}}}) {
          j[name]["identity"] = cgm::expected_trace_sbm(lambdas, sizes, counts, flips, 0.4, id, 0);
          j[name]["swap12"] = cgm::expected_trace_sbm(lambdas, sizes, counts, flips, 0.4, swap, 0);
        }
      } else {
        if (b1_path.empty() || b2_path.empty() || sigma_text.empty()) {
          throw cgm::ConfigError("gap needs --b1, --b2 and --sigma");
        }
        const cgm::Graph b1 = cgm::load_graph(b1_path), b2 = cgm::load_graph(b2_path);
        const cgm::Permutation sigma(parse_int_list(sigma_text, "--sigma"));
        const auto mom = cgm::exact_gap_variance(b1, b2, m1, m2, theory_p, sigma);
        j["mean"] = mom.mean;
        j["variance"] = mom.variance;
        j["k_shuffled"] = mom.k_shuffled;
        const auto pc = cgm::pattern_counts(b1, b2, sigma);
        for (int x = 0; x < 16; ++x) {
          std::string bits;
          for (int b = 3; b >= 0; --b) bits += ((x >> b) & 1) ? '1' : '0';
          j["pattern_counts"][bits] = pc[x];
        }
        if (samples > 0) {
          const auto z = cgm::standardized_gap_samples(b1, b2, m1, m2, theory_p, sigma, samples, root.split("theory"));
          j["samples"]["count"] = samples;
          j["samples"]["mean"] = cgm::sample_mean(z);
          j["samples"]["variance"] = cgm::sample_variance(z);
          j["samples"]["ks_distance"] = cgm::ks_distance_to_normal(z);
        }
      }
      write_json(g, theory_output, j);
    } else if (*experiment) {
      Json cfg_json;
      {
        std::ifstream in(config_path);
        if (!in) throw cgm::ConfigError("cannot open config file " + config_path);
        try {
          cfg_json = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw cgm::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
      }
      if (!cfg_json.is_object()) throw cgm::ConfigError("config must be a JSON object");
      if (app.get_option("--rng-seed")->count()) cfg_json["rng_seed"] = g.rng_seed;
      if (app.get_option("--threads")->count()) cfg_json["threads"] = g.threads;
      const cgm::ExperimentConfig cfg = cgm::ExperimentConfig::from_json(cfg_json);
      const cgm::ExperimentResult result = cgm::run_experiment(cfg);
      const fs::path dir(g.out);
      cgm::write_results(result, dir, cfg.record_timing);
      if (!no_plots) {
        for (const auto& spec : cgm::plot_specs_for(cfg.kind)) {
          cgm::write_plot_data(cgm::emit_plot_data(result.rows, spec), dir);
        }
      }
      std::cout << (dir / "results.csv").string() << '\n';
    }
  } catch (const cgm::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const cgm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const cgm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
