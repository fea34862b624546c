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

// Configuration-driven experiment runner. Each experiment expands into a list
// of independent tasks, each with its own RNG stream, run on a worker pool and
// collected in task order, so output never depends on scheduling.

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cgm/clustering.hpp"
#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/instances.hpp"
#include "cgm/io.hpp"
#include "cgm/pipelines.hpp"
#include "cgm/random_models.hpp"
#include "cgm/rng.hpp"
#include "cgm/sgm.hpp"
#include "cgm/stats.hpp"
#include "cgm/theory.hpp"
#include "cgm/version.hpp"

namespace cgm {

using Json = nlohmann::ordered_json;

enum class ExperimentKind { kSingleEr, kTwoEr, kCosieGrid, kConnectomeSurrogate, kClusterPipeline, kTheorySuite };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kSingleEr:
      return "single-er";
    case ExperimentKind::kTwoEr:
      return "two-er";
    case ExperimentKind::kCosieGrid:
      return "cosie-grid";
    case ExperimentKind::kConnectomeSurrogate:
      return "connectome-surrogate";
    case ExperimentKind::kClusterPipeline:
      return "cluster-pipeline";
    case ExperimentKind::kTheorySuite:
      return "theory-suite";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::kSingleEr, ExperimentKind::kTwoEr, ExperimentKind::kCosieGrid,
                 ExperimentKind::kConnectomeSurrogate, ExperimentKind::kClusterPipeline,
                 ExperimentKind::kTheorySuite}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment name '" + name + "'");
}

// Reads typed values from a JSON object and rejects keys nobody asked for.
class ParamReader {
 public:
  ParamReader(const Json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_null() && !obj_.is_object()) throw ConfigError(context_ + ": parameters must be a JSON object");
  }

  double real(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(context_ + "." + key + ": expected a number");
    return v->get<double>();
  }

  double probability(const std::string& key, double fallback) {
    const double v = real(key, fallback);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(context_ + "." + key + ": probability must lie in [0,1]");
    return v;
  }

  int integer(const std::string& key, int fallback, int min_value) {
    const Json* v = find(key);
    int out = fallback;
    if (v) {
      if (!v->is_number_integer()) throw ConfigError(context_ + "." + key + ": expected an integer");
      out = v->get<int>();
    }
    if (out < min_value) {
      throw ConfigError(context_ + "." + key + ": must be at least " + std::to_string(min_value));
    }
    return out;
  }

  std::vector<double> probabilities(const std::string& key, std::vector<double> fallback) {
    const Json* v = find(key);
    if (v) {
      if (!v->is_array() || v->empty()) throw ConfigError(context_ + "." + key + ": expected a nonempty array");
      fallback.clear();
      for (const Json& x : *v) {
        if (!x.is_number()) throw ConfigError(context_ + "." + key + ": expected numbers");
        fallback.push_back(x.get<double>());
      }
    }
    for (double x : fallback) {
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(context_ + "." + key + ": probabilities must lie in [0,1]");
    }
    return fallback;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback,
                                   const std::set<std::string>& allowed) {
    const Json* v = find(key);
    if (v) {
      if (!v->is_array() || v->empty()) throw ConfigError(context_ + "." + key + ": expected a nonempty array");
      fallback.clear();
      for (const Json& x : *v) {
        if (!x.is_string()) throw ConfigError(context_ + "." + key + ": expected strings");
        fallback.push_back(x.get<std::string>());
      }
    }
    for (const auto& s : fallback) {
      if (!allowed.count(s)) throw ConfigError(context_ + "." + key + ": unsupported value '" + s + "'");
    }
    return fallback;
  }

  // Marks a key as consumed when the caller parsed it directly.
  void mark(const std::string& key) { used_.insert(key); }

  void finish() const {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) throw ConfigError(context_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  const Json* find(const std::string& key) {
    used_.insert(key);
    if (!obj_.is_object()) return nullptr;
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const Json& obj_;
  std::string context_;
  std::set<std::string> used_;
};

struct MatcherParams {
  int seeds = 5;
  int restarts = 1;
  int max_iters = 30;

  SgmOptions options(RngSeed rng) const {
    SgmOptions o;
    o.restarts = restarts;
    o.max_iters = max_iters;
    o.rng = rng;
    return o;
  }
};

inline MatcherParams read_matcher(ParamReader& r) {
  MatcherParams m;
  m.seeds = r.integer("seeds", 5, 0);
  m.restarts = r.integer("sgm_restarts", 1, 1);
  m.max_iters = r.integer("sgm_max_iters", 30, 1);
  return m;
}

inline std::vector<double> q_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= count; ++i) out.push_back(lo + step * i);
  return out;
}

struct SingleErParams {
  int n = 50;
  int m = 10;
  double p = 1.0 / 3.0;
  std::vector<double> q = q_grid(0.0, 0.5, 0.025);
  MatcherParams matcher;
};

struct TwoErParams {
  int n = 80;
  double p1 = 0.2;
  double p2 = 0.4;
  int m1 = 200;
  int m2 = 2000;
  std::vector<double> q{0.1, 0.2, 0.3, 0.4, 0.5};
  MatcherParams matcher;
};

struct CosieGridParams {
  int n = 100;
  int classes = 10;
  int dim = 10;
  double base_p = 0.5;
  double flip = 0.1;
  int l_first = 10;
  int l_other = 5;
  MatcherParams matcher;
};

struct SurrogateParams {
  int n = 70;
  int classes = 15;
  double p = 0.3;
  double q = 0.05;
  int scans = 10;
  int in_sample = 9;
  std::vector<std::string> modes{"binary", "weighted"};
  int embed_dim = 0;  // 0 selects the dimension by the scree elbow
  int max_dim = 30;
  int kmeans_restarts = 25;
  MatcherParams matcher;
};

struct TheorySuiteParams {
  int instances = 100;
  int max_n = 12;
  int mc_draws = 20000;
  int normal_n = 300;
  int normal_reps = 10000;
  int lemma_instances = 1000;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSingleEr;
  std::uint64_t rng_seed = 0;
  int replicates = 10;
  int threads = 1;
  std::string scale = "desk";
  bool record_timing = false;
  Json echo;  // the configuration as given

  SingleErParams single_er;
  TwoErParams two_er;
  CosieGridParams cosie;
  SurrogateParams surrogate;
  TheorySuiteParams theory;

  // Top-level keys: name, rng_seed, replicates, threads, scale
  // ("desk" | "paper"), record_timing, parameters.
  static ExperimentConfig from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig cfg;
    cfg.echo = j;
    ParamReader top(j, "config");
    const Json* name = j.contains("name") ? &j.at("name") : nullptr;
    if (!name || !name->is_string()) throw ConfigError("config.name: required string");
    cfg.kind = parse_experiment_kind(name->get<std::string>());
    top.mark("name");
    if (j.contains("rng_seed")) {
      const Json& s = j.at("rng_seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        throw ConfigError("config.rng_seed: expected a nonnegative integer");
      }
      cfg.rng_seed = s.get<std::uint64_t>();
    }
    top.mark("rng_seed");
    if (j.contains("scale")) {
      if (!j.at("scale").is_string()) throw ConfigError("config.scale: expected a string");
      cfg.scale = j.at("scale").get<std::string>();
    }
    top.mark("scale");
    if (cfg.scale != "desk" && cfg.scale != "paper") throw ConfigError("config.scale: expected \"desk\" or \"paper\"");
    const bool paper = cfg.scale == "paper";
    int default_reps = paper ? 50 : 10;
    if (cfg.kind == ExperimentKind::kConnectomeSurrogate || cfg.kind == ExperimentKind::kClusterPipeline ||
        cfg.kind == ExperimentKind::kTheorySuite) {
      default_reps = 1;
    }
    cfg.replicates = top.integer("replicates", default_reps, 1);
    cfg.threads = top.integer("threads", 1, 1);
    if (j.contains("record_timing")) {
      if (!j.at("record_timing").is_boolean()) throw ConfigError("config.record_timing: expected a boolean");
      cfg.record_timing = j.at("record_timing").get<bool>();
    }
    top.mark("record_timing");
    static const Json kEmpty = Json::object();
    const Json& params = j.contains("parameters") ? j.at("parameters") : kEmpty;
    top.mark("parameters");
    top.finish();

    ParamReader r(params, "parameters");
    switch (cfg.kind) {
      case ExperimentKind::kSingleEr: {
        auto& s = cfg.single_er;
        s.n = r.integer("n", s.n, 2);
        s.m = r.integer("m", s.m, 1);
        s.p = r.probability("p", s.p);
        s.q = r.probabilities("q", s.q);
        s.matcher = read_matcher(r);
        require_seeds(s.matcher, s.n);
        break;
      }
      case ExperimentKind::kTwoEr: {
        auto& s = cfg.two_er;
        s.n = r.integer("n", s.n, 2);
        s.p1 = r.probability("p1", s.p1);
        s.p2 = r.probability("p2", s.p2);
        s.m1 = r.integer("m1", s.m1, 1);
        s.m2 = r.integer("m2", s.m2, 1);
        s.q = r.probabilities("q", s.q);
        s.matcher = read_matcher(r);
        require_seeds(s.matcher, s.n);
        break;
      }
      case ExperimentKind::kCosieGrid: {
        auto& s = cfg.cosie;
        s.n = r.integer("n", s.n, 2);
        s.classes = r.integer("classes", s.classes, 3);
        s.dim = r.integer("dim", s.dim, 1);
        s.base_p = r.probability("base_p", s.base_p);
        s.flip = r.probability("flip", s.flip);
        s.l_first = r.integer("l_first", s.l_first, 1);
        s.l_other = r.integer("l_other", s.l_other, 1);
        s.matcher = read_matcher(r);
        require_seeds(s.matcher, s.n);
        if (s.dim > s.n) throw ConfigError("parameters.dim: must not exceed n");
        break;
      }
      case ExperimentKind::kConnectomeSurrogate:
      case ExperimentKind::kClusterPipeline: {
        auto& s = cfg.surrogate;
        s.n = r.integer("n", s.n, 2);
        s.classes = r.integer("classes", s.classes, 2);
        s.p = r.probability("p", s.p);
        s.q = r.probability("q", s.q);
        s.scans = r.integer("scans", s.scans, 2);
        s.in_sample = r.integer("in_sample", s.in_sample, 1);
        if (s.in_sample >= s.scans) throw ConfigError("parameters.in_sample: must be smaller than scans");
        if (cfg.kind == ExperimentKind::kConnectomeSurrogate) {
          s.modes = r.strings("modes", s.modes, {"binary", "weighted"});
        } else {
          s.embed_dim = r.integer("embed_dim", s.embed_dim, 0);
          s.max_dim = r.integer("max_dim", s.max_dim, 1);
          s.kmeans_restarts = r.integer("kmeans_restarts", s.kmeans_restarts, 1);
          const int total = s.classes * s.in_sample;
          if (s.max_dim > total) s.max_dim = total;
          if (s.embed_dim > total) throw ConfigError("parameters.embed_dim: exceeds the in-sample count");
        }
        s.matcher = read_matcher(r);
        require_seeds(s.matcher, s.n);
        break;
      }
      case ExperimentKind::kTheorySuite: {
        auto& s = cfg.theory;
        s.instances = r.integer("instances", s.instances, 1);
        s.max_n = r.integer("max_n", s.max_n, 3);
        s.mc_draws = r.integer("mc_draws", s.mc_draws, 2);
        s.normal_n = r.integer("normal_n", s.normal_n, 11);
        s.normal_reps = r.integer("normal_reps", s.normal_reps, 2);
        s.lemma_instances = r.integer("lemma_instances", s.lemma_instances, 1);
        break;
      }
    }
    r.finish();
    return cfg;
  }

  static ExperimentConfig from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
  }

 private:
  static void require_seeds(const MatcherParams& m, int n) {
    if (m.seeds > n) throw ConfigError("parameters.seeds: more seeds than vertices");
  }
};

struct ResultRow {
  std::string experiment;
  int replicate = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::string strategy;
  double objective = 0.0;
  std::optional<double> accuracy;
  std::optional<int> winner_class;
  std::int64_t elapsed_ms = 0;

  const std::string& param(const std::string& key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    throw InvalidArgument("ResultRow: no parameter '" + key + "'");
  }
  bool has_param(const std::string& key) const {
    for (const auto& kv : params) {
      if (kv.first == key) return true;
    }
    return false;
  }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

struct Task {
  std::function<std::vector<ResultRow>()> run;
};

// Runs tasks on up to `threads` workers; results are returned in task order.
inline std::vector<std::vector<ResultRow>> run_tasks(const std::vector<Task>& tasks, int threads) {
  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        results[i] = tasks[i].run();
      } catch (...) {
        errors[i] = std::current_exception();
        continue;
      }
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
      for (auto& row : results[i]) row.elapsed_ms = ms;
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

class MeanAccumulator {
 public:
  explicit MeanAccumulator(int n) : sum_(Matrix::Zero(n, n)) {}
  void add(const Matrix& m) {
    sum_ += m;
    count_ += 1.0;
  }
  void add(const Graph& g) { add(g.matrix()); }
  const Matrix& sum() const { return sum_; }
  double count() const { return count_; }
  WeightedMean mean() const {
    require(count_ > 0.0, "MeanAccumulator: no graphs added");
    return WeightedMean(sum_ / count_);
  }

 private:
  Matrix sum_;
  double count_ = 0.0;
};

inline RngSeed root_stream(const ExperimentConfig& cfg) { return RngSeed{cfg.rng_seed, 0}.split(to_string(cfg.kind)); }

inline ResultRow make_row(const ExperimentConfig& cfg, int rep, std::vector<std::pair<std::string, std::string>> params,
                          std::string strategy, double objective, std::optional<double> accuracy,
                          std::optional<int> winner = std::nullopt) {
  ResultRow row;
  row.experiment = to_string(cfg.kind);
  row.replicate = rep;
  row.params = std::move(params);
  row.strategy = std::move(strategy);
  row.objective = objective;
  row.accuracy = accuracy;
  row.winner_class = winner;
  return row;
}

inline std::vector<Task> single_er_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.single_er;
  std::vector<Task> tasks;
  const RngSeed root = root_stream(cfg);
  for (std::size_t qi = 0; qi < s.q.size(); ++qi) {
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      tasks.push_back({[&cfg, &s, qi, rep, root] {
        const double q = s.q[qi];
        const RngSeed rng = root.split(qi).split(static_cast<std::uint64_t>(rep));
        const Graph b = sample_er(s.n, s.p, rng.split("background"));
        MeanAccumulator acc(s.n);
        const RngSeed flips = rng.split("in-sample");
        for (int i = 0; i < s.m; ++i) acc.add(bitflip(b, q, flips.split(static_cast<std::uint64_t>(i))));
        const Graph a = bitflip(b, q, rng.split("out-of-sample"));
        const auto inst = shuffle_with_seeds(a, s.matcher.seeds, rng.split("shuffle"));
        const auto rep_out = coarse_match(inst.observed, acc.mean(), inst.seeds, s.matcher.options(rng.split("sgm")),
                                          inst.truth);
        return std::vector<ResultRow>{make_row(cfg, rep,
                                               {{"n", std::to_string(s.n)},
                                                {"m", std::to_string(s.m)},
                                                {"p", format_number(s.p)},
                                                {"q", format_number(q)}},
                                               "coarse", rep_out.objective, rep_out.accuracy)};
      }});
    }
  }
  return tasks;
}

inline std::vector<Task> two_er_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.two_er;
  std::vector<Task> tasks;
  const RngSeed root = root_stream(cfg);
  for (std::size_t qi = 0; qi < s.q.size(); ++qi) {
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      tasks.push_back({[&cfg, &s, qi, rep, root] {
        const double q = s.q[qi];
        const RngSeed rng = root.split(qi).split(static_cast<std::uint64_t>(rep));
        const std::array<Graph, 2> b{sample_er(s.n, s.p1, rng.split("background-1")),
                                     sample_er(s.n, s.p2, rng.split("background-2"))};
        const std::array<int, 2> m{s.m1, s.m2};
        std::vector<WeightedMean> class_means;
        Matrix total = Matrix::Zero(s.n, s.n);
        for (int c = 0; c < 2; ++c) {
          MeanAccumulator acc(s.n);
          const RngSeed flips = rng.split("in-sample").split(static_cast<std::uint64_t>(c));
          for (int i = 0; i < m[c]; ++i) acc.add(bitflip(b[c], q, flips.split(static_cast<std::uint64_t>(i))));
          total += acc.sum();
          class_means.push_back(acc.mean());
        }
        const WeightedMean global(total / static_cast<double>(s.m1 + s.m2));
        std::vector<ResultRow> rows;
        for (int c = 0; c < 2; ++c) {
          const RngSeed arng = rng.split("out-of-sample").split(static_cast<std::uint64_t>(c));
          const Graph a = bitflip(b[c], q, arng.split("flip"));
          const auto inst = shuffle_with_seeds(a, s.matcher.seeds, arng.split("shuffle"));
          const SgmOptions opts = s.matcher.options(arng.split("sgm"));
          const auto coarse = coarse_match(inst.observed, global, inst.seeds, opts, inst.truth);
          const auto classified = clustered_match(inst.observed, class_means, inst.seeds, opts);
          const std::vector<std::pair<std::string, std::string>> params{
              {"n", std::to_string(s.n)}, {"class", std::to_string(c + 1)}, {"q", format_number(q)}};
          rows.push_back(make_row(cfg, rep, params, "coarse", coarse.objective, coarse.accuracy));
          const auto& own = classified.per_class[c];
          const auto& other = classified.per_class[1 - c];
          rows.push_back(make_row(cfg, rep, params, "clustered", own.objective, match_accuracy(own.perm, inst.truth),
                                  classified.winner + 1));
          rows.push_back(
              make_row(cfg, rep, params, "misclustered", other.objective, match_accuracy(other.perm, inst.truth)));
        }
        return rows;
      }});
    }
  }
  return tasks;
}

inline std::vector<Task> cosie_grid_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.cosie;
  const RngSeed root = root_stream(cfg);
  // Backgrounds are drawn once per configuration; replicates redraw the
  // in-sample and out-of-sample graphs, the shuffle and the seeds.
  auto backgrounds = std::make_shared<std::vector<Graph>>();
  {
    std::vector<Graph> base;
    for (int i = 0; i < s.classes; ++i) base.push_back(sample_er(s.n, s.base_p, root.split("base").split(static_cast<std::uint64_t>(i))));
    const CosieSpec spec = mase_embed(base, s.dim);
    for (int i = 0; i < s.classes; ++i) {
      backgrounds->push_back(sample_cosie(spec, static_cast<std::size_t>(i), root.split("background").split(static_cast<std::uint64_t>(i))));
    }
  }
  std::vector<Task> tasks;
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    tasks.push_back({[&cfg, &s, rep, root, backgrounds] {
      const RngSeed rng = root.split("replicate").split(static_cast<std::uint64_t>(rep));
      const auto& bg = *backgrounds;
      std::vector<Matrix> sums;
      for (int i = 0; i < s.classes; ++i) {
        MeanAccumulator acc(s.n);
        const int count = i == 0 ? s.l_first : s.l_other;
        const RngSeed flips = rng.split("in-sample").split(static_cast<std::uint64_t>(i));
        for (int j = 0; j < count; ++j) acc.add(bitflip(bg[i], s.flip, flips.split(static_cast<std::uint64_t>(j))));
        sums.push_back(acc.sum());
      }
      const Graph a = bitflip(bg[0], s.flip, rng.split("out-of-sample"));
      const auto inst = shuffle_with_seeds(a, s.matcher.seeds, rng.split("shuffle"));
      std::vector<ResultRow> rows;
      const double denom = s.l_first + 2.0 * s.l_other;
      for (int ai = 1; ai < s.classes; ++ai) {
        for (int bi = ai + 1; bi < s.classes; ++bi) {
          const WeightedMean c((sums[0] + sums[ai] + sums[bi]) / denom);
          const auto res = coarse_match(inst.observed, c, inst.seeds,
                                        s.matcher.options(rng.split("sgm").split(static_cast<std::uint64_t>(ai * s.classes + bi))),
                                        inst.truth);
          rows.push_back(make_row(cfg, rep, {{"a", std::to_string(ai + 1)}, {"b", std::to_string(bi + 1)}}, "coarse",
                                  res.objective, res.accuracy));
        }
      }
      return rows;
    }});
  }
  return tasks;
}

// Surrogate connectome scans: per-class ER backgrounds, bit-flipped scans and,
// in weighted mode, a per-class positive weight field with per-scan jitter.
struct SurrogateData {
  std::vector<std::vector<Graph>> scans;  // [class][scan]
};

inline SurrogateData surrogate_scans(const SurrogateParams& s, const std::string& mode, RngSeed rng) {
  SurrogateData out;
  for (int c = 0; c < s.classes; ++c) {
    const RngSeed crng = rng.split("class").split(static_cast<std::uint64_t>(c));
    const Graph b = sample_er(s.n, s.p, crng.split("background"));
    Matrix field = Matrix::Zero(s.n, s.n);
    if (mode == "weighted") {
      CounterEngine eng(crng.split("weights"));
      for (int i = 0; i < s.n; ++i) {
        for (int j = i + 1; j < s.n; ++j) field(i, j) = field(j, i) = 0.5 + eng.uniform();
      }
    }
    std::vector<Graph> scans;
    for (int k = 0; k < s.scans; ++k) {
      const RngSeed srng = crng.split("scan").split(static_cast<std::uint64_t>(k));
      Graph g = bitflip(b, s.q, srng.split("flip"));
      if (mode == "weighted") {
        CounterEngine eng(srng.split("jitter"));
        Matrix w = Matrix::Zero(s.n, s.n);
        for (int i = 0; i < s.n; ++i) {
          for (int j = i + 1; j < s.n; ++j) {
            if (g(i, j) != 0.0) w(i, j) = w(j, i) = field(i, j) * (0.9 + 0.2 * eng.uniform());
          }
        }
        g = Graph::weighted(std::move(w));
      }
      scans.push_back(std::move(g));
    }
    out.scans.push_back(std::move(scans));
  }
  return out;
}

inline std::vector<Task> connectome_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.surrogate;
  const RngSeed root = root_stream(cfg);
  std::vector<Task> tasks;
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    for (const std::string& mode : s.modes) {
      for (int o = 0; o < s.classes; ++o) {
        tasks.push_back({[&cfg, &s, rep, mode, o, root] {
          // Every out-of-sample task regenerates the same scans from the
          // replicate stream; only the matching differs between tasks.
          const RngSeed rng = root.split("replicate").split(static_cast<std::uint64_t>(rep));
          const SurrogateData data = surrogate_scans(s, mode, rng.split(mode));
          std::vector<Graph> in_sample;
          std::vector<WeightedMean> class_means;
          for (const auto& cls : data.scans) {
            const std::vector<Graph> first(cls.begin(), cls.begin() + s.in_sample);
            class_means.push_back(mean_graph(first));
            in_sample.insert(in_sample.end(), first.begin(), first.end());
          }
          const RngSeed orng = rng.split(mode).split("match").split(static_cast<std::uint64_t>(o));
          const auto inst = shuffle_with_seeds(data.scans[o][s.in_sample], s.matcher.seeds, orng.split("shuffle"));
          const SgmOptions opts = s.matcher.options(orng.split("sgm"));
          std::vector<ResultRow> rows;
          auto params = [&](int source) {
            return std::vector<std::pair<std::string, std::string>>{
                {"mode", mode}, {"out_class", std::to_string(o)}, {"source", std::to_string(source)}};
          };
          std::vector<MatchResult> fine_all;
          fine_match(inst.observed, in_sample, inst.seeds, opts, inst.truth, &fine_all);
          for (std::size_t g = 0; g < fine_all.size(); ++g) {
            rows.push_back(make_row(cfg, rep, params(static_cast<int>(g)), "fine", fine_all[g].objective,
                                    match_accuracy(fine_all[g].perm, inst.truth)));
          }
          const auto classified = clustered_match(inst.observed, class_means, inst.seeds, opts);
          for (int c = 0; c < s.classes; ++c) {
            const auto& mr = classified.per_class[c];
            rows.push_back(make_row(cfg, rep, params(c), "class-mean", mr.objective, match_accuracy(mr.perm, inst.truth)));
          }
          const auto& own = classified.per_class[o];
          rows.push_back(make_row(cfg, rep, params(o), "clustered", own.objective, match_accuracy(own.perm, inst.truth),
                                  classified.winner));
          const auto coarse = coarse_match(inst.observed, mean_graph(in_sample), inst.seeds, opts, inst.truth);
          rows.push_back(make_row(cfg, rep, params(0), "coarse", coarse.objective, coarse.accuracy));
          return rows;
        }});
      }
    }
  }
  return tasks;
}

// In-sample scans are clustered without labels (distances, classical MDS,
// k-means); each out-of-sample scan is then classified by clustered matching
// against the discovered clusters.
inline std::vector<Task> cluster_pipeline_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.surrogate;
  const RngSeed root = root_stream(cfg);
  std::vector<Task> tasks;
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    tasks.push_back({[&cfg, &s, rep, root] {
      const RngSeed rng = root.split("replicate").split(static_cast<std::uint64_t>(rep));
      const SurrogateData data = surrogate_scans(s, "binary", rng.split("binary"));
      std::vector<Graph> in_sample;
      std::vector<int> truth_labels;
      for (int c = 0; c < s.classes; ++c) {
        for (int k = 0; k < s.in_sample; ++k) {
          in_sample.push_back(data.scans[c][k]);
          truth_labels.push_back(c);
        }
      }
      const DistanceMatrix d = pairwise_distances(in_sample);
      const int dim = s.embed_dim > 0 ? s.embed_dim : elbow_dimension(d, s.max_dim);
      const Matrix x = cmds_embed(d, dim);
      const Labeling found = kmeans(x, s.classes, s.kmeans_restarts, rng.split("kmeans"));
      const double ari = adjusted_rand_index(found, Labeling{truth_labels, s.classes});
      // Cluster -> true class by majority vote, lowest class on ties.
      std::vector<int> cluster_class(s.classes, -1);
      for (int k = 0; k < s.classes; ++k) {
        std::vector<int> votes(s.classes, 0);
        for (std::size_t i = 0; i < truth_labels.size(); ++i) {
          if (found.labels[i] == k) ++votes[truth_labels[i]];
        }
        cluster_class[k] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        if (votes[cluster_class[k]] == 0) cluster_class[k] = -1;
      }
      std::vector<ResultRow> rows;
      for (int o = 0; o < s.classes; ++o) {
        const RngSeed orng = rng.split("match").split(static_cast<std::uint64_t>(o));
        const auto inst = shuffle_with_seeds(data.scans[o][s.in_sample], s.matcher.seeds, orng.split("shuffle"));
        const auto classified = clustered_match(inst.observed, in_sample, std::span<const int>(found.labels),
                                                found.k, inst.seeds, s.matcher.options(orng.split("sgm")));
        rows.push_back(make_row(cfg, rep,
                                {{"out_class", std::to_string(o)},
                                 {"embed_dim", std::to_string(dim)},
                                 {"ari", format_number(ari)}},
                                "clustered", classified.deltas[classified.winner],
                                match_accuracy(classified.perm, inst.truth), cluster_class[classified.winner]));
      }
      return rows;
    }});
  }
  return tasks;
}

inline std::vector<Task> theory_suite_tasks(const ExperimentConfig& cfg) {
  const auto& s = cfg.theory;
  const RngSeed root = root_stream(cfg);
  std::vector<Task> tasks;
  auto check_row = [&cfg](int rep, const std::string& check, double value, bool ok) {
    return make_row(cfg, rep, {{"check", check}}, "theory", value, ok ? 1.0 : 0.0);
  };
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    const RngSeed rng = root.split("replicate").split(static_cast<std::uint64_t>(rep));
    tasks.push_back({[=] {
      const double a = 0.3, eps = 0.5, r = 0.1;
      Matrix l1(3, 3), l2(3, 3), l3(3, 3);
      l1 << a, r, r, r, r, r, r, r, r;
      l2 << r, r, r, r, a + eps, r, r, r, r;
      l3 << r, r, r, r, r, r, r, r, a + eps;
      const std::vector<Matrix> lambdas{l1, l2, l3};
      const std::vector<double> sizes{1, 1, 1}, flips{0.4, 0.1, 0.1};
      const Permutation id = Permutation::identity(3), swap(std::vector<int>{1, 0, 2});
      struct Case {
        const char* name;
        std::vector<double> m;
        const Permutation* sigma;
        double expected;
      };
      const Case cases[] = {{"sbm-unequal-identity", {1, 2, 0}, &id, 1.168533},
                            {"sbm-unequal-swap", {1, 2, 0}, &swap, 1.171733},
                            {"sbm-equal-identity", {1, 1, 1}, &id, 1.168533},
                            {"sbm-equal-swap", {1, 1, 1}, &swap, 1.164267}};
      std::vector<ResultRow> rows;
      for (const Case& c : cases) {
        const double v = expected_trace_sbm(lambdas, sizes, c.m, flips, 0.4, *c.sigma, 0);
        rows.push_back(check_row(rep, c.name, v, std::abs(v - c.expected) <= 1e-6));
      }
      return rows;
    }});
    tasks.push_back({[=] {
      int parity_bad = 0, ineq_bad = 0;
      for (int i = 0; i < s.instances; ++i) {
        const RngSeed irng = rng.split("appendix").split(static_cast<std::uint64_t>(i));
        const int n = 3 + static_cast<int>(CounterEngine(irng.split("n")).below(static_cast<std::uint64_t>(s.max_n - 2)));
        const GapInstance g = random_gap_instance(n, irng);
        const PatternCounts pc = pattern_counts(g.b1, g.b2, g.sigma);
        const auto N = [&](const char* bits) { return pc.at(bits); };
        const bool parity = N("0110") + N("0111") + N("0100") + N("0101") == N("1010") + N("1011") + N("1000") + N("1001") &&
                            N("0001") + N("1101") + N("1001") + N("0101") == N("0010") + N("1110") + N("1010") + N("0110");
        parity_bad += !parity;
        const std::vector<Graph> bg{g.b1, g.b2};
        const double gap = expected_gap(bg, {static_cast<double>(g.m1), static_cast<double>(g.m2)}, {g.p, g.p}, g.p,
                                        g.sigma, Permutation::identity(n));
        const bool lhs = g.m2 * (N("0110") + N("1110") - N("0101") - N("1101")) >
                         g.m1 * (N("0110") + N("0111") + N("0100") + N("0101"));
        ineq_bad += (gap > 0.0) != lhs;
      }
      return std::vector<ResultRow>{check_row(rep, "parity-violations", parity_bad, parity_bad == 0),
                                    check_row(rep, "inequality-violations", ineq_bad, ineq_bad == 0)};
    }});
    tasks.push_back({[=] {
      std::vector<ResultRow> rows;
      const int n = 30;
      const Graph b1 = sample_er(n, 0.5, rng.split("variance").split("b1"));
      const Graph b2 = sample_er(n, 0.5, rng.split("variance").split("b2"));
      const std::vector<Permutation> sigmas{
          Permutation(std::vector<int>{1, 0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21,
                                       22, 23, 24, 25, 26, 27, 28, 29}),
          cycle_permutation(n, 3), cycle_permutation(n, 5), cycle_permutation(n, 10),
          random_permutation(n, rng.split("variance").split("sigma"))};
      for (std::size_t k = 0; k < sigmas.size(); ++k) {
        const auto z = standardized_gap_samples(b1, b2, 5, 5, 0.3, sigmas[k], s.mc_draws,
                                                rng.split("variance").split(static_cast<std::uint64_t>(k)));
        const double ratio = sample_variance(z);
        rows.push_back(check_row(rep, "variance-ratio-" + std::to_string(k), ratio, std::abs(ratio - 1.0) <= 0.05));
      }
      return rows;
    }});
    tasks.push_back({[=] {
      const Graph b1 = sample_er(s.normal_n, 0.5, rng.split("normal").split("b1"));
      const Graph b2 = sample_er(s.normal_n, 0.5, rng.split("normal").split("b2"));
      const auto z = standardized_gap_samples(b1, b2, 5, 5, 0.2, cycle_permutation(s.normal_n, 10), s.normal_reps,
                                              rng.split("normal").split("samples"));
      const double ks = ks_distance_to_normal(z);
      return std::vector<ResultRow>{check_row(rep, "normality-ks", ks, ks <= 0.05)};
    }});
    tasks.push_back({[=] {
      int found = 0, violations = 0;
      for (std::uint64_t t = 0; found < s.lemma_instances; ++t) {
        const auto inst = lemma1_instance(rng.split("lemma").split(t));
        if (!inst) continue;
        ++found;
        violations += !lemma1_check(inst->r1, inst->rj, inst->q, inst->u, inst->p).conclusion_holds;
      }
      return std::vector<ResultRow>{check_row(rep, "lemma1-violations", violations, violations == 0)};
    }});
  }
  return tasks;
}

}  // namespace detail

struct ExperimentResult {
  std::vector<ResultRow> rows;
  Json manifest;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<detail::Task> tasks;
  switch (cfg.kind) {
    case ExperimentKind::kSingleEr:
      tasks = detail::single_er_tasks(cfg);
      break;
    case ExperimentKind::kTwoEr:
      tasks = detail::two_er_tasks(cfg);
      break;
    case ExperimentKind::kCosieGrid:
      tasks = detail::cosie_grid_tasks(cfg);
      break;
    case ExperimentKind::kConnectomeSurrogate:
      tasks = detail::connectome_tasks(cfg);
      break;
    case ExperimentKind::kClusterPipeline:
      tasks = detail::cluster_pipeline_tasks(cfg);
      break;
    case ExperimentKind::kTheorySuite:
      tasks = detail::theory_suite_tasks(cfg);
      break;
  }
  ExperimentResult out;
  for (auto& rows : detail::run_tasks(tasks, cfg.threads)) {
    for (auto& row : rows) out.rows.push_back(std::move(row));
  }
  out.manifest = Json::object();
  out.manifest["experiment"] = to_string(cfg.kind);
  out.manifest["version"] = kVersion;
  out.manifest["scale"] = cfg.scale;
  out.manifest["rng_seed"] = cfg.rng_seed;
  out.manifest["replicates"] = cfg.replicates;
  out.manifest["threads"] = cfg.threads;
  out.manifest["rows"] = out.rows.size();
  out.manifest["config"] = cfg.echo;
  return out;
}

// Header: experiment, replicate, parameter columns, strategy, objective,
// accuracy, winner_class and, when requested, elapsed_ms.
inline std::string results_csv(const std::vector<ResultRow>& rows, bool record_timing = false) {
  std::ostringstream out;
  std::vector<std::string> keys;
  if (!rows.empty()) {
    for (const auto& kv : rows.front().params) keys.push_back(kv.first);
  }
  out << "experiment,replicate";
  for (const auto& k : keys) out << ',' << k;
  out << ",strategy,objective,accuracy,winner_class";
  if (record_timing) out << ",elapsed_ms";
  out << '\n';
  for (const auto& row : rows) {
    require(row.params.size() == keys.size(), "results_csv: rows disagree on parameter columns");
    out << row.experiment << ',' << row.replicate;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      require(row.params[i].first == keys[i], "results_csv: rows disagree on parameter columns");
      out << ',' << row.params[i].second;
    }
    out << ',' << row.strategy << ',' << format_number(row.objective) << ',';
    if (row.accuracy) out << format_number(*row.accuracy);
    out << ',';
    if (row.winner_class) out << *row.winner_class;
    if (record_timing) out << ',' << row.elapsed_ms;
    out << '\n';
  }
  return out.str();
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoErrorCode::kOpenFailed, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(IoErrorCode::kWriteFailed, "write failed for " + path.string());
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(IoErrorCode::kOpenFailed, "cannot create output directory " + dir.string());
  }
}

}  // namespace detail

// Writes results.csv and manifest.json under dir.
inline void write_results(const ExperimentResult& result, const std::filesystem::path& dir, bool record_timing = false) {
  detail::ensure_directory(dir);
  detail::write_text(dir / "results.csv", results_csv(result.rows, record_timing));
  detail::write_text(dir / "manifest.json", result.manifest.dump(2) + "\n");
}

// Parses a results CSV and checks each row against the matching contracts:
// accuracy in [0,1] and, for matching strategies, a nonnegative objective.
inline std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(IoErrorCode::kMalformedHeader, "results: empty file");
  std::vector<std::string> header;
  for (const auto cell : detail::split(line, ',')) header.emplace_back(cell);
  const auto col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw IoError(IoErrorCode::kMalformedHeader, "results: missing column " + std::string(name));
  };
  const std::size_t c_exp = col("experiment"), c_rep = col("replicate"), c_strategy = col("strategy");
  const std::size_t c_obj = col("objective"), c_acc = col("accuracy"), c_win = col("winner_class");
  if (c_exp != 0 || c_rep != 1 || c_strategy < 2) throw IoError(IoErrorCode::kMalformedHeader, "results: bad column order");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string at = "results:" + std::to_string(lineno);
    const auto cells = detail::split(line, ',');
    if (cells.size() != header.size()) throw IoError(IoErrorCode::kMalformedRow, at + ": wrong number of cells");
    ResultRow row;
    row.experiment = std::string(cells[c_exp]);
    row.replicate = static_cast<int>(detail::parse_index(cells[c_rep], at));
    for (std::size_t i = 2; i < c_strategy; ++i) row.params.emplace_back(header[i], std::string(cells[i]));
    row.strategy = std::string(cells[c_strategy]);
    row.objective = detail::parse_double(cells[c_obj], at);
    if (!cells[c_acc].empty()) row.accuracy = detail::parse_double(cells[c_acc], at);
    if (!cells[c_win].empty()) row.winner_class = static_cast<int>(detail::parse_index(cells[c_win], at));
    if (row.accuracy && !(*row.accuracy >= 0.0 && *row.accuracy <= 1.0)) {
      throw IoError(IoErrorCode::kBadValue, at + ": accuracy outside [0,1]");
    }
    if (row.strategy != "theory" && row.objective < 0.0) {
      throw IoError(IoErrorCode::kBadValue, at + ": negative matching objective");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct PlotTable {
  std::string file_name;
  std::string csv;
};

namespace detail {

struct CellMean {
  double objective = 0.0;
  double accuracy = 0.0;
  int count = 0;
  void add(const ResultRow& r) {
    objective += r.objective;
    accuracy += r.accuracy.value_or(0.0);
    ++count;
  }
  double mean_objective() const { return objective / count; }
  double mean_accuracy() const { return accuracy / count; }
};

inline PlotTable matrix_table(std::string name, const std::vector<std::string>& row_labels,
                              const std::vector<std::string>& col_labels,
                              const std::function<std::optional<double>(std::size_t, std::size_t)>& cell) {
  std::ostringstream out;
  out << "row";
  for (const auto& c : col_labels) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    out << row_labels[i];
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
      out << ',';
      if (const auto v = cell(i, j)) out << format_number(*v);
    }
    out << '\n';
  }
  return {std::move(name), out.str()};
}

inline int int_param(const ResultRow& r, const std::string& key) {
  return static_cast<int>(parse_index(r.param(key), "row parameter " + key));
}

}  // namespace detail

// Tidy tables for external plotting. Specs: "objective-vs-q" (single-er,
// two-er), "cosie-heatmap", "connectome-matrix" and "connectome-class-means".
inline std::vector<PlotTable> emit_plot_data(const std::vector<ResultRow>& rows, const std::string& spec) {
  require(!rows.empty(), "emit_plot_data: no rows");
  std::vector<PlotTable> out;
  if (spec == "objective-vs-q") {
    require(rows.front().has_param("q"), "emit_plot_data: objective-vs-q needs a q column");
    const bool by_class = rows.front().has_param("class");
    std::vector<std::string> order;
    std::map<std::string, detail::CellMean> cells;
    for (const auto& r : rows) {
      const std::string key = (by_class ? r.param("class") + "," + r.strategy + "," : std::string()) + r.param("q");
      if (!cells.count(key)) order.push_back(key);
      cells[key].add(r);
    }
    std::ostringstream csv;
    csv << (by_class ? "class,strategy," : "") << "q,mean_objective,mean_accuracy\n";
    for (const auto& key : order) {
      const auto& c = cells[key];
      csv << key << ',' << format_number(c.mean_objective()) << ',' << format_number(c.mean_accuracy()) << '\n';
    }
    out.push_back({"objective_vs_q.csv", csv.str()});
  } else if (spec == "cosie-heatmap") {
    int top = 0;
    std::map<std::pair<int, int>, detail::CellMean> cells;
    for (const auto& r : rows) {
      int a = detail::int_param(r, "a"), b = detail::int_param(r, "b");
      if (a > b) std::swap(a, b);
      cells[{a, b}].add(r);
      top = std::max(top, b);
    }
    std::vector<std::string> labels;
    for (int v = 2; v <= top; ++v) labels.push_back(std::to_string(v));
    auto lookup = [&](std::size_t i, std::size_t j) -> const detail::CellMean* {
      if (i == j) return nullptr;
      const int a = static_cast<int>(std::min(i, j)) + 2, b = static_cast<int>(std::max(i, j)) + 2;
      const auto it = cells.find({a, b});
      return it == cells.end() ? nullptr : &it->second;
    };
    out.push_back(detail::matrix_table("cosie_objective.csv", labels, labels, [&](std::size_t i, std::size_t j) {
      const auto* c = lookup(i, j);
      return c ? std::optional<double>(c->mean_objective()) : std::nullopt;
    }));
    out.push_back(detail::matrix_table("cosie_error.csv", labels, labels, [&](std::size_t i, std::size_t j) {
      const auto* c = lookup(i, j);
      return c ? std::optional<double>(1.0 - c->mean_accuracy()) : std::nullopt;
    }));
  } else if (spec == "connectome-matrix" || spec == "connectome-class-means") {
    std::vector<std::string> modes;
    for (const auto& r : rows) {
      if (std::find(modes.begin(), modes.end(), r.param("mode")) == modes.end()) modes.push_back(r.param("mode"));
    }
    for (const auto& mode : modes) {
      int classes = 0, fine = 0;
      std::map<std::tuple<std::string, int, int>, detail::CellMean> cells;
      for (const auto& r : rows) {
        if (r.param("mode") != mode) continue;
        const int o = detail::int_param(r, "out_class"), src = detail::int_param(r, "source");
        classes = std::max(classes, o + 1);
        if (r.strategy == "fine") fine = std::max(fine, src + 1);
        cells[{r.strategy, src, o}].add(r);
      }
      std::vector<std::string> cols;
      for (int o = 0; o < classes; ++o) cols.push_back("out" + std::to_string(o));
      if (spec == "connectome-matrix") {
        std::vector<std::string> labels;
        std::vector<std::pair<std::string, int>> keys;
        for (int g = 0; g < fine; ++g) {
          labels.push_back("fine" + std::to_string(g));
          keys.emplace_back("fine", g);
        }
        labels.push_back("clustered");
        keys.emplace_back("clustered", -1);
        labels.push_back("coarse");
        keys.emplace_back("coarse", 0);
        auto lookup = [&](std::size_t i, std::size_t j) -> const detail::CellMean* {
          const int o = static_cast<int>(j);
          const int src = keys[i].second < 0 ? o : keys[i].second;
          const auto it = cells.find({keys[i].first, src, o});
          return it == cells.end() ? nullptr : &it->second;
        };
        out.push_back(detail::matrix_table("connectome_" + mode + "_objective.csv", labels, cols,
                                           [&](std::size_t i, std::size_t j) {
                                             const auto* c = lookup(i, j);
                                             return c ? std::optional<double>(c->mean_objective()) : std::nullopt;
                                           }));
        out.push_back(detail::matrix_table("connectome_" + mode + "_error.csv", labels, cols,
                                           [&](std::size_t i, std::size_t j) {
                                             const auto* c = lookup(i, j);
                                             return c ? std::optional<double>(1.0 - c->mean_accuracy()) : std::nullopt;
                                           }));
      } else {
        std::vector<std::string> labels;
        for (int c = 0; c < classes; ++c) labels.push_back("class" + std::to_string(c));
        out.push_back(detail::matrix_table("connectome_" + mode + "_class_means.csv", labels, cols,
                                           [&](std::size_t i, std::size_t j) {
                                             const auto it = cells.find({"class-mean", static_cast<int>(i), static_cast<int>(j)});
                                             return it == cells.end() ? std::nullopt
                                                                      : std::optional<double>(it->second.mean_objective());
                                           }));
      }
    }
  } else {
    throw InvalidArgument("emit_plot_data: unknown spec '" + spec + "'");
  }
  return out;
}

// Plot specs that apply to an experiment's rows.
inline std::vector<std::string> plot_specs_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSingleEr:
    case ExperimentKind::kTwoEr:
      return {"objective-vs-q"};
    case ExperimentKind::kCosieGrid:
      return {"cosie-heatmap"};
    case ExperimentKind::kConnectomeSurrogate:
      return {"connectome-matrix", "connectome-class-means"};
    default:
      return {};
  }
}

inline void write_plot_data(const std::vector<PlotTable>& tables, const std::filesystem::path& dir) {
  detail::ensure_directory(dir);
  for (const auto& t : tables) detail::write_text(dir / t.file_name, t.csv);
}

}  // namespace cgm
