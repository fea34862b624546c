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

// Coarse, clustered, and fine matching of a shuffled graph against a
// vertex-aligned in-sample collection. Clustered matching also classifies the
// shuffled graph by the class mean it matches best.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/sgm.hpp"

namespace cgm {

// Fraction of vertices v with found(v) == truth(v). Seeded vertices count.
inline double match_accuracy(const Permutation& found, const Permutation& truth) {
  require(found.n() == truth.n(), "match_accuracy: size mismatch");
  require(found.n() > 0, "match_accuracy: empty permutation");
  int hits = 0;
  for (int v = 0; v < found.n(); ++v) hits += found(v) == truth(v);
  return static_cast<double>(hits) / found.n();
}

enum class Granularity { kCoarse, kClustered, kFine };

inline const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::kCoarse:
      return "coarse";
    case Granularity::kClustered:
      return "clustered";
    case Granularity::kFine:
      return "fine";
  }
  return "?";
}

struct GranularityReport {
  Granularity mode = Granularity::kCoarse;
  Permutation perm;
  double objective = 0.0;
  std::optional<double> accuracy;
  // Class index (clustered) or in-sample graph index (fine); 0 for coarse.
  int source = 0;
  MatchResult match;
};

struct ClassifiedMatch {
  std::vector<double> deltas;
  int winner = 0;
  Permutation perm;
  std::vector<MatchResult> per_class;
};

namespace detail {

inline std::optional<double> maybe_accuracy(const Permutation& found, const std::optional<Permutation>& truth) {
  if (!truth) return std::nullopt;
  return match_accuracy(found, *truth);
}

// Lowest index among the minima.
inline int argmin_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace detail

// Match r to a precomputed global mean.
inline GranularityReport coarse_match(const Graph& r, const WeightedMean& global_mean, const SeedSet& seeds,
                                      const SgmOptions& opts, const std::optional<Permutation>& truth = std::nullopt) {
  require(global_mean.n() == r.n(), "coarse_match: dimension mismatch");
  GranularityReport rep;
  rep.mode = Granularity::kCoarse;
  rep.match = sgm_match(r, global_mean, seeds, opts);
  rep.perm = rep.match.perm;
  rep.objective = rep.match.objective;
  rep.accuracy = detail::maybe_accuracy(rep.perm, truth);
  return rep;
}

inline GranularityReport coarse_match(const Graph& r, std::span<const Graph> in_sample, const SeedSet& seeds,
                                      const SgmOptions& opts, const std::optional<Permutation>& truth = std::nullopt) {
  require(!in_sample.empty(), "coarse_match: empty in-sample collection");
  return coarse_match(r, mean_graph(in_sample), seeds, opts, truth);
}

// Match r to each class mean; classify by the smallest objective.
inline ClassifiedMatch clustered_match(const Graph& r, std::span<const WeightedMean> class_means,
                                       const SeedSet& seeds, const SgmOptions& opts) {
  require(!class_means.empty(), "clustered_match: empty class list");
  ClassifiedMatch out;
  for (const WeightedMean& c : class_means) {
    require(c.n() == r.n(), "clustered_match: dimension mismatch");
    out.per_class.push_back(sgm_match(r, c, seeds, opts));
    out.deltas.push_back(out.per_class.back().objective);
  }
  out.winner = detail::argmin_lowest(out.deltas);
  out.perm = out.per_class[out.winner].perm;
  return out;
}

inline ClassifiedMatch clustered_match(const Graph& r, const std::vector<std::vector<Graph>>& classes,
                                       const SeedSet& seeds, const SgmOptions& opts) {
  require(!classes.empty(), "clustered_match: empty class list");
  std::vector<WeightedMean> means;
  means.reserve(classes.size());
  for (const auto& cls : classes) {
    require(!cls.empty(), "clustered_match: empty class");
    means.push_back(mean_graph(cls));
  }
  return clustered_match(r, std::span<const WeightedMean>(means), seeds, opts);
}

// Classes given by a labeling of one flat collection (e.g. from clustering).
inline ClassifiedMatch clustered_match(const Graph& r, std::span<const Graph> in_sample,
                                       std::span<const int> labels, int k, const SeedSet& seeds,
                                       const SgmOptions& opts) {
  require(in_sample.size() == labels.size(), "clustered_match: label count mismatch");
  std::vector<std::vector<Graph>> classes(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] < k, "clustered_match: label out of range");
    classes[labels[i]].push_back(in_sample[i]);
  }
  return clustered_match(r, classes, seeds, opts);
}

// Match r to every in-sample graph; report the best (lowest index on ties).
inline GranularityReport fine_match(const Graph& r, std::span<const Graph> in_sample, const SeedSet& seeds,
                                    const SgmOptions& opts, const std::optional<Permutation>& truth = std::nullopt,
                                    std::vector<MatchResult>* all = nullptr) {
  require(!in_sample.empty(), "fine_match: empty in-sample collection");
  std::vector<MatchResult> results;
  std::vector<double> objectives;
  for (const Graph& g : in_sample) {
    require(g.n() == r.n(), "fine_match: dimension mismatch");
    results.push_back(sgm_match(r, g, seeds, opts));
    objectives.push_back(results.back().objective);
  }
  GranularityReport rep;
  rep.mode = Granularity::kFine;
  rep.source = detail::argmin_lowest(objectives);
  rep.match = results[rep.source];
  rep.perm = rep.match.perm;
  rep.objective = rep.match.objective;
  rep.accuracy = detail::maybe_accuracy(rep.perm, truth);
  if (all) *all = std::move(results);
  return rep;
}

}  // namespace cgm
