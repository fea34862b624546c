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

// Random instance generators shared by the theory suite and the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "cgm/graph.hpp"
#include "cgm/random_models.hpp"
#include "cgm/rng.hpp"
#include "cgm/sgm.hpp"
#include "cgm/theory.hpp"

namespace cgm {

// An out-of-sample graph shuffled by a random permutation, with the hidden
// target-to-reference map and s seed pairs drawn from a second shuffle.
struct ShuffledInstance {
  Graph observed;
  Permutation truth;
  SeedSet seeds;
};

inline ShuffledInstance shuffle_with_seeds(const Graph& a, int s, RngSeed rng) {
  const int n = a.n();
  require(s >= 0 && s <= n, "shuffle_with_seeds: seed count out of range");
  const Permutation shuffle = random_permutation(n, rng.split("shuffle"));
  const Permutation order = random_permutation(n, rng.split("seeds"));
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(s);
  for (int k = 0; k < s; ++k) pairs.emplace_back(shuffle(order(k)), order(k));
  return {permute_graph(a, shuffle), shuffle.inverse(), SeedSet(std::move(pairs))};
}

// Two binary backgrounds, class sizes, a flip rate and a relative shuffle.
struct GapInstance {
  Graph b1;
  Graph b2;
  int m1 = 1;
  int m2 = 1;
  double p = 0.25;
  Permutation sigma;
};

inline GapInstance random_gap_instance(int n, RngSeed rng) {
  CounterEngine eng(rng.split("params"));
  GapInstance inst;
  inst.b1 = sample_er(n, 0.2 + 0.6 * eng.uniform(), rng.split("b1"));
  inst.b2 = sample_er(n, 0.2 + 0.6 * eng.uniform(), rng.split("b2"));
  inst.m1 = 1 + static_cast<int>(eng.below(20));
  inst.m2 = 1 + static_cast<int>(eng.below(20));
  inst.p = 0.05 + 0.4 * eng.uniform();
  inst.sigma = random_permutation(n, rng.split("sigma"));
  return inst;
}

// The k-cycle 0 -> 1 -> ... -> k-1 -> 0 on n vertices.
inline Permutation cycle_permutation(int n, int k) {
  require(k >= 1 && k <= n, "cycle_permutation: cycle length out of range");
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  for (int i = 0; i < k; ++i) m[i] = (i + 1) % k;
  return Permutation(std::move(m));
}

struct Lemma1Instance {
  Matrix r1;
  Matrix rj;
  Permutation q;
  Matrix u;
  Permutation p;
};

// Equal blocks with normalized indicator columns (optionally perturbed and
// re-orthonormalized), a block permutation induced by q with a few vertex
// swaps, sorted r1 and rj[k] = t[q(k)] for sorted t. Returns nullopt when the
// draw does not satisfy the hypothesis of lemma1_check.
inline std::optional<Lemma1Instance> lemma1_instance(RngSeed rng, int max_d = 4, int max_block = 10) {
  CounterEngine eng(rng);
  const int d = 2 + static_cast<int>(eng.below(static_cast<std::uint64_t>(max_d - 1)));
  const int bs = 2 + static_cast<int>(eng.below(static_cast<std::uint64_t>(max_block - 1)));
  const int n = d * bs;

  Matrix u = Matrix::Zero(n, d);
  for (int i = 0; i < n; ++i) u(i, i / bs) = 1.0 / std::sqrt(static_cast<double>(bs));
  if (eng.bernoulli(0.5)) {
    const double scale = 0.05 * eng.uniform();
    for (Eigen::Index k = 0; k < u.size(); ++k) u.data()[k] += scale * eng.normal();
    Eigen::HouseholderQR<Matrix> qr(u);
    Matrix thin = qr.householderQ() * Matrix::Identity(n, d);
    for (int c = 0; c < d; ++c) {
      if (thin.col(c).dot(u.col(c)) < 0.0) thin.col(c) *= -1.0;
    }
    u = std::move(thin);
  }

  Permutation q = random_permutation(d, rng.split("q"));
  if (q.is_identity()) {
    std::vector<int> m = q.map();
    std::swap(m[0], m[1]);
    q = Permutation(std::move(m));
  }
  std::vector<int> pm(n);
  for (int i = 0; i < n; ++i) pm[i] = q(i / bs) * bs + i % bs;
  const int swaps = static_cast<int>(eng.below(3));
  for (int k = 0; k < swaps; ++k) {
    const int a = static_cast<int>(eng.below(n)), b = static_cast<int>(eng.below(n));
    std::swap(pm[a], pm[b]);
  }

  std::vector<double> r(d), t(d);
  for (double& x : r) x = eng.uniform();
  for (double& x : t) x = eng.uniform();
  std::sort(r.begin(), r.end());
  std::sort(t.begin(), t.end());
  Matrix r1 = Matrix::Zero(d, d), rj = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    r1(k, k) = r[k];
    rj(k, k) = t[q(k)];
  }
  Lemma1Instance inst{std::move(r1), std::move(rj), std::move(q), std::move(u), Permutation(std::move(pm))};
  const Lemma1Record rec = lemma1_check(inst.r1, inst.rj, inst.q, inst.u, inst.p);
  if (!rec.hypothesis_holds) return std::nullopt;
  return inst;
}

}  // namespace cgm
