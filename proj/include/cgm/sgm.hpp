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

// Seeded graph matching: Frank-Wolfe on the doubly stochastic relaxation of
//   max_P tr(reference · P target P^T)
// with seeded vertex pairs fixed, followed by projection to a permutation.
//
// Seeds are moved to the leading block of both matrices so the feasible set
// is I_s ⊕ X with X doubly stochastic over the free vertices. Writing A for
// the reordered reference and B for the reordered target, the objective is
//   tr(A11 B11) + tr(A12 X B21) + tr(A21 B12 X^T) + tr(A22 X B22 X^T)
// and its gradient in X is
//   A12^T B21^T + A21 B12 + A22 X B22^T + A22^T X B22.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "cgm/assignment.hpp"
#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/random_models.hpp"
#include "cgm/rng.hpp"

namespace cgm {

// (target vertex, reference vertex) correspondences known up front.
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<std::pair<int, int>> pairs) : pairs_(std::move(pairs)) {
    std::vector<int> a, b;
    for (auto [i, j] : pairs_) {
      a.push_back(i);
      b.push_back(j);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end() ||
        std::adjacent_find(b.begin(), b.end()) != b.end()) {
      throw InvalidArgument("SeedSet: contradictory seeds (repeated vertex)");
    }
  }

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  void validate(int n) const {
    for (auto [i, j] : pairs_) {
      require(i >= 0 && i < n && j >= 0 && j < n, "SeedSet: seed vertex out of range");
    }
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
};

enum class InitMode { kBarycenter, kIdentity, kRandom };

struct SgmOptions {
  int max_iters = 30;
  double tol = 1e-6;  // relative change of the relaxed objective
  int restarts = 1;
  InitMode init = InitMode::kBarycenter;
  RngSeed rng{};
  // Polish each projected restart with pairwise-exchange hill climbing on the
  // unseeded vertices (symmetric inputs only).
  bool refine = false;
};

struct MatchResult {
  Permutation perm;        // target vertex -> reference vertex
  double objective = 0.0;  // ||reference - P target P^T||_F
  double trace_value = 0.0;
  int iters = 0;
  bool converged = false;
  // Relaxed objective after each Frank-Wolfe step of the winning restart.
  std::vector<double> relaxed_trace;
};

namespace detail {

inline void check_doubly_stochastic(const Matrix& d, double tol) {
  check_square(d, "project_to_permutation");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (std::abs(d.row(i).sum() - 1.0) > tol || std::abs(d.col(i).sum() - 1.0) > tol) {
      throw InvalidArgument("project_to_permutation: input is not doubly stochastic");
    }
  }
  if ((d.array() < -tol).any()) throw InvalidArgument("project_to_permutation: negative entry");
}

// Permutation p maximizing sum_i g(p(i), i): rows index images, columns index
// preimages, matching the Permutation matrix convention.
inline Permutation max_assignment_as_permutation(const Matrix& g) {
  LapResult lap = solve_lap(CostMatrix(g), Sense::kMax);  // row -> column
  return lap.assignment.inverse();
}

// Convex combination of random permutation matrices mixed with the barycenter.
inline Matrix random_doubly_stochastic(int f, RngSeed rng) {
  Matrix k = Matrix::Zero(f, f);
  CounterEngine eng(rng);
  constexpr int kTerms = 4;
  std::vector<double> w(kTerms);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(std::max(eng.uniform(), 1e-300));
    total += x;
  }
  for (int t = 0; t < kTerms; ++t) {
    std::vector<int> m(f);
    std::iota(m.begin(), m.end(), 0);
    eng.shuffle(m);
    for (int c = 0; c < f; ++c) k(m[c], c) += w[t] / total;
  }
  return 0.5 * (k + Matrix::Constant(f, f, 1.0 / f));
}

struct SeededProblem {
  std::vector<int> tgt_order;  // reordered index -> original target vertex
  std::vector<int> ref_order;  // reordered index -> original reference vertex
  int s = 0;
  Matrix a12, a21, a22, b12, b21, b22;
  Matrix linear;  // A12^T B21^T + A21 B12
  double constant = 0.0;  // tr(A11 B11)
};

inline SeededProblem make_seeded_problem(const Matrix& target, const Matrix& ref, const SeedSet& seeds) {
  const int n = static_cast<int>(target.rows());
  SeededProblem sp;
  sp.s = static_cast<int>(seeds.size());
  std::vector<char> tseed(n, 0), rseed(n, 0);
  for (auto [i, j] : seeds.pairs()) {
    sp.tgt_order.push_back(i);
    sp.ref_order.push_back(j);
    tseed[i] = 1;
    rseed[j] = 1;
  }
  for (int v = 0; v < n; ++v) {
    if (!tseed[v]) sp.tgt_order.push_back(v);
    if (!rseed[v]) sp.ref_order.push_back(v);
  }
  Matrix a(n, n), b(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      a(x, y) = ref(sp.ref_order[x], sp.ref_order[y]);
      b(x, y) = target(sp.tgt_order[x], sp.tgt_order[y]);
    }
  }
  const int s = sp.s;
  const int f = n - s;
  sp.a12 = a.topRightCorner(s, f);
  sp.a21 = a.bottomLeftCorner(f, s);
  sp.a22 = a.bottomRightCorner(f, f);
  sp.b12 = b.topRightCorner(s, f);
  sp.b21 = b.bottomLeftCorner(f, s);
  sp.b22 = b.bottomRightCorner(f, f);
  sp.linear = sp.a12.transpose() * sp.b21.transpose() + sp.a21 * sp.b12;
  sp.constant = (a.topLeftCorner(s, s) * b.topLeftCorner(s, s)).trace();
  return sp;
}

inline double relaxed_value(const SeededProblem& sp, const Matrix& x) {
  return sp.constant + (sp.linear.array() * x.array()).sum() + (sp.a22 * x * sp.b22 * x.transpose()).trace();
}

struct RestartOutcome {
  Permutation free_perm;
  int iters = 0;
  bool converged = false;
  std::vector<double> relaxed;
};

inline RestartOutcome frank_wolfe(const SeededProblem& sp, Matrix x, const SgmOptions& opts) {
  const int f = static_cast<int>(x.rows());
  RestartOutcome out;
  double value = relaxed_value(sp, x);
  out.relaxed.push_back(value);
  for (int it = 0; it < opts.max_iters; ++it) {
    const Matrix grad = sp.linear + sp.a22 * x * sp.b22.transpose() + sp.a22.transpose() * x * sp.b22;
    const Permutation dir = max_assignment_as_permutation(grad);
    Matrix d = -x;
    for (int c = 0; c < f; ++c) d(dir(c), c) += 1.0;
    const double slope = (grad.array() * d.array()).sum();
    const double curve = (sp.a22 * d * sp.b22 * d.transpose()).trace();
    double alpha;
    if (curve < 0.0) {
      alpha = std::clamp(-slope / (2.0 * curve), 0.0, 1.0);
    } else {
      alpha = slope + curve > 0.0 ? 1.0 : 0.0;
    }
    out.iters = it + 1;
    if (alpha <= 0.0) {
      out.converged = true;
      break;
    }
    x += alpha * d;
    const double next = relaxed_value(sp, x);
    const double change = std::abs(next - value);
    value = next;
    out.relaxed.push_back(value);
    if (change <= opts.tol * std::max(1.0, std::abs(value))) {
      out.converged = true;
      break;
    }
  }
  out.free_perm = max_assignment_as_permutation(x);
  return out;
}

// First-improvement hill climbing over exchanges of the images of two
// unseeded target vertices. Both matrices must be symmetric.
inline Permutation pairwise_exchange(const Matrix& target, const Matrix& ref, Permutation perm,
                                     const std::vector<char>& fixed) {
  const int n = static_cast<int>(target.rows());
  std::vector<int> img = perm.map();
  Matrix mp(n, n);  // reference pulled back to target labels
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) mp(u, v) = ref(img[u], img[v]);
  }
  const double scale = std::max(1.0, target.cwiseAbs().maxCoeff() * ref.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale * n;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int u = 0; u < n; ++u) {
      if (fixed[u]) continue;
      for (int w = u + 1; w < n; ++w) {
        if (fixed[w]) continue;
        const double full = (target.row(u) - target.row(w)).dot(mp.row(w) - mp.row(u));
        const double at_u = (target(u, u) - target(w, u)) * (mp(w, u) - mp(u, u));
        const double at_w = (target(u, w) - target(w, w)) * (mp(w, w) - mp(u, w));
        const double diag = (target(u, u) - target(w, w)) * (mp(w, w) - mp(u, u));
        const double delta = 2.0 * (full - at_u - at_w) + diag;
        if (delta > eps) {
          std::swap(img[u], img[w]);
          mp.row(u).swap(mp.row(w));
          mp.col(u).swap(mp.col(w));
          improved = true;
        }
      }
    }
  }
  return Permutation(std::move(img));
}

}  // namespace detail

// Permutation obtained by a max-sense assignment on g, after checking that d
// is doubly stochastic (rows and columns summing to 1 within 1e-6). The
// result p maximizes sum_i g(p(i), i).
inline Permutation project_to_permutation(const Matrix& d, const Matrix& g) {
  detail::check_doubly_stochastic(d, 1e-6);
  require(g.rows() == d.rows() && g.cols() == d.cols(), "project_to_permutation: shape mismatch");
  return detail::max_assignment_as_permutation(g);
}

inline MatchResult finalize_match(const Matrix& target, const Matrix& ref, Permutation perm) {
  MatchResult r;
  r.trace_value = trace_objective(target, ref, perm);
  r.objective = frobenius_distance(ref, permute_matrix(target, perm));
  r.perm = std::move(perm);
  return r;
}

inline MatchResult sgm_match(const Matrix& target, const Matrix& reference, const SeedSet& seeds,
                             const SgmOptions& opts = {}) {
  detail::check_square(target, "sgm_match");
  detail::check_square(reference, "sgm_match");
  require(target.rows() == reference.rows(), "sgm_match: dimension mismatch");
  require(opts.max_iters >= 1 && opts.restarts >= 1 && opts.tol >= 0.0, "sgm_match: invalid options");
  const int n = static_cast<int>(target.rows());
  seeds.validate(n);
  const detail::SeededProblem sp = detail::make_seeded_problem(target, reference, seeds);
  const int f = n - sp.s;

  auto assemble = [&](const Permutation& free_perm) {
    std::vector<int> m(n);
    for (int k = 0; k < sp.s; ++k) m[sp.tgt_order[k]] = sp.ref_order[k];
    for (int c = 0; c < f; ++c) m[sp.tgt_order[sp.s + c]] = sp.ref_order[sp.s + free_perm(c)];
    return Permutation(std::move(m));
  };

  if (f == 0) {
    MatchResult r = finalize_match(target, reference, assemble(Permutation(std::vector<int>{})));
    r.converged = true;
    return r;
  }

  std::vector<char> seeded(n, 0);
  if (opts.refine) {
    require((target - target.transpose()).cwiseAbs().maxCoeff() == 0.0 &&
                (reference - reference.transpose()).cwiseAbs().maxCoeff() == 0.0,
            "sgm_match: refinement requires symmetric matrices");
    for (auto [i, j] : seeds.pairs()) seeded[i] = 1;
  }

  std::optional<MatchResult> best;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    const InitMode mode = restart == 0 ? opts.init : InitMode::kRandom;
    Matrix x0;
    switch (mode) {
      case InitMode::kBarycenter:
        x0 = Matrix::Constant(f, f, 1.0 / f);
        break;
      case InitMode::kIdentity:
        x0 = Matrix::Identity(f, f);
        break;
      case InitMode::kRandom:
        x0 = detail::random_doubly_stochastic(f, opts.rng.split(static_cast<std::uint64_t>(restart)));
        break;
    }
    detail::RestartOutcome out = detail::frank_wolfe(sp, std::move(x0), opts);
    Permutation perm = assemble(out.free_perm);
    if (opts.refine) perm = detail::pairwise_exchange(target, reference, std::move(perm), seeded);
    MatchResult r = finalize_match(target, reference, std::move(perm));
    r.iters = out.iters;
    r.converged = out.converged;
    r.relaxed_trace = std::move(out.relaxed);
    if (!best || r.trace_value > best->trace_value) best = std::move(r);
  }
  return std::move(*best);
}

template <class T, class R>
  requires(HasMatrix<T> && (HasMatrix<R> || std::same_as<R, Matrix>))
MatchResult sgm_match(const T& target, const R& reference, const SeedSet& seeds, const SgmOptions& opts = {}) {
  return sgm_match(as_matrix(target), as_matrix(reference), seeds, opts);
}

// Exact optimum of the trace objective subject to the seeds, by enumerating
// every assignment of free target vertices to free reference vertices in
// lexicographic order (first optimum kept). At most 9 free vertices.
inline MatchResult brute_force_qap(const Matrix& target, const Matrix& reference, const SeedSet& seeds) {
  detail::check_square(target, "brute_force_qap");
  require(target.rows() == reference.rows(), "brute_force_qap: dimension mismatch");
  const int n = static_cast<int>(target.rows());
  seeds.validate(n);
  const int f = n - static_cast<int>(seeds.size());
  require(f <= 9, "brute_force_qap: too many free vertices (max 9)");
  std::vector<int> base(n, -1);
  std::vector<char> ref_used(n, 0);
  for (auto [i, j] : seeds.pairs()) {
    base[i] = j;
    ref_used[j] = 1;
  }
  std::vector<int> free_t, free_r;
  for (int v = 0; v < n; ++v) {
    if (base[v] < 0) free_t.push_back(v);
    if (!ref_used[v]) free_r.push_back(v);
  }
  std::vector<int> order(f);
  std::iota(order.begin(), order.end(), 0);
  std::optional<Permutation> best;
  double best_value = 0.0;
  const double eps = 1e-12 * std::max(1.0, reference.cwiseAbs().sum() * std::max(1.0, target.cwiseAbs().maxCoeff()));
  do {
    std::vector<int> m = base;
    for (int k = 0; k < f; ++k) m[free_t[k]] = free_r[order[k]];
    Permutation p(std::move(m));
    const double v = trace_objective(target, reference, p);
    if (!best || v > best_value + eps) {
      best = std::move(p);
      best_value = v;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  MatchResult r = finalize_match(target, reference, std::move(*best));
  r.converged = true;
  return r;
}

template <class T, class R>
  requires(HasMatrix<T> && (HasMatrix<R> || std::same_as<R, Matrix>))
MatchResult brute_force_qap(const T& target, const R& reference, const SeedSet& seeds) {
  return brute_force_qap(as_matrix(target), as_matrix(reference), seeds);
}

}  // namespace cgm
