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

// Exact finite-n moment calculators for matching a bit-flipped graph to an
// average of bit-flipped in-sample graphs.
//
// Notation used below. The out-of-sample graph A ~ BF(B1, p_target) is
// observed as R = P*^T A P*, in-sample graphs S ~ BF(B_h, p_h), and
//   f(P) = sum_S tr(S P R P^T).
// The relative shuffle is the permutation q = p ∘ p*^{-1} whose matrix is
// P P*^T; with it f(P) - f(P*) = sum_S [tr(S Q A Q^T) - tr(S A)].
// Pattern counts take q directly. The pair-level gap sums run over the
// inverse map g = q^{-1}, since (Q A Q^T)[h][l] = A[g(h)][g(l)]:
//   f(P) - f(P*) = 2 sum_{pairs e} alpha_e (A[g e] - A[e]),
// alpha_e being the in-sample edge count at pair e.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/rng.hpp"

namespace cgm {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline Permutation relative_shuffle(const Permutation& p, const Permutation& p_star) {
  return compose(p, p_star.inverse());
}

// tr(Bi Q Bj Q^T) - tr(Bi Bj) with Q = P P*^T.
inline double h_overlap(const Graph& bi, const Graph& bj, const Permutation& p, const Permutation& p_star) {
  require(bi.n() == bj.n() && p.n() == bi.n() && p_star.n() == bi.n(), "h_overlap: dimension mismatch");
  const Permutation q = relative_shuffle(p, p_star);
  return trace_objective(bj, bi, q) - trace_objective(bj, bi, Permutation::identity(bi.n()));
}

// Conditional mean of f(P) - f(P*) given the backgrounds; backgrounds[0] is
// the class of the out-of-sample graph.
inline double expected_gap(std::span<const Graph> backgrounds, std::span<const double> counts,
                           std::span<const double> flips, double p_target, const Permutation& p,
                           const Permutation& p_star) {
  require(!backgrounds.empty(), "expected_gap: no backgrounds");
  require(counts.size() == backgrounds.size() && flips.size() == backgrounds.size(),
          "expected_gap: counts and flips must match the background count");
  CompensatedSum total;
  for (std::size_t h = 0; h < backgrounds.size(); ++h) {
    require(backgrounds[h].n() == backgrounds[0].n(), "expected_gap: dimension mismatch");
    const double w = counts[h] * (1.0 - 2.0 * p_target) * (1.0 - 2.0 * flips[h]);
    if (w == 0.0) continue;
    total.add(w * h_overlap(backgrounds[h], backgrounds[0], p, p_star));
  }
  return total.value();
}

inline double expected_gap(const std::vector<Graph>& backgrounds, const std::vector<double>& counts,
                           const std::vector<double>& flips, double p_target, const Permutation& p,
                           const Permutation& p_star) {
  return expected_gap(std::span<const Graph>(backgrounds), std::span<const double>(counts),
                      std::span<const double>(flips), p_target, p, p_star);
}

// Counts of vertex pairs {h, l} by the 4-bit pattern
//   (B1[s(h), s(l)], B1[h, l], B2[s(h), s(l)], B2[h, l]).
class PatternCounts {
 public:
  static constexpr int index(int x1, int x2, int x3, int x4) { return x1 * 8 + x2 * 4 + x3 * 2 + x4; }

  std::int64_t& operator[](int idx) { return counts_[idx]; }
  std::int64_t operator[](int idx) const { return counts_[idx]; }

  // Pattern written as four characters, e.g. "0110".
  std::int64_t at(std::string_view bits) const {
    require(bits.size() == 4, "PatternCounts: pattern must have four bits");
    int idx = 0;
    for (char c : bits) {
      require(c == '0' || c == '1', "PatternCounts: pattern must be binary");
      idx = idx * 2 + (c - '0');
    }
    return counts_[idx];
  }

  std::int64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }
  const std::array<std::int64_t, 16>& counts() const { return counts_; }

 private:
  std::array<std::int64_t, 16> counts_{};
};

inline PatternCounts pattern_counts(const Graph& b1, const Graph& b2, const Permutation& sigma) {
  require(b1.is_binary() && b2.is_binary(), "pattern_counts: graphs must be binary");
  require(b1.n() == b2.n() && sigma.n() == b1.n(), "pattern_counts: dimension mismatch");
  PatternCounts pc;
  const int n = b1.n();
  for (int h = 0; h < n; ++h) {
    for (int l = h + 1; l < n; ++l) {
      const int sh = sigma(h), sl = sigma(l);
      const int x1 = b1(sh, sl) != 0.0, x2 = b1(h, l) != 0.0;
      const int x3 = b2(sh, sl) != 0.0, x4 = b2(h, l) != 0.0;
      ++pc[PatternCounts::index(x1, x2, x3, x4)];
    }
  }
  return pc;
}

struct GapMoments {
  double mean = 0.0;
  double variance = 0.0;
  int k_shuffled = 0;
};

// The two pieces of the pair-level variance, on the unordered-pair scale.
struct GapVarianceTerms {
  double v1 = 0.0;  // sum of per-pair variances
  double c2 = 0.0;  // covariances between a pair and its image
};

namespace detail {

struct MovedPair {
  int h, l;    // the pair e
  int gh, gl;  // its image g(e), normalized so gh < gl
};

inline std::vector<MovedPair> moved_pairs(const Permutation& g) {
  std::vector<MovedPair> out;
  const int n = g.n();
  for (int h = 0; h < n; ++h) {
    for (int l = h + 1; l < n; ++l) {
      int a = g(h), b = g(l);
      if (a > b) std::swap(a, b);
      if (a == h && b == l) continue;
      out.push_back({h, l, a, b});
    }
  }
  return out;
}

inline void check_gap_inputs(const Graph& b1, const Graph& b2, double p, const Permutation& sigma) {
  require(b1.is_binary() && b2.is_binary(), "gap moments: graphs must be binary");
  require(b1.n() == b2.n() && sigma.n() == b1.n(), "gap moments: dimension mismatch");
  require(p > 0.0 && p < 1.0, "gap moments: flip probability must lie strictly inside (0,1)");
}

}  // namespace detail

// V1 = sum_* [E(beta^2) Var(alpha) + Var(beta) E(alpha)^2] and
// C2 = -2 p (1-p) sum_* E(alpha_e) E(alpha_{g e}), over pairs moved by g.
inline GapVarianceTerms gap_variance_terms(const Graph& b1, const Graph& b2, double m1, double m2, double p,
                                           const Permutation& sigma) {
  detail::check_gap_inputs(b1, b2, p, sigma);
  const Permutation g = sigma.inverse();
  const double t = 1.0 - 2.0 * p;
  const double v = p * (1.0 - p);
  auto mean_alpha = [&](int h, int l) { return m1 * (t * b1(h, l) + p) + m2 * (t * b2(h, l) + p); };
  const double var_alpha = (m1 + m2) * v;
  const double var_beta = 2.0 * v;
  CompensatedSum v1, c2;
  for (const auto& e : detail::moved_pairs(g)) {
    const double ea = mean_alpha(e.h, e.l);
    const double eb = t * (b1(e.gh, e.gl) - b1(e.h, e.l));
    v1.add((var_beta + eb * eb) * var_alpha + var_beta * ea * ea);
    c2.add(-2.0 * v * ea * mean_alpha(e.gh, e.gl));
  }
  return {v1.value(), c2.value()};
}

// Exact conditional mean and variance of f(P) - f(P*) for two backgrounds
// with a common flip probability p, where sigma is the relative shuffle.
// The trace-scale gap is twice the pair-level sum, so its variance is
// 4 (V1 + C2).
inline GapMoments exact_gap_variance(const Graph& b1, const Graph& b2, double m1, double m2, double p,
                                     const Permutation& sigma) {
  const GapVarianceTerms terms = gap_variance_terms(b1, b2, m1, m2, p, sigma);
  GapMoments out;
  const std::vector<Graph> bg{b1, b2};
  out.mean = expected_gap(bg, {m1, m2}, {p, p}, p, sigma, Permutation::identity(b1.n()));
  out.variance = 4.0 * (terms.v1 + terms.c2);
  out.k_shuffled = sigma.moved_count();
  return out;
}

// Simulated (f(P) - f(P*) - mean) / sd with the exact moments above. Only
// pairs moved by the shuffle are drawn; all other pairs contribute zero.
inline std::vector<double> standardized_gap_samples(const Graph& b1, const Graph& b2, int m1, int m2, double p,
                                                    const Permutation& sigma, int reps, RngSeed rng) {
  require(reps >= 1, "standardized_gap_samples: reps must be positive");
  require(m1 >= 0 && m2 >= 0, "standardized_gap_samples: counts must be nonnegative");
  const GapMoments mom = exact_gap_variance(b1, b2, m1, m2, p, sigma);
  if (!(mom.variance > 0.0)) throw NumericalError("standardized_gap_samples: zero variance");
  const double sd = std::sqrt(mom.variance);
  const auto pairs = detail::moved_pairs(sigma.inverse());
  const int n = b1.n();
  // Slot per moved pair; images of moved pairs are moved pairs.
  std::vector<int> slot(static_cast<std::size_t>(n) * n, -1);
  for (std::size_t k = 0; k < pairs.size(); ++k) slot[static_cast<std::size_t>(pairs[k].h) * n + pairs[k].l] = static_cast<int>(k);
  std::vector<int> image(pairs.size());
  std::vector<double> mu1(pairs.size()), mu2(pairs.size());
  const double t = 1.0 - 2.0 * p;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    image[k] = slot[static_cast<std::size_t>(pairs[k].gh) * n + pairs[k].gl];
    mu1[k] = t * b1(pairs[k].h, pairs[k].l) + p;
    mu2[k] = t * b2(pairs[k].h, pairs[k].l) + p;
  }
  std::vector<double> out(reps);
  std::vector<int> a(pairs.size());
  for (int r = 0; r < reps; ++r) {
    CounterEngine eng(rng.split(static_cast<std::uint64_t>(r)));
    for (std::size_t k = 0; k < pairs.size(); ++k) a[k] = eng.bernoulli(mu1[k]);
    std::int64_t gap = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int alpha = eng.binomial(m1, mu1[k]) + eng.binomial(m2, mu2[k]);
      gap += static_cast<std::int64_t>(alpha) * (a[image[k]] - a[k]);
    }
    out[r] = (2.0 * static_cast<double>(gap) - mom.mean) / sd;
  }
  return out;
}

// Leading n^2 coefficient of E tr(A P C P^T) for SBM backgrounds sharing a
// block structure. `sizes` are block sizes in units of n. The vertex
// permutation sends block b onto block block_sigma(b), so block (b, c) of A
// meets block (s^{-1}(b), s^{-1}(c)) of C. A block pair of the target's own
// class that is fixed by the permutation uses the second moment
// lambda (1-p_t)(1-p_h) + (1-lambda) p_t p_h; every other pair uses the
// product of means.
inline double expected_trace_sbm(std::span<const Matrix> lambdas, std::span<const double> sizes,
                                 std::span<const double> counts, std::span<const double> flips, double p_target,
                                 const Permutation& block_sigma, int target_class) {
  const int k = static_cast<int>(sizes.size());
  require(!lambdas.empty() && counts.size() == lambdas.size() && flips.size() == lambdas.size(),
          "expected_trace_sbm: lambdas, counts and flips must have equal length");
  require(target_class >= 0 && target_class < static_cast<int>(lambdas.size()), "expected_trace_sbm: bad target class");
  require(block_sigma.n() == k, "expected_trace_sbm: block permutation size mismatch");
  for (const Matrix& lam : lambdas) {
    require(lam.rows() == k && lam.cols() == k, "expected_trace_sbm: lambda must be KxK");
  }
  for (int b = 0; b < k; ++b) {
    require(sizes[block_sigma(b)] == sizes[b], "expected_trace_sbm: permutation does not respect block sizes");
  }
  const double m = std::accumulate(counts.begin(), counts.end(), 0.0);
  require(m > 0.0, "expected_trace_sbm: counts sum to zero");
  const Permutation inv = block_sigma.inverse();
  const Matrix& lam_t = lambdas[target_class];
  auto mean = [](double lam, double p) { return lam * (1.0 - 2.0 * p) + p; };
  CompensatedSum total;
  for (std::size_t h = 0; h < lambdas.size(); ++h) {
    if (counts[h] == 0.0) continue;
    CompensatedSum cls;
    for (int b = 0; b < k; ++b) {
      for (int c = 0; c < k; ++c) {
        const int sb = inv(b), sc = inv(c);
        double e;
        if (static_cast<int>(h) == target_class && sb == b && sc == c) {
          const double lam = lam_t(b, c);
          e = lam * (1.0 - p_target) * (1.0 - flips[h]) + (1.0 - lam) * p_target * flips[h];
        } else {
          e = mean(lam_t(b, c), p_target) * mean(lambdas[h](sb, sc), flips[h]);
        }
        cls.add(sizes[b] * sizes[c] * e);
      }
    }
    total.add(counts[h] / m * cls.value());
  }
  return total.value();
}

inline double expected_trace_sbm(const std::vector<Matrix>& lambdas, const std::vector<double>& sizes,
                                 const std::vector<double>& counts, const std::vector<double>& flips,
                                 double p_target, const Permutation& block_sigma, int target_class) {
  return expected_trace_sbm(std::span<const Matrix>(lambdas), std::span<const double>(sizes),
                            std::span<const double>(counts), std::span<const double>(flips), p_target,
                            block_sigma, target_class);
}

struct Lemma1Record {
  bool hypothesis_holds = false;
  bool conclusion_holds = false;
  double epsilon = 0.0;
  // False when epsilon >= 1/2: the trace bound is vacuous there and the
  // hypothesis cannot be certified.
  bool certifiable = false;
};

namespace detail {

inline bool is_diagonal(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

// Checks both sides of the common-misalignment lemma for diagonal score
// matrices r1, rj, a d x d permutation q, orthonormal u (n x d) and an n x n
// permutation p. epsilon = ||U^T P U - Q||_F (equivalently the distance from
// U^T P U ⊕ 0 to Q ⊕ 0). The hypothesis requires epsilon < 1/2, q among the
// minimizers of ||R1 - V Rj V^T||_F over d x d permutations with the
// identity excluded, and tr(R1 Q Rj Q^T) > tr(R1 Rj) / (1 - 2 epsilon). The
// conclusion is tr(P^T E1 P Ej) > tr(E1 Ej) with Ei = U Ri U^T.
inline Lemma1Record lemma1_check(const Matrix& r1, const Matrix& rj, const Permutation& q, const Matrix& u,
                                 const Permutation& p) {
  const int d = static_cast<int>(r1.rows());
  require(d >= 1 && d <= 5, "lemma1_check: d must be at most 5 for the permutation search");
  require(r1.cols() == d && rj.rows() == d && rj.cols() == d && q.n() == d && u.cols() == d,
          "lemma1_check: dimension mismatch");
  require(u.rows() == p.n(), "lemma1_check: U rows must match the permutation size");
  require(detail::is_diagonal(r1) && detail::is_diagonal(rj), "lemma1_check: score matrices must be diagonal");
  for (int i = 0; i < d; ++i) {
    require(r1(i, i) >= 0.0 && rj(i, i) >= 0.0, "lemma1_check: diagonal entries must be nonnegative");
    if (i > 0) require(r1(i - 1, i - 1) <= r1(i, i), "lemma1_check: r1 diagonal must be non-decreasing");
  }
  require(((u.transpose() * u) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10,
          "lemma1_check: U columns are not orthonormal");

  Lemma1Record rec;
  const Matrix pm = p.matrix();
  const Matrix qm = q.matrix();
  rec.epsilon = (u.transpose() * pm * u - qm).norm();
  rec.certifiable = rec.epsilon < 0.5;

  auto f2 = [&](const Matrix& v) { return (r1 * v * rj * v.transpose()).trace(); };
  auto dist = [&](const Matrix& v) { return (r1 - v * rj * v.transpose()).norm(); };
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, dist(Permutation(order).matrix()));
  } while (std::next_permutation(order.begin(), order.end()));
  const double tol = 1e-12 * std::max(1.0, r1.norm() + rj.norm());
  const Matrix id = Matrix::Identity(d, d);
  const bool q_optimal = dist(qm) <= best + tol;
  const bool id_optimal = dist(id) <= best + tol;

  rec.hypothesis_holds = rec.certifiable && q_optimal && !id_optimal &&
                         f2(qm) > f2(id) / (1.0 - 2.0 * rec.epsilon);

  const Matrix e1 = u * r1 * u.transpose();
  const Matrix ej = u * rj * u.transpose();
  rec.conclusion_holds = (pm.transpose() * e1 * pm * ej).trace() > (e1 * ej).trace();
  return rec;
}

}  // namespace cgm
