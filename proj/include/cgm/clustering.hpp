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

// Graph-level clustering: inter-graph Frobenius distances, classical MDS,
// k-means with k-means++ seeding, adjusted Rand index, and a profile
// likelihood elbow for choosing the embedding dimension.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/rng.hpp"

namespace cgm {

class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix values) : values_(std::move(values)) {
    detail::check_square(values_, "DistanceMatrix");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      require(values_(i, i) == 0.0, "DistanceMatrix: nonzero diagonal");
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        require(values_(i, j) >= 0.0 && std::isfinite(values_(i, j)), "DistanceMatrix: negative or non-finite entry");
        require(values_(i, j) == values_(j, i), "DistanceMatrix: asymmetric");
      }
    }
  }
  int m() const { return static_cast<int>(values_.rows()); }
  const Matrix& matrix() const { return values_; }

 private:
  Matrix values_;
};

struct Labeling {
  std::vector<int> labels;
  int k = 0;
};

inline DistanceMatrix pairwise_distances(std::span<const Graph> gs) {
  require(gs.size() >= 2, "pairwise_distances: need at least two graphs");
  const int m = static_cast<int>(gs.size());
  const int n = gs.front().n();
  Matrix d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    require(gs[i].n() == n, "pairwise_distances: dimension mismatch");
    for (int j = i + 1; j < m; ++j) {
      d(i, j) = d(j, i) = (gs[i].matrix() - gs[j].matrix()).norm();
    }
  }
  return DistanceMatrix(std::move(d));
}

inline DistanceMatrix pairwise_distances(const std::vector<Graph>& gs) {
  return pairwise_distances(std::span<const Graph>(gs));
}

namespace detail {

// -1/2 J (D∘D) J with J = I - 11^T/m.
inline Matrix double_centered(const DistanceMatrix& d) {
  const int m = d.m();
  const Matrix sq = d.matrix().array().square().matrix();
  const Matrix j = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / m);
  Matrix b = -0.5 * j * sq * j;
  return (b + b.transpose()) / 2.0;
}

// Eigenpairs sorted by decreasing eigenvalue.
inline std::pair<Vector, Matrix> sorted_eigen(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const auto m = b.rows();
  Vector vals(m);
  Matrix vecs(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    vals(k) = es.eigenvalues()(m - 1 - k);
    vecs.col(k) = es.eigenvectors().col(m - 1 - k);
  }
  return {vals, vecs};
}

}  // namespace detail

// Classical MDS: top-dim eigenpairs of the double-centered squared distances,
// negative eigenvalues clamped to zero. Rows are points.
inline Matrix cmds_embed(const DistanceMatrix& d, int dim) {
  require(dim >= 1 && dim <= d.m(), "cmds_embed: dim must satisfy 1 <= dim <= m");
  const auto [vals, vecs] = detail::sorted_eigen(detail::double_centered(d));
  Matrix x(d.m(), dim);
  for (int k = 0; k < dim; ++k) x.col(k) = vecs.col(k) * std::sqrt(std::max(vals(k), 0.0));
  return x;
}

struct KmeansRun {
  Labeling labeling;
  double wcss = 0.0;
  // Within-cluster sum of squares after each Lloyd iteration of the kept run.
  std::vector<double> wcss_trace;
};

namespace detail {

inline double sq_dist(const Matrix& x, int i, const Matrix& c, int k) {
  return (x.row(i) - c.row(k)).squaredNorm();
}

inline KmeansRun lloyd(const Matrix& x, int k, RngSeed rng, int max_iters) {
  const int m = static_cast<int>(x.rows());
  CounterEngine eng(rng);
  // k-means++ seeding.
  Matrix centers(k, x.cols());
  std::vector<double> best_d(m, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(eng.below(static_cast<std::uint64_t>(m)));
  centers.row(0) = x.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      best_d[i] = std::min(best_d[i], sq_dist(x, i, centers, c - 1));
      total += best_d[i];
    }
    int pick = 0;
    if (total <= 0.0) {
      // All points coincide with chosen centers; take the next unused index.
      pick = c % m;
    } else {
      double target = eng.uniform() * total;
      pick = m - 1;
      for (int i = 0; i < m; ++i) {
        target -= best_d[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      while (best_d[pick] <= 0.0) pick = (pick + 1) % m;
    }
    centers.row(c) = x.row(pick);
  }

  KmeansRun run;
  run.labeling.k = k;
  std::vector<int>& lab = run.labeling.labels;
  lab.assign(m, -1);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double wcss = 0.0;
    for (int i = 0; i < m; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = sq_dist(x, i, centers, c);
        if (dd < best) {
          best = dd;
          arg = c;
        }
      }
      if (lab[i] != arg) changed = true;
      lab[i] = arg;
      wcss += best;
    }
    // Empty clusters take the point farthest from its center.
    std::vector<int> counts(k, 0);
    for (int l : lab) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < m; ++i) {
        if (counts[lab[i]] <= 1) continue;
        const double dd = sq_dist(x, i, centers, lab[i]);
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      if (far < 0) break;
      --counts[lab[far]];
      lab[far] = c;
      ++counts[c];
      changed = true;
    }
    centers.setZero();
    for (int i = 0; i < m; ++i) centers.row(lab[i]) += x.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= std::max(counts[c], 1);
    double after = 0.0;
    for (int i = 0; i < m; ++i) after += sq_dist(x, i, centers, lab[i]);
    run.wcss_trace.push_back(after);
    run.wcss = after;
    (void)wcss;
    if (!changed) break;
  }
  return run;
}

}  // namespace detail

// Best of `restarts` k-means++ / Lloyd runs by within-cluster sum of squares.
inline KmeansRun kmeans_detailed(const Matrix& x, int k, int restarts, RngSeed rng, int max_iters = 300) {
  const int m = static_cast<int>(x.rows());
  require(k >= 1 && k <= m, "kmeans: k must satisfy 1 <= k <= m");
  require(restarts >= 1, "kmeans: restarts must be positive");
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = detail::lloyd(x, k, rng.split(static_cast<std::uint64_t>(r)), max_iters);
    if (r == 0 || run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

inline Labeling kmeans(const Matrix& x, int k, int restarts, RngSeed rng) {
  return kmeans_detailed(x, k, restarts, rng).labeling;
}

// Adjusted Rand index from the pair-counting contingency table.
inline double adjusted_rand_index(const Labeling& a, const Labeling& b) {
  require(a.labels.size() == b.labels.size(), "adjusted_rand_index: length mismatch");
  const auto m = static_cast<double>(a.labels.size());
  require(a.labels.size() >= 2, "adjusted_rand_index: need at least two items");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    joint[{a.labels[i], b.labels[i]}] += 1.0;
    ra[a.labels[i]] += 1.0;
    rb[b.labels[i]] += 1.0;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, v] : joint) sum_joint += c2(v);
  for (const auto& [key, v] : ra) sum_a += c2(v);
  for (const auto& [key, v] : rb) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(m);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both trivial partitions
  return (sum_joint - expected) / (max_index - expected);
}

// Profile-likelihood elbow of a nonincreasing sequence: the split q maximizing
// the two-group Gaussian likelihood with a pooled variance.
inline int profile_likelihood_elbow(const std::vector<double>& values) {
  const int p = static_cast<int>(values.size());
  if (p <= 1) return 1;
  const double spread = *std::max_element(values.begin(), values.end()) -
                        *std::min_element(values.begin(), values.end());
  if (spread <= 0.0) return 1;
  const double floor_var = 1e-12 * spread * spread;
  int best_q = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int q = 1; q < p; ++q) {
    const double mu1 = std::accumulate(values.begin(), values.begin() + q, 0.0) / q;
    const double mu2 = std::accumulate(values.begin() + q, values.end(), 0.0) / (p - q);
    double ss = 0.0;
    for (int i = 0; i < p; ++i) {
      const double mu = i < q ? mu1 : mu2;
      ss += (values[i] - mu) * (values[i] - mu);
    }
    const double var = std::max(ss / p, floor_var);
    // Up to constants, the maximized log-likelihood is -p/2 log(var).
    const double ll = -0.5 * p * std::log(var);
    if (q == 1 || ll > best_ll + 1e-12 * std::abs(best_ll)) {
      best_ll = ll;
      best_q = q;
    }
  }
  return best_q;
}

// Elbow of the top max_dim eigenvalues (clamped at zero) of the double-centered
// squared distance matrix.
inline int elbow_dimension(const DistanceMatrix& d, int max_dim) {
  require(max_dim >= 1 && max_dim <= d.m(), "elbow_dimension: max_dim must satisfy 1 <= max_dim <= m");
  const auto [vals, vecs] = detail::sorted_eigen(detail::double_centered(d));
  std::vector<double> spectrum(max_dim);
  for (int k = 0; k < max_dim; ++k) spectrum[k] = std::max(vals(k), 0.0);
  return profile_likelihood_elbow(spectrum);
}

}  // namespace cgm
