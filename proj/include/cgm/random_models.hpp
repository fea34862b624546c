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

// Seedable generators for the random graph models used throughout: ER, SBM,
// COSIE, and the bit-flip noise channel. Every sample is a pure function of
// its RngSeed; edge {i, j} (i < j) consumes draw number i * n + j.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"
#include "cgm/rng.hpp"

namespace cgm {

namespace detail {

inline std::uint64_t pair_index(int n, int i, int j) {
  return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(j);
}

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

template <class ProbFn>
Graph sample_independent_edges(int n, RngSeed rng, ProbFn&& prob) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform(pair_index(n, i, j)) < prob(i, j)) {
        m(i, j) = 1.0;
        m(j, i) = 1.0;
      }
    }
  }
  return Graph::binary(std::move(m));
}

}  // namespace detail

// Stochastic blockmodel with contiguous blocks: the first sizes[0] vertices
// form block 0, the next sizes[1] block 1, and so on.
class SbmSpec {
 public:
  SbmSpec(std::vector<int> sizes, Matrix lambda) : sizes_(std::move(sizes)), lambda_(std::move(lambda)) {
    require(!sizes_.empty(), "SbmSpec: no blocks");
    for (int s : sizes_) require(s > 0, "SbmSpec: block sizes must be positive");
    const auto k = static_cast<Eigen::Index>(sizes_.size());
    require(lambda_.rows() == k && lambda_.cols() == k, "SbmSpec: lambda must be KxK");
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        require(detail::is_probability(lambda_(a, b)), "SbmSpec: lambda entry outside [0,1]");
        require(lambda_(a, b) == lambda_(b, a), "SbmSpec: lambda must be symmetric");
      }
    }
    for (std::size_t b = 0; b < sizes_.size(); ++b) {
      membership_.insert(membership_.end(), sizes_[b], static_cast<int>(b));
    }
  }

  int n() const { return static_cast<int>(membership_.size()); }
  int blocks() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const Matrix& lambda() const { return lambda_; }
  int block_of(int v) const { return membership_[v]; }

  Matrix probability_matrix() const {
    Matrix p(n(), n());
    for (int i = 0; i < n(); ++i) {
      for (int j = 0; j < n(); ++j) p(i, j) = i == j ? 0.0 : lambda_(membership_[i], membership_[j]);
    }
    return p;
  }

 private:
  std::vector<int> sizes_;
  Matrix lambda_;
  std::vector<int> membership_;
};

// How a CosieSpec treats edge probabilities U R U^T outside [0, 1].
enum class ProbabilityPolicy { kReject, kClamp };

// Common-subspace independent-edge model: graph i has edge probabilities
// U R_i U^T with U (n x d) orthonormal and R_i symmetric.
class CosieSpec {
 public:
  CosieSpec(Matrix u, std::vector<Matrix> scores, ProbabilityPolicy policy = ProbabilityPolicy::kReject)
      : u_(std::move(u)), scores_(std::move(scores)), policy_(policy) {
    const auto d = u_.cols();
    require(d >= 1 && u_.rows() >= d, "CosieSpec: U must be n x d with d <= n");
    const Matrix gram = u_.transpose() * u_;
    require((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10,
            "CosieSpec: U columns are not orthonormal");
    for (const Matrix& r : scores_) {
      require(r.rows() == d && r.cols() == d, "CosieSpec: score matrix must be d x d");
      require((r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "CosieSpec: score matrix not symmetric");
      if (policy_ == ProbabilityPolicy::kReject) {
        const Matrix p = u_ * r * u_.transpose();
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
          for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (i != j && (p(i, j) < -1e-12 || p(i, j) > 1.0 + 1e-12)) {
              throw InvalidArgument("CosieSpec: edge probability outside [0,1]");
            }
          }
        }
      }
    }
  }

  int n() const { return static_cast<int>(u_.rows()); }
  int d() const { return static_cast<int>(u_.cols()); }
  const Matrix& u() const { return u_; }
  const std::vector<Matrix>& scores() const { return scores_; }
  ProbabilityPolicy policy() const { return policy_; }

  // U R_i U^T with a zero diagonal, clamped to [0,1] under kClamp.
  Matrix probability_matrix(std::size_t i) const {
    require(i < scores_.size(), "CosieSpec: score index out of range");
    Matrix p = u_ * scores_[i] * u_.transpose();
    p.diagonal().setZero();
    if (policy_ == ProbabilityPolicy::kClamp) p = p.cwiseMax(0.0).cwiseMin(1.0);
    return p;
  }

 private:
  Matrix u_;
  std::vector<Matrix> scores_;
  ProbabilityPolicy policy_;
};

// Flip probabilities for the bit-flip channel: a scalar or a symmetric matrix.
class NoiseSpec {
 public:
  NoiseSpec(double p) : scalar_(p) {  // NOLINT(google-explicit-constructor)
    require(detail::is_probability(p), "NoiseSpec: flip probability outside [0,1]");
  }
  explicit NoiseSpec(Matrix q) : matrix_(std::move(q)) {
    detail::check_square(*matrix_, "NoiseSpec");
    for (Eigen::Index i = 0; i < matrix_->rows(); ++i) {
      for (Eigen::Index j = 0; j < matrix_->cols(); ++j) {
        require(detail::is_probability((*matrix_)(i, j)), "NoiseSpec: entry outside [0,1]");
        require((*matrix_)(i, j) == (*matrix_)(j, i), "NoiseSpec: matrix must be symmetric");
      }
    }
  }

  bool is_scalar() const { return !matrix_.has_value(); }
  double at(int i, int j) const { return matrix_ ? (*matrix_)(i, j) : scalar_; }
  std::optional<int> n() const {
    if (!matrix_) return std::nullopt;
    return static_cast<int>(matrix_->rows());
  }

 private:
  double scalar_ = 0.0;
  std::optional<Matrix> matrix_;
};

inline Graph sample_er(int n, double p, RngSeed rng) {
  require(n >= 1, "sample_er: n must be positive");
  require(detail::is_probability(p), "sample_er: p outside [0,1]");
  return detail::sample_independent_edges(n, rng, [p](int, int) { return p; });
}

inline Graph sample_sbm(const SbmSpec& spec, RngSeed rng) {
  return detail::sample_independent_edges(spec.n(), rng, [&spec](int i, int j) {
    return spec.lambda()(spec.block_of(i), spec.block_of(j));
  });
}

inline Graph sample_cosie(const CosieSpec& spec, std::size_t index, RngSeed rng) {
  const Matrix p = spec.probability_matrix(index);
  return detail::sample_independent_edges(spec.n(), rng, [&p](int i, int j) { return p(i, j); });
}

// Each off-diagonal pair of a binary graph is toggled independently with its
// flip probability; the diagonal is never touched.
inline Graph bitflip(const Graph& g, const NoiseSpec& noise, RngSeed rng) {
  require(g.is_binary(), "bitflip: weighted graphs are not supported");
  if (auto qn = noise.n()) require(*qn == g.n(), "bitflip: noise matrix dimension mismatch");
  const int n = g.n();
  Matrix m = g.matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform(detail::pair_index(n, i, j)) < noise.at(i, j)) {
        const double v = 1.0 - m(i, j);
        m(i, j) = v;
        m(j, i) = v;
      }
    }
  }
  return Graph::binary(std::move(m));
}

// Entry-wise mean of a bit-flipped edge with presence probability lambda:
// lambda (1 - 2p) + p off the diagonal.
inline WeightedMean expected_bitflip(const Matrix& probs, double p) {
  require(detail::is_probability(p), "expected_bitflip: p outside [0,1]");
  detail::check_square(probs, "expected_bitflip");
  const auto n = probs.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double lam = probs(i, j);
      require(detail::is_probability(lam), "expected_bitflip: entry outside [0,1]");
      out(i, j) = lam * (1.0 - 2.0 * p) + p;
    }
  }
  return WeightedMean(std::move(out));
}

template <HasMatrix T>
WeightedMean expected_bitflip(const T& g, double p) {
  return expected_bitflip(g.matrix(), p);
}

// Edge-wise correlation between two independent s-bit-flips of one ER(n, p)
// graph.
inline double er_pair_correlation(double p, double s) {
  require(detail::is_probability(p) && detail::is_probability(s), "er_pair_correlation: arguments outside [0,1]");
  const double marginal = p + s - 2.0 * s * p;
  const double denom = marginal * (1.0 - marginal);
  if (!(denom > 0.0)) {
    throw InvalidArgument("er_pair_correlation: edge marginal is deterministic");
  }
  const double t = 1.0 - 2.0 * s;
  return p * (1.0 - p) * t * t / denom;
}

// Uniformly random permutation of {0, ..., n-1}.
inline Permutation random_permutation(int n, RngSeed rng) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  CounterEngine eng(rng);
  eng.shuffle(m);
  return Permutation(std::move(m));
}

namespace detail {

// Flip each column so that its largest-magnitude entry is positive (first
// such entry on ties).
inline void fix_column_signs(Matrix& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) > best + 1e-12) {
        best = std::abs(u(r, c));
        arg = r;
      }
    }
    if (u(arg, c) < 0.0) u.col(c) *= -1.0;
  }
}

// Top-d eigenvectors by eigenvalue magnitude, scaled by sqrt(|lambda|).
inline Matrix scaled_spectral_embedding(const Matrix& a, int d) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Vector& vals = es.eigenvalues();
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&vals](int x, int y) { return std::abs(vals(x)) > std::abs(vals(y)); });
  Matrix x(a.rows(), d);
  for (int c = 0; c < d; ++c) {
    x.col(c) = es.eigenvectors().col(order[c]) * std::sqrt(std::abs(vals(order[c])));
  }
  return x;
}

}  // namespace detail

// Joint embedding of a graph collection into a common d-dimensional subspace:
// per-graph scaled spectral embeddings are stacked column-wise, U is the
// leading d left singular vectors of the stack, and R_i = U^T A_i U.
// The returned spec clamps probabilities, since U R_i U^T fitted to 0/1 data
// can leave [0, 1].
inline CosieSpec mase_embed(std::span<const Graph> gs, int d) {
  require(!gs.empty(), "mase_embed: no graphs");
  const int n = gs.front().n();
  require(d >= 1 && d <= n, "mase_embed: dimension must satisfy 1 <= d <= n");
  Matrix stacked(n, static_cast<Eigen::Index>(d) * static_cast<Eigen::Index>(gs.size()));
  for (std::size_t i = 0; i < gs.size(); ++i) {
    require(gs[i].n() == n, "mase_embed: dimension mismatch");
    stacked.middleCols(static_cast<Eigen::Index>(i) * d, d) = detail::scaled_spectral_embedding(gs[i].matrix(), d);
  }
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(d);
  // Re-orthonormalize to working precision.
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ() * Matrix::Identity(n, d);
  // Keep the SVD column directions: Q spans the same space column by column
  // up to sign, so align signs before the canonical sign fix.
  for (int c = 0; c < d; ++c) {
    if (q.col(c).dot(u.col(c)) < 0.0) q.col(c) *= -1.0;
  }
  detail::fix_column_signs(q);
  std::vector<Matrix> scores;
  scores.reserve(gs.size());
  for (const Graph& g : gs) {
    Matrix r = q.transpose() * g.matrix() * q;
    scores.push_back((r + r.transpose()) / 2.0);
  }
  return CosieSpec(std::move(q), std::move(scores), ProbabilityPolicy::kClamp);
}

inline CosieSpec mase_embed(const std::vector<Graph>& gs, int d) {
  return mase_embed(std::span<const Graph>(gs), d);
}

}  // namespace cgm
