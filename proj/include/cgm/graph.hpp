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

// Dense graph and permutation types shared by every other module.
//
// Orientation convention: a Permutation p acts on a graph as P g P^T where
// P[p(i)][i] = 1, so that the permuted graph satisfies
// result[p(i)][p(j)] == g[i][j].

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cgm/error.hpp"

namespace cgm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class GraphKind { kBinary, kWeighted };

inline const char* to_string(GraphKind kind) {
  return kind == GraphKind::kBinary ? "binary" : "weighted";
}

namespace detail {

inline void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix is not square (" +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ")");
  }
}

inline void check_symmetric_hollow(const Matrix& m, const char* what) {
  check_square(m, what);
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) {
      throw InvalidArgument(std::string(what) + ": nonzero diagonal at " +
                            std::to_string(i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (m(i, j) != m(j, i)) {
        throw InvalidArgument(std::string(what) + ": asymmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ")");
      }
      if (!std::isfinite(m(i, j))) {
        throw InvalidArgument(std::string(what) + ": non-finite entry");
      }
    }
  }
}

}  // namespace detail

// Square, symmetric, hollow adjacency matrix. Immutable once built.
class Graph {
 public:
  Graph() = default;

  // Validates symmetry, a zero diagonal, and for binary graphs that every
  // entry is 0 or 1.
  Graph(Matrix weights, GraphKind kind) : weights_(std::move(weights)), kind_(kind) {
    detail::check_symmetric_hollow(weights_, "Graph");
    require(weights_.rows() >= 1, "Graph: vertex count must be positive");
    if (kind_ == GraphKind::kBinary) {
      for (Eigen::Index k = 0; k < weights_.size(); ++k) {
        const double w = weights_.data()[k];
        if (w != 0.0 && w != 1.0) {
          throw InvalidArgument("Graph: binary graph has entry " + std::to_string(w));
        }
      }
    }
  }

  static Graph binary(Matrix m) { return Graph(std::move(m), GraphKind::kBinary); }
  static Graph weighted(Matrix m) { return Graph(std::move(m), GraphKind::kWeighted); }
  static Graph empty(int n) { return binary(Matrix::Zero(n, n)); }
  static Graph complete(int n) {
    Matrix m = Matrix::Ones(n, n);
    m.diagonal().setZero();
    return binary(std::move(m));
  }

  int n() const { return static_cast<int>(weights_.rows()); }
  GraphKind kind() const { return kind_; }
  bool is_binary() const { return kind_ == GraphKind::kBinary; }
  const Matrix& matrix() const { return weights_; }
  double operator()(int i, int j) const { return weights_(i, j); }

  // Number of undirected edges (binary) or total undirected weight.
  double edge_weight_total() const { return weights_.sum() / 2.0; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.kind_ == b.kind_ && a.weights_ == b.weights_;
  }

 private:
  Matrix weights_;
  GraphKind kind_ = GraphKind::kBinary;
};

// Entry-wise (weighted) average of graphs. Symmetric and hollow; entries lie
// in [0, max input weight].
class WeightedMean {
 public:
  WeightedMean() = default;
  explicit WeightedMean(Matrix values) : values_(std::move(values)) {
    detail::check_symmetric_hollow(values_, "WeightedMean");
  }
  int n() const { return static_cast<int>(values_.rows()); }
  const Matrix& matrix() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

 private:
  Matrix values_;
};

template <class T>
concept HasMatrix = requires(const T& t) {
  { t.matrix() } -> std::same_as<const Matrix&>;
};

inline const Matrix& as_matrix(const Matrix& m) { return m; }
template <HasMatrix T>
const Matrix& as_matrix(const T& t) {
  return t.matrix();
}

// Bijection on {0, ..., n-1}; map()[i] is the image of vertex i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> map) : map_(std::move(map)) {
    std::vector<char> seen(map_.size(), 0);
    for (int v : map_) {
      if (v < 0 || static_cast<std::size_t>(v) >= map_.size() || seen[v]) {
        throw InvalidArgument("Permutation: map is not a bijection");
      }
      seen[v] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  int n() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[i]; }
  const std::vector<int>& map() const { return map_; }

  Permutation inverse() const {
    std::vector<int> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = static_cast<int>(i);
    return Permutation(std::move(inv));
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (map_[i] != static_cast<int>(i)) return false;
    }
    return true;
  }

  // Number of vertices not fixed by the permutation.
  int moved_count() const {
    int k = 0;
    for (std::size_t i = 0; i < map_.size(); ++i) k += map_[i] != static_cast<int>(i);
    return k;
  }

  // Matrix view: P[p(i)][i] = 1.
  Matrix matrix() const {
    Matrix p = Matrix::Zero(n(), n());
    for (int i = 0; i < n(); ++i) p(map_[i], i) = 1.0;
    return p;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> map_;
};

// (outer ∘ inner)(i) = outer(inner(i)); matrix of the result is Outer * Inner.
inline Permutation compose(const Permutation& outer, const Permutation& inner) {
  require(outer.n() == inner.n(), "compose: size mismatch");
  std::vector<int> m(inner.n());
  for (int i = 0; i < inner.n(); ++i) m[i] = outer(inner(i));
  return Permutation(std::move(m));
}

// Matrix whose (p(i), p(j)) entry is m(i, j), i.e. P m P^T.
inline Matrix permute_matrix(const Matrix& m, const Permutation& p) {
  detail::check_square(m, "permute_matrix");
  require(p.n() == m.rows(), "permute: permutation size " + std::to_string(p.n()) +
                                 " does not match matrix order " + std::to_string(m.rows()));
  const int n = p.n();
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) {
    const int pj = p(j);
    for (int i = 0; i < n; ++i) out(p(i), pj) = m(i, j);
  }
  return out;
}

inline Graph permute_graph(const Graph& g, const Permutation& p) {
  return Graph(permute_matrix(g.matrix(), p), g.kind());
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "frobenius_distance: shape mismatch");
  return (a - b).norm();
}

template <class A, class B>
  requires(HasMatrix<A> || std::same_as<A, Matrix>) && (HasMatrix<B> || std::same_as<B, Matrix>)
double frobenius_distance(const A& a, const B& b) {
  return frobenius_distance(as_matrix(a), as_matrix(b));
}

// tr(b · P a P^T) = sum_{u,v} b[p(u)][p(v)] · a[v][u].
inline double trace_objective(const Matrix& a, const Matrix& b, const Permutation& p) {
  detail::check_square(a, "trace_objective");
  detail::check_square(b, "trace_objective");
  require(a.rows() == b.rows() && p.n() == a.rows(), "trace_objective: dimension mismatch");
  const int n = p.n();
  double total = 0.0;
  for (int u = 0; u < n; ++u) {
    const int pu = p(u);
    for (int v = 0; v < n; ++v) total += b(pu, p(v)) * a(v, u);
  }
  return total;
}

template <class A, class B>
  requires(HasMatrix<A> || std::same_as<A, Matrix>) && (HasMatrix<B> || std::same_as<B, Matrix>)
double trace_objective(const A& a, const B& b, const Permutation& p) {
  return trace_objective(as_matrix(a), as_matrix(b), p);
}

inline Graph complement_graph(const Graph& g) {
  require(g.is_binary(), "complement_graph: weighted graphs have no complement");
  Matrix m = Matrix::Ones(g.n(), g.n()) - g.matrix();
  m.diagonal().setZero();
  return Graph::binary(std::move(m));
}

// Entry-wise average of `gs`, optionally weighted. Weights must be
// nonnegative with a positive sum; uniform when empty.
inline WeightedMean mean_graph(std::span<const Graph> gs, std::span<const double> weights = {}) {
  require(!gs.empty(), "mean_graph: empty graph list");
  require(weights.empty() || weights.size() == gs.size(),
          "mean_graph: weights length does not match graph count");
  const int n = gs.front().n();
  Matrix acc = Matrix::Zero(n, n);
  double total = 0.0;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    require(gs[k].n() == n, "mean_graph: dimension mismatch");
    const double w = weights.empty() ? 1.0 : weights[k];
    require(w >= 0.0 && std::isfinite(w), "mean_graph: weights must be nonnegative");
    acc += w * gs[k].matrix();
    total += w;
  }
  require(total > 0.0, "mean_graph: weights sum to zero");
  acc /= total;
  return WeightedMean(std::move(acc));
}

inline WeightedMean mean_graph(const std::vector<Graph>& gs,
                               const std::vector<double>& weights = {}) {
  return mean_graph(std::span<const Graph>(gs), std::span<const double>(weights));
}

}  // namespace cgm
