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

// Exact dense linear assignment.
//
// solve_lap runs a shortest-augmenting-path solver with dual potentials
// (O(n^3)). Among all optimal assignments it returns the lexicographically
// smallest one: the potentials identify the tight edges, and a second pass
// walks rows in order, fixing each to its smallest column that still admits
// a perfect matching on tight edges.

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/graph.hpp"

namespace cgm {

enum class Sense { kMin, kMax };

class CostMatrix {
 public:
  explicit CostMatrix(Matrix values) : values_(std::move(values)) {
    detail::check_square(values_, "CostMatrix");
    require(values_.allFinite(), "CostMatrix: non-finite entry");
  }
  int n() const { return static_cast<int>(values_.rows()); }
  const Matrix& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

 private:
  Matrix values_;
};

// assignment[i] is the column assigned to row i.
struct LapResult {
  Permutation assignment;
  double total = 0.0;
};

namespace detail {

inline double assignment_total(const Matrix& c, const std::vector<int>& rowcol) {
  double total = 0.0;
  for (std::size_t i = 0; i < rowcol.size(); ++i) total += c(static_cast<Eigen::Index>(i), rowcol[i]);
  return total;
}

// Min-cost assignment with potentials: on return c(i,j) - u[i] - v[j] >= 0
// for all (i, j), with equality on the matched pairs.
inline std::vector<int> hungarian(const Matrix& c, std::vector<double>& u, std::vector<double>& v) {
  const int n = static_cast<int>(c.rows());
  const double inf = std::numeric_limits<double>::infinity();
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  std::vector<int> row_of(n + 1, 0), way(n + 1, 0);  // 1-based; column 0 is virtual
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = row_of[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of_row(n);
  for (int j = 1; j <= n; ++j) col_of_row[row_of[j] - 1] = j - 1;
  return col_of_row;
}

// Rewrites `match` (row -> column, perfect on the tight graph) into the
// lexicographically smallest perfect matching of the tight graph.
inline void lexicographic_tight_matching(const std::vector<std::vector<char>>& tight, std::vector<int>& match) {
  const int n = static_cast<int>(match.size());
  std::vector<int> row_of_col(n);
  for (int i = 0; i < n; ++i) row_of_col[match[i]] = i;
  std::vector<char> col_fixed(n, 0);
  std::vector<int> parent_col(n);
  std::vector<char> row_seen(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (col_fixed[j] || !tight[i][j]) continue;
      if (match[i] == j) break;
      // Look for an alternating path from the row holding j to column
      // match[i], through rows > i and unfixed columns other than j.
      const int start = row_of_col[j];
      const int goal = match[i];
      std::fill(row_seen.begin(), row_seen.end(), 0);
      std::fill(parent_col.begin(), parent_col.end(), -1);
      std::deque<int> queue{start};
      row_seen[start] = 1;
      int found_col = -1;
      // parent_col[col] = row that reaches col.
      while (!queue.empty() && found_col < 0) {
        const int r = queue.front();
        queue.pop_front();
        for (int y = 0; y < n; ++y) {
          if (col_fixed[y] || y == j || !tight[r][y] || parent_col[y] >= 0) continue;
          if (y == match[r]) continue;
          parent_col[y] = r;
          if (y == goal) {
            found_col = y;
            break;
          }
          const int next = row_of_col[y];
          if (next > i && !row_seen[next]) {
            row_seen[next] = 1;
            queue.push_back(next);
          }
        }
      }
      if (found_col < 0) continue;
      // Augment: walk back from goal column, each row takes the column it reached.
      int y = found_col;
      while (true) {
        const int r = parent_col[y];
        const int prev = match[r];
        match[r] = y;
        row_of_col[y] = r;
        if (r == start) break;
        y = prev;
      }
      match[i] = j;
      row_of_col[j] = i;
      break;
    }
    col_fixed[match[i]] = 1;
  }
}

}  // namespace detail

inline LapResult solve_lap(const CostMatrix& c, Sense sense = Sense::kMin) {
  const int n = c.n();
  if (n == 0) return {Permutation(std::vector<int>{}), 0.0};
  const Matrix work = sense == Sense::kMin ? c.values() : Matrix(-c.values());
  std::vector<double> u, v;
  std::vector<int> match = detail::hungarian(work, u, v);
  const double scale = std::max(1.0, work.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) tight[i][j] = work(i, j) - u[i + 1] - v[j + 1] <= tol;
    tight[i][match[i]] = 1;
  }
  detail::lexicographic_tight_matching(tight, match);
  const double total = detail::assignment_total(c.values(), match);
  return {Permutation(std::move(match)), total};
}

// Exhaustive optimum in lexicographic order; keeps the first optimum found.
inline LapResult brute_force_lap(const CostMatrix& c, Sense sense = Sense::kMin) {
  const int n = c.n();
  require(n <= 9, "brute_force_lap: n must be at most 9");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_total = detail::assignment_total(c.values(), perm);
  const double eps = 1e-12 * std::max(1.0, c.values().cwiseAbs().maxCoeff());
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double t = detail::assignment_total(c.values(), perm);
    const bool better = sense == Sense::kMin ? t < best_total - eps : t > best_total + eps;
    if (better) {
      best_total = t;
      best = perm;
    }
  }
  return {Permutation(std::move(best)), best_total};
}

}  // namespace cgm
