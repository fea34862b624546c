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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>

#include "cgm/assignment.hpp"
#include "cgm/error.hpp"
#include "test_util.hpp"

namespace cgm {
namespace {

using testing::seed;

// Independent exhaustive search over all n! assignments.
std::pair<std::vector<int>, double> enumerate(const Matrix& c, bool minimize) {
  const int n = static_cast<int>(c.rows());
  std::vector<int> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_total = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  do {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += c(i, perm[i]);
    if (minimize ? t < best_total : t > best_total) {
      best_total = t;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_total};
}

Matrix integer_costs(int n, int levels, RngSeed rng) {
  CounterEngine eng(rng);
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = static_cast<double>(eng.below(levels));
  }
  return c;
}

TEST(SolveLap, IdentityFavoringCost) {
  Matrix c = Matrix::Ones(5, 5);
  c.diagonal().setZero();
  const LapResult r = solve_lap(CostMatrix(c));
  EXPECT_TRUE(r.assignment.is_identity());
  EXPECT_EQ(r.total, 0.0);
}

TEST(SolveLap, HandExample) {
  Matrix c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const LapResult r = solve_lap(CostMatrix(c));
  EXPECT_EQ(r.assignment.map(), (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(r.total, 5.0);
  EXPECT_EQ(enumerate(c, true).second, 5.0);
}

TEST(SolveLap, MatchesExhaustiveOnRandom7x7) {
  for (int t = 0; t < 200; ++t) {
    const Matrix c = testing::random_matrix(7, 7, seed(1, t));
    const auto [perm, total] = enumerate(c, true);
    const LapResult r = solve_lap(CostMatrix(c));
    EXPECT_EQ(r.assignment.map(), perm);
    EXPECT_NEAR(r.total, total, 1e-12);
    const LapResult rmax = solve_lap(CostMatrix(c), Sense::kMax);
    EXPECT_NEAR(rmax.total, enumerate(c, false).second, 1e-12);
  }
}

TEST(SolveLap, TieBreakIsLexicographicallySmallest) {
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 6;
    const Matrix c = integer_costs(n, 3, seed(2, t));
    const auto [perm, total] = enumerate(c, true);  // strict improvement keeps the first optimum
    const LapResult r = solve_lap(CostMatrix(c));
    EXPECT_EQ(r.assignment.map(), perm) << "trial " << t;
    EXPECT_EQ(r.total, total);
    const auto [pmax, tmax] = enumerate(c, false);
    EXPECT_EQ(solve_lap(CostMatrix(c), Sense::kMax).assignment.map(), pmax) << "trial " << t;
    EXPECT_EQ(solve_lap(CostMatrix(c), Sense::kMax).total, tmax);
  }
}

TEST(SolveLap, ConstantMatrixGivesIdentity) {
  EXPECT_TRUE(solve_lap(CostMatrix(Matrix::Constant(6, 6, 3.0))).assignment.is_identity());
  EXPECT_TRUE(solve_lap(CostMatrix(Matrix::Constant(6, 6, 3.0)), Sense::kMax).assignment.is_identity());
}

TEST(SolveLap, AffineInvariance) {
  for (int t = 0; t < 50; ++t) {
    const Matrix c = testing::random_matrix(12, 12, seed(3, t));
    const Permutation base = solve_lap(CostMatrix(c)).assignment;
    EXPECT_EQ(solve_lap(CostMatrix((2.5 * c).array() + 7.0)).assignment, base);
    EXPECT_EQ(solve_lap(CostMatrix(-c), Sense::kMax).assignment, base);
  }
}

TEST(SolveLap, RejectsNonFinite) {
  Matrix c = Matrix::Zero(3, 3);
  c(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(CostMatrix{c}, InvalidArgument);
  c(1, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(CostMatrix{c}, InvalidArgument);
  EXPECT_THROW(CostMatrix(Matrix::Zero(2, 3)), InvalidArgument);
}

TEST(SolveLap, LargerInstancesAreOptimalAgainstRandomSwaps) {
  // 2-opt certificate: no pair exchange improves the solution.
  for (int t = 0; t < 10; ++t) {
    const Matrix c = testing::random_matrix(60, 60, seed(4, t));
    const LapResult r = solve_lap(CostMatrix(c));
    const auto& m = r.assignment.map();
    for (int i = 0; i < 60; ++i) {
      for (int j = i + 1; j < 60; ++j) {
        EXPECT_GE(c(i, m[j]) + c(j, m[i]) - c(i, m[i]) - c(j, m[j]), -1e-12);
      }
    }
  }
}

TEST(BruteForceLap, AgreesWithSolver) {
  for (int t = 0; t < 200; ++t) {
    const Matrix c = testing::random_matrix(5, 5, seed(5, t));
    const LapResult a = brute_force_lap(CostMatrix(c)), b = solve_lap(CostMatrix(c));
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_NEAR(a.total, b.total, 1e-12);
  }
}

TEST(BruteForceLap, SmallCasesAndLimits) {
  EXPECT_TRUE(brute_force_lap(CostMatrix(Matrix::Constant(1, 1, 4.0))).assignment.is_identity());
  EXPECT_TRUE(brute_force_lap(CostMatrix(Matrix::Constant(5, 5, 1.0))).assignment.is_identity());
  EXPECT_TRUE(brute_force_lap(CostMatrix(Matrix::Constant(5, 5, 1.0)), Sense::kMax).assignment.is_identity());
  EXPECT_THROW(brute_force_lap(CostMatrix(Matrix::Zero(10, 10))), InvalidArgument);
}

}  // namespace
}  // namespace cgm
