#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "ixai/error.hpp"
#include "ixai/forest.hpp"
#include "oracles.hpp"

using namespace ixai;

namespace {

struct Expected {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  std::vector<Expected> kids;
};

double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
  double s = 0.0;
  for (std::size_t r : rows) s += y[r];
  return s / static_cast<double>(rows.size());
}

double sse_of(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
  const double m = mean_of(y, rows);
  double s = 0.0;
  for (std::size_t r : rows) s += (y[r] - m) * (y[r] - m);
  return s;
}

// Exhaustive best-SSE splitting with direct SSE sums.
Expected brute_tree(const FeatureMatrix& X, const std::vector<double>& y,
                    const std::vector<std::size_t>& rows, std::size_t depth,
                    std::size_t max_depth, std::size_t min_leaf) {
  Expected e;
  e.value = mean_of(y, rows);
  if (depth >= max_depth || rows.size() < 2 * min_leaf) return e;
  double best = sse_of(y, rows);
  int bf = -1;
  double bt = 0.0;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::vector<double> v;
    for (std::size_t r : rows) v.push_back(X(r, f));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = 0.5 * (v[i] + v[i + 1]);
      std::vector<std::size_t> l, r;
      for (std::size_t k : rows) (X(k, f) < t ? l : r).push_back(k);
      if (l.size() < min_leaf || r.size() < min_leaf) continue;
      const double s = sse_of(y, l) + sse_of(y, r);
      if (s < best - 1e-12) {
        best = s;
        bf = static_cast<int>(f);
        bt = t;
      }
    }
  }
  if (bf < 0) return e;
  e.feature = bf;
  e.threshold = bt;
  std::vector<std::size_t> l, r;
  for (std::size_t k : rows) (X(k, bf) < bt ? l : r).push_back(k);
  e.kids.push_back(brute_tree(X, y, l, depth + 1, max_depth, min_leaf));
  e.kids.push_back(brute_tree(X, y, r, depth + 1, max_depth, min_leaf));
  return e;
}

void expect_same(const Tree& t, int node, const Expected& e) {
  const TreeNode& n = t.nodes[node];
  ASSERT_EQ(n.feature, e.feature);
  EXPECT_NEAR(n.value, e.value, 1e-12);
  if (n.feature < 0) return;
  EXPECT_DOUBLE_EQ(n.threshold, e.threshold);
  expect_same(t, n.left, e.kids[0]);
  expect_same(t, n.right, e.kids[1]);
}

ForestConfig single_exhaustive_tree(std::size_t depth, std::size_t d) {
  ForestConfig c;
  c.n_trees = 1;
  c.max_depth = depth;
  c.min_samples_leaf = 1;
  c.features_per_split = d;
  c.bootstrap = false;
  return c;
}

}  // namespace

TEST(Forest, DepthZeroPredictsTrainingMean) {
  std::mt19937_64 gen(1);
  const FeatureMatrix X = oracle::random_matrix(30, 4, gen);
  std::vector<double> y(30);
  std::iota(y.begin(), y.end(), 0.0);
  ForestConfig c = single_exhaustive_tree(0, 4);
  const Forest f = train_forest(X, y, Task::kRegression, c);
  EXPECT_DOUBLE_EQ(f.predict(X.row(3)), 14.5);
}

TEST(Forest, ConstantTargetPredictsConstant) {
  std::mt19937_64 gen(2);
  const FeatureMatrix X = oracle::random_matrix(50, 4, gen);
  const std::vector<double> y(50, 7.25);
  const Forest f = train_forest(X, y, Task::kRegression, ForestConfig{});
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(f.predict(oracle::random_matrix(1, 4, gen).row(0)), 7.25);
}

TEST(Forest, SplitsMatchBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(100 + seed);
    const FeatureMatrix X = oracle::random_matrix(20, 3, gen);
    std::vector<double> y(20);
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < 20; ++i) y[i] = 3.0 * X(i, 1) - 2.0 * (X(i, 0) > 0.5) + nd(gen);
    const Forest f = train_forest(X, y, Task::kRegression, single_exhaustive_tree(2, 3));
    std::vector<std::size_t> rows(20);
    std::iota(rows.begin(), rows.end(), 0u);
    expect_same(f.trees()[0], 0, brute_tree(X, y, rows, 0, 2, 1));
  }
}

TEST(Forest, TieBreaksToLowestFeatureThenThreshold) {
  // Columns 0 and 1 are identical, so every split on one ties with the other.
  FeatureMatrix X(8, 2);
  std::vector<double> y(8);
  for (std::size_t i = 0; i < 8; ++i) {
    X(i, 0) = X(i, 1) = static_cast<double>(i);
    y[i] = i < 4 ? 0.0 : 1.0;
  }
  const Forest f = train_forest(X, y, Task::kRegression, single_exhaustive_tree(1, 2));
  EXPECT_EQ(f.trees()[0].nodes[0].feature, 0);
  EXPECT_DOUBLE_EQ(f.trees()[0].nodes[0].threshold, 3.5);
}

TEST(Forest, AveragesTrees) {
  Tree a, b;
  a.nodes.push_back({-1, 0.0, -1, -1, 10.0});
  b.nodes.push_back({-1, 0.0, -1, -1, 20.0});
  const Forest f(Task::kRegression, 4, {a, b});
  EXPECT_EQ(f.predict(std::vector<double>{1, 2, 3, 4}), 15.0);
}

TEST(Forest, DeterministicAndThreadCountInvariant) {
  std::mt19937_64 gen(5);
  const FeatureMatrix X = oracle::random_matrix(300, 4, gen);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = X(i, 0) * 10 + X(i, 2) * X(i, 3);
  ForestConfig c;
  c.n_trees = 20;
  c.seed = 77;
  const Forest a = train_forest(X, y, Task::kRegression, c, 1);
  const Forest b = train_forest(X, y, Task::kRegression, c, 4);
  EXPECT_TRUE(a == b);
  c.seed = 78;
  EXPECT_FALSE(a == train_forest(X, y, Task::kRegression, c, 1));
}

TEST(Forest, RegressionPredictionsStayInTargetRange) {
  std::mt19937_64 gen(6);
  const FeatureMatrix X = oracle::random_matrix(200, 4, gen);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = 100.0 * X(i, 1) * X(i, 1) - 5.0;
  ForestConfig c;
  c.n_trees = 10;
  const Forest f = train_forest(X, y, Task::kRegression, c);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const FeatureMatrix probe = oracle::random_matrix(500, 4, gen, -3.0, 4.0);
  for (double p : f.predict_batch(probe)) {
    EXPECT_GE(p, *lo);
    EXPECT_LE(p, *hi);
  }
  for (std::size_t i = 0; i < 20; ++i)
    EXPECT_EQ(f.predict(probe.row(i)), f.predict_batch(probe)[i]);
}

TEST(Forest, ClassifierOutputsProbabilitiesAndIsMonotoneInAConstantTree) {
  std::mt19937_64 gen(8);
  const FeatureMatrix X = oracle::random_matrix(200, 4, gen);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = X(i, 0) + 0.3 * X(i, 1) > 0.7 ? 1.0 : 0.0;
  ForestConfig c;
  c.n_trees = 15;
  const Forest f = train_forest(X, y, Task::kClassification, c);
  std::vector<Tree> trees = f.trees();
  Tree one;
  one.nodes.push_back({-1, 0.0, -1, -1, 1.0});
  trees[3] = one;
  const Forest g(Task::kClassification, 4, trees);
  const FeatureMatrix probe = oracle::random_matrix(300, 4, gen);
  for (std::size_t i = 0; i < probe.rows(); ++i) {
    const double p = f.predict(probe.row(i));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_GE(g.predict(probe.row(i)), p);
  }
}

TEST(Forest, RejectsBadInput) {
  std::mt19937_64 gen(9);
  const FeatureMatrix X = oracle::random_matrix(20, 4, gen);
  const std::vector<double> y(20, 1.0);
  EXPECT_THROW(train_forest(FeatureMatrix(0, 4), {}, Task::kRegression, ForestConfig{}),
               UserError);
  ForestConfig bad;
  bad.features_per_split = 5;
  EXPECT_THROW(train_forest(X, y, Task::kRegression, bad), UserError);
  const Forest f = train_forest(X, y, Task::kRegression, ForestConfig{});
  EXPECT_THROW(f.predict(std::vector<double>{1, 2, std::numeric_limits<double>::infinity(), 4}),
               UserError);
  EXPECT_THROW(f.predict(std::vector<double>{1, 2}), UserError);
}
