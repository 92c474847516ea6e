#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ixai/dataset.hpp"
#include "ixai/matrix.hpp"
#include "ixai/predictor.hpp"

namespace ixai {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  std::size_t min_samples_leaf = 5;
  std::size_t features_per_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  // Throws UserError when the config cannot be used with d features.
  void validate(std::size_t feature_count) const;
};

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // rows with x[feature] < threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;      // mean target of the training rows in the node
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
};

// Bagged CART ensemble. Regression leaves hold target means; classification
// leaves hold the fraction of positive labels, so predictions are
// probabilities in [0, 1].
class Forest final : public Predictor {
 public:
  Forest() = default;
  Forest(Task task, std::size_t feature_count, std::vector<Tree> trees);

  double predict(std::span<const double> x) const override;
  std::vector<double> predict_batch(const FeatureMatrix& X) const override;

  Task task() const { return task_; }
  std::size_t feature_count() const { return feature_count_; }
  const std::vector<Tree>& trees() const { return trees_; }

  bool operator==(const Forest& other) const;

 private:
  Task task_ = Task::kRegression;
  std::size_t feature_count_ = 0;
  std::vector<Tree> trees_;
};

// Grows one tree on the given (possibly repeated) sample rows. Splits are the
// exhaustive best-SSE midpoints over a random subset of features_per_split
// features; ties go to the lowest feature index, then the lowest threshold.
Tree grow_tree(const FeatureMatrix& X, std::span<const double> y,
               std::vector<std::size_t> rows, const ForestConfig& config,
               std::uint64_t tree_seed);

// Tree t is grown from mix_seed(config.seed, t); trees are trained in
// parallel and the result is identical to sequential training.
Forest train_forest(const FeatureMatrix& X, std::span<const double> y, Task task,
                    const ForestConfig& config, std::size_t threads = 0);

}  // namespace ixai
