#include "ixai/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ixai/error.hpp"
#include "ixai/parallel.hpp"
#include "ixai/rng.hpp"

namespace ixai {

std::vector<double> Predictor::predict_batch(const FeatureMatrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i));
  return out;
}

void ForestConfig::validate(std::size_t feature_count) const {
  if (n_trees < 1) throw UserError("forest: n_trees must be >= 1");
  if (min_samples_leaf < 1) throw UserError("forest: min_samples_leaf must be >= 1");
  if (features_per_split < 1 || features_per_split > feature_count)
    throw UserError("forest: features_per_split must lie in [1, " +
                    std::to_string(feature_count) + "]");
}

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[n.feature] < n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return best;
}

Forest::Forest(Task task, std::size_t feature_count, std::vector<Tree> trees)
    : task_(task), feature_count_(feature_count), trees_(std::move(trees)) {
  if (trees_.empty()) throw std::invalid_argument("Forest: no trees");
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != feature_count_)
    throw UserError("forest expects " + std::to_string(feature_count_) + " features");
  for (double v : x)
    if (!std::isfinite(v)) throw UserError("forest input contains a non-finite value");
  double sum = 0.0;
  for (const Tree& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> Forest::predict_batch(const FeatureMatrix& X) const {
  if (X.cols() != feature_count_)
    throw UserError("forest expects " + std::to_string(feature_count_) + " features");
  std::vector<double> out(X.rows());
  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (X.rows() + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> row(feature_count_);
    const std::size_t end = std::min(X.rows(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      for (std::size_t j = 0; j < feature_count_; ++j) row[j] = X(i, j);
      out[i] = predict(row);
    }
  });
  return out;
}

bool Forest::operator==(const Forest& other) const {
  if (task_ != other.task_ || feature_count_ != other.feature_count_ ||
      trees_.size() != other.trees_.size())
    return false;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto& a = trees_[t].nodes;
    const auto& b = other.trees_[t].nodes;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].feature != b[i].feature || a[i].threshold != b[i].threshold ||
          a[i].left != b[i].left || a[i].right != b[i].right ||
          a[i].value != b[i].value)
        return false;
  }
  return true;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // S_L^2/n_L + S_R^2/n_R; larger is better
};

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& X, std::span<const double> y,
             const ForestConfig& config, Rng& rng)
      : X_(X), y_(y), config_(config), rng_(rng) {}

  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (std::size_t r : rows) sum += y_[r];
    const double n = static_cast<double>(rows.size());
    tree_.nodes[id].value = sum / n;

    if (depth >= config_.max_depth || rows.size() < 2 * config_.min_samples_leaf ||
        is_pure(rows))
      return id;

    const SplitChoice split = best_split(rows, sum);
    if (split.feature < 0 || !(split.score > sum * sum / n)) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (X_(r, split.feature) < split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  Tree take() { return std::move(tree_); }

 private:
  bool is_pure(const std::vector<std::size_t>& rows) const {
    const double first = y_[rows.front()];
    return std::all_of(rows.begin(), rows.end(),
                       [&](std::size_t r) { return y_[r] == first; });
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = X_.cols();
    std::vector<std::size_t> f(d);
    std::iota(f.begin(), f.end(), std::size_t{0});
    if (config_.features_per_split >= d) return f;
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < config_.features_per_split; ++i) {
      const std::size_t j = i + rng_.uniform_index(d - i);
      std::swap(f[i], f[j]);
    }
    f.resize(config_.features_per_split);
    std::sort(f.begin(), f.end());
    return f;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, double total) {
    SplitChoice best;
    const std::size_t n = rows.size();
    const std::size_t min_leaf = config_.min_samples_leaf;
    std::vector<std::pair<double, double>> xy(n);
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < n; ++i) xy[i] = {X_(rows[i], f), y_[rows[i]]};
      std::sort(xy.begin(), xy.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left += xy[i - 1].second;
        if (i < min_leaf || n - i < min_leaf) continue;
        if (!(xy[i - 1].first < xy[i].first)) continue;
        const double right = total - left;
        const double score = left * left / static_cast<double>(i) +
                             right * right / static_cast<double>(n - i);
        if (best.feature < 0 || score > best.score) {
          double thr = 0.5 * (xy[i - 1].first + xy[i].first);
          if (!(thr > xy[i - 1].first)) thr = xy[i].first;
          best = {static_cast<int>(f), thr, score};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& X_;
  std::span<const double> y_;
  const ForestConfig& config_;
  Rng& rng_;
  Tree tree_;
};

}  // namespace

Tree grow_tree(const FeatureMatrix& X, std::span<const double> y,
               std::vector<std::size_t> rows, const ForestConfig& config,
               std::uint64_t tree_seed) {
  if (rows.empty()) throw UserError("cannot grow a tree on zero rows");
  Rng rng(tree_seed);
  TreeGrower grower(X, y, config, rng);
  grower.grow(rows, 0);
  return grower.take();
}

Forest train_forest(const FeatureMatrix& X, std::span<const double> y, Task task,
                    const ForestConfig& config, std::size_t threads) {
  if (X.rows() == 0) throw UserError("cannot train a forest on an empty partition");
  if (X.rows() != y.size()) throw std::invalid_argument("train_forest: size mismatch");
  config.validate(X.cols());
  for (double v : y)
    if (!std::isfinite(v)) throw UserError("training target contains a non-finite value");

  std::vector<Tree> trees(config.n_trees);
  parallel_for(
      config.n_trees,
      [&](std::size_t t) {
        const std::uint64_t seed = mix_seed(config.seed, t);
        std::vector<std::size_t> rows(X.rows());
        if (config.bootstrap) {
          Rng rng(seed);
          for (auto& r : rows) r = rng.uniform_index(X.rows());
        } else {
          std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        // Feature subsampling draws from a second stream of the tree seed.
        trees[t] = grow_tree(X, y, std::move(rows), config, mix_seed(seed, 1));
      },
      threads);
  return Forest(task, X.cols(), std::move(trees));
}

}  // namespace ixai
