#include "ixai/faithfulness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ixai/error.hpp"
#include "ixai/least_squares.hpp"
#include "ixai/local.hpp"
#include "ixai/parallel.hpp"
#include "ixai/rng.hpp"
#include "ixai/split_search.hpp"

namespace ixai {

double combined_mae(std::size_t n_typical, double mae_typical, std::size_t n_outlier,
                    double mae_outlier) {
  const std::size_t n = n_typical + n_outlier;
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  if (n_typical > 0) sum += static_cast<double>(n_typical) * mae_typical;
  if (n_outlier > 0) sum += static_cast<double>(n_outlier) * mae_outlier;
  return sum / static_cast<double>(n);
}

SubspaceMae subspace_mae(std::span<const double> a, std::span<const double> b,
                         std::span<const Subspace> membership) {
  if (a.size() != b.size() || a.size() != membership.size())
    throw std::invalid_argument("subspace_mae: length mismatch");
  if (a.empty()) throw UserError("unfaithfulness over an empty set of rows");
  double sum_t = 0.0, sum_o = 0.0;
  SubspaceMae r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = std::abs(a[i] - b[i]);
    if (membership[i] == Subspace::kTypical) {
      sum_t += e;
      ++r.n_typical;
    } else {
      sum_o += e;
      ++r.n_outlier;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.typical = r.n_typical ? sum_t / static_cast<double>(r.n_typical) : nan;
  r.outlier = r.n_outlier ? sum_o / static_cast<double>(r.n_outlier) : nan;
  r.combined = combined_mae(r.n_typical, r.typical, r.n_outlier, r.outlier);
  return r;
}

std::vector<Subspace> memberships(const FeatureMatrix& X, const PartitionRule& rule) {
  std::vector<Subspace> out(X.rows());
  const auto col = X.col(rule.feature_index);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const Side side = col[i] < rule.threshold ? Side::kBelow : Side::kAtOrAbove;
    out[i] = side == rule.typical_side ? Subspace::kTypical : Subspace::kOutlier;
  }
  return out;
}

ExplainerSet fit_explainers(const FeatureMatrix& X_train, std::span<const double> yhat_train,
                            double lambda, const LocalConfig& local,
                            const IncrementalOptions& opts) {
  ExplainerSet set;
  set.global = fit_global(X_train, yhat_train);
  set.subglobal = fit_subglobal(X_train, yhat_train, opts.split);
  set.incremental = fit_incremental(X_train, yhat_train, lambda, set.subglobal.rule, opts);
  local.validate();
  set.local = local;
  set.local_std = feature_std(X_train);
  return set;
}

std::vector<double> explainer_estimates(const ExplainerSet& set, XaiType type,
                                        const Predictor& predictor, const FeatureMatrix& X,
                                        std::size_t threads) {
  switch (type) {
    case XaiType::kGlobal:
      return set.global.model.estimate_batch(X);
    case XaiType::kSubglobal:
      return estimate_batch(FittedExplainer{set.subglobal}, X);
    case XaiType::kIncremental:
      return estimate_batch(FittedExplainer{set.incremental}, X);
    case XaiType::kLocal: {
      std::vector<double> out(X.rows());
      parallel_for(
          X.rows(),
          [&](std::size_t i) {
            const std::vector<double> x = X.row(i);
            LocalConfig cfg = set.local;
            cfg.seed = local_seed(set.local.seed, x);
            out[i] = fit_local(x, predictor, set.local_std, cfg).model.estimate(x);
          },
          threads);
      return out;
    }
  }
  throw std::logic_error("unknown xai type");
}

SubspaceMae unfaithfulness(const ExplainerSet& set, XaiType type, const Predictor& predictor,
                           const FeatureMatrix& X, std::size_t threads) {
  const std::vector<double> est = explainer_estimates(set, type, predictor, X, threads);
  const std::vector<double> yhat = predictor.predict_batch(X);
  return subspace_mae(est, yhat, memberships(X, set.rule()));
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n <= cap) return idx;
  Rng rng(seed);
  shuffle(idx, rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace ixai
