#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ixai/explainers.hpp"
#include "ixai/incremental.hpp"
#include "ixai/matrix.hpp"
#include "ixai/predictor.hpp"

namespace ixai {

// Per-subspace mean absolute error. An empty subspace has mae NaN and
// contributes nothing to the combined value.
struct SubspaceMae {
  double combined = 0.0;
  double typical = 0.0;
  double outlier = 0.0;
  std::size_t n_typical = 0;
  std::size_t n_outlier = 0;

  double get(Subspace s) const { return s == Subspace::kTypical ? typical : outlier; }
};

// (n_t * mae_t + n_o * mae_o) / (n_t + n_o), empty sides skipped.
double combined_mae(std::size_t n_typical, double mae_typical, std::size_t n_outlier,
                    double mae_outlier);

// Splits |a - b| by membership and averages each side. Throws UserError when
// there are no rows at all.
SubspaceMae subspace_mae(std::span<const double> a, std::span<const double> b,
                         std::span<const Subspace> membership);

std::vector<Subspace> memberships(const FeatureMatrix& X, const PartitionRule& rule);

// The four explainers fitted against one set of predictor outputs.
struct ExplainerSet {
  GlobalModel global;
  SubglobalModel subglobal;
  IncrementalModel incremental;
  LocalConfig local;
  // Perturbation spread for Local, taken from the training rows.
  std::vector<double> local_std;

  const PartitionRule& rule() const { return subglobal.rule; }
};

// Global and Subglobal by least squares, Incremental at the given lambda on
// the Subglobal rule, and the Local configuration.
ExplainerSet fit_explainers(const FeatureMatrix& X_train, std::span<const double> yhat_train,
                            double lambda, const LocalConfig& local,
                            const IncrementalOptions& opts = {});

// Estimates of one explainer type on each row of X. Local fits a fresh
// model per row against the predictor with seed local_seed(local.seed, x).
std::vector<double> explainer_estimates(const ExplainerSet& set, XaiType type,
                                        const Predictor& predictor, const FeatureMatrix& X,
                                        std::size_t threads = 0);

// Mean |estimate - predictor| over the rows of X, split by the set's rule.
SubspaceMae unfaithfulness(const ExplainerSet& set, XaiType type, const Predictor& predictor,
                           const FeatureMatrix& X, std::size_t threads = 0);

// Up to `cap` distinct row indices from [0, n), ascending, chosen by a seeded
// shuffle; all of them when n <= cap.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t cap, std::uint64_t seed);

}  // namespace ixai
