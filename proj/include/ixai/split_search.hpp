#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ixai/error.hpp"
#include "ixai/explainers.hpp"
#include "ixai/matrix.hpp"

namespace ixai {

struct SplitSearchOptions {
  // Up to this many rows every midpoint between sorted unique values is a
  // candidate; above it, the 1st..99th percentiles are.
  std::size_t exhaustive_max_rows = 5000;
  std::size_t min_rows = 6;
  double min_fraction = 0.05;
  // Candidates re-scored with exact per-side fits after the prefix scan.
  std::size_t rescore_top = 8;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t n_below = 0;
  std::size_t n_at_or_above = 0;
  double sse = 0.0;  // SSE(OLS below) + SSE(OLS at-or-above)
};

class NoAdmissibleSplit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// max(min_rows, ceil(min_fraction * n))
std::size_t min_subspace_rows(std::size_t n, const SplitSearchOptions& opts = {});

// Ascending candidate thresholds for one feature column.
std::vector<double> candidate_thresholds(std::span<const double> values,
                                         const SplitSearchOptions& opts = {});

// Exact combined SSE of separate OLS fits on the two sides of the split, or
// nullopt when a side is below min_subspace_rows.
std::optional<SplitCandidate> score_split(const FeatureMatrix& X, std::span<const double> y,
                                          std::size_t feature, double threshold,
                                          const SplitSearchOptions& opts = {});

// Minimizes score_split over every feature and candidate threshold. Ties go
// to the lower feature index, then the lower threshold.
// Throws NoAdmissibleSplit when no candidate leaves both sides large enough.
SplitCandidate find_best_split(const FeatureMatrix& X, std::span<const double> y,
                               const SplitSearchOptions& opts = {});

SubglobalModel fit_subglobal(const FeatureMatrix& X, std::span<const double> yhat,
                             const SplitSearchOptions& opts = {});

// OLS per subspace of a given rule. Throws NoAdmissibleSplit when a subspace
// has fewer than opts.min_rows rows.
SubglobalModel fit_subglobal(const FeatureMatrix& X, std::span<const double> yhat,
                             const PartitionRule& rule,
                             const SplitSearchOptions& opts = {});

// Row indices of X on each side of the rule, ascending.
struct RulePartition {
  std::vector<std::size_t> typical;
  std::vector<std::size_t> outlier;
};
RulePartition partition_rows(const FeatureMatrix& X, const PartitionRule& rule);

}  // namespace ixai
