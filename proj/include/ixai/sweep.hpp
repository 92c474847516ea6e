#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ixai/explainers.hpp"
#include "ixai/incremental.hpp"
#include "ixai/matrix.hpp"

namespace ixai {

// "lo:hi:step" in percent, inclusive of hi when it lands on the grid.
// Throws UserError on malformed text or values outside [0, 100].
std::vector<double> parse_percentile_grid(const std::string& spec);

// Linear interpolation at p/100 * (n - 1) over the sorted values.
double percentile(std::vector<double> values, double p);

// One fixed threshold. Sides are named by the comparison, not by size:
// "below" is x < threshold.
struct SweepPoint {
  double percentile = 0.0;
  double threshold = 0.0;
  bool skipped = false;  // a side fell under the minimum subspace size
  std::size_t n_below = 0;
  std::size_t n_at_or_above = 0;
  Side typical_side = Side::kBelow;  // base side of the Incremental fit

  double subglobal_mae_below = 0.0;
  double subglobal_mae_at_or_above = 0.0;
  double subglobal_mae_combined = 0.0;
  double incremental_mae_below = 0.0;
  double incremental_mae_at_or_above = 0.0;
  double incremental_mae_combined = 0.0;

  LinearFactorModel subglobal_below;
  LinearFactorModel subglobal_at_or_above;
  LinearFactorModel incremental_below;        // effective factors per side
  LinearFactorModel incremental_at_or_above;
  std::vector<double> delta;                  // outlier minus base, d + 1 values
};

struct SweepResult {
  std::size_t feature_index = 0;
  double lambda = 0.0;
  double learned_threshold = 0.0;
  LinearFactorModel global;
  std::vector<SweepPoint> points;

  // Index of the lowest combined MAE among points that were not skipped;
  // the first one on ties.
  std::optional<std::size_t> subglobal_min() const;
  std::optional<std::size_t> incremental_min() const;

  // True when learned_threshold lies between the grid neighbours of the
  // Subglobal minimum.
  bool minimum_matches_learned() const;
  // A point where some factor delta is exactly 0 while the two Subglobal
  // sides disagree on that factor.
  bool has_zero_delta_with_differing_subglobal() const;

  // Min-max normalized copy of a curve over the non-skipped points (NaN for
  // skipped ones). A flat curve normalizes to 0.
  static std::vector<double> normalize(const std::vector<double>& curve,
                                       const std::vector<bool>& skipped);
};

// Fits Subglobal and Incremental at each percentile threshold of the given
// feature and measures their MAE against yhat on the same rows.
SweepResult threshold_sweep(const FeatureMatrix& X, std::span<const double> yhat,
                            std::size_t feature_index, std::span<const double> percentiles,
                            double lambda, double learned_threshold,
                            const IncrementalOptions& opts = {});

}  // namespace ixai
