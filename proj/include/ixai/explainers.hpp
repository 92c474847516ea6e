#pragma once

// Surrogate explainer payloads and their evaluation.
//
// Every explainer is built from LinearFactorModel: an intercept (shown to
// users as the "adjustment") plus one factor per attribute, so that
// estimate(x) = intercept + sum_r factor_r * x_r.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ixai/matrix.hpp"

namespace ixai {

enum class XaiType { kGlobal, kSubglobal, kIncremental, kLocal };

std::string to_string(XaiType t);
XaiType xai_type_from_string(const std::string& s);  // throws UserError
inline constexpr XaiType kAllXaiTypes[] = {XaiType::kGlobal, XaiType::kSubglobal,
                                           XaiType::kIncremental, XaiType::kLocal};

struct LinearFactorModel {
  double intercept = 0.0;
  std::vector<double> factors;

  // intercept + factors[0]*x[0] + factors[1]*x[1] + ..., left to right.
  // Throws UserError on a non-finite or wrongly sized instance.
  double estimate(std::span<const double> x) const;
  std::vector<double> estimate_batch(const FeatureMatrix& X) const;
  bool is_finite() const;

  bool operator==(const LinearFactorModel&) const = default;
};

enum class Side { kBelow, kAtOrAbove };
enum class Subspace { kTypical, kOutlier };

std::string to_string(Subspace s);
std::string to_string(Side s);

// One-attribute threshold rule. x[feature_index] < threshold is the "below"
// side; x == threshold belongs to the at-or-above side.
struct PartitionRule {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  Side typical_side = Side::kBelow;

  Side side_of(std::span<const double> x) const;
  Side outlier_side() const {
    return typical_side == Side::kBelow ? Side::kAtOrAbove : Side::kBelow;
  }

  bool operator==(const PartitionRule&) const = default;
};

Subspace subspace_of(const PartitionRule& rule, std::span<const double> x);

// Rule whose typical side is the one holding more of the given rows (the
// below side on a tie).
PartitionRule majority_rule(std::size_t feature_index, double threshold,
                            std::size_t rows_below, std::size_t rows_at_or_above);

struct FitInfo {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  bool converged = true;
  bool ridge_fallback = false;
  bool polished = false;
};

struct GlobalModel {
  LinearFactorModel model;
  FitInfo info;
};

struct SubglobalModel {
  PartitionRule rule;
  LinearFactorModel typical;
  LinearFactorModel outlier;
  FitInfo info;

  const LinearFactorModel& active(std::span<const double> x) const {
    return subspace_of(rule, x) == Subspace::kTypical ? typical : outlier;
  }
  double estimate(std::span<const double> x) const { return active(x).estimate(x); }
};

struct IncrementalModel {
  PartitionRule rule;
  LinearFactorModel base;
  // delta[0] shifts the intercept, delta[r + 1] shifts factor r.
  std::vector<double> delta;
  double lambda = 0.0;
  FitInfo info;

  // Factors in force for outlier instances: base + delta, elementwise.
  LinearFactorModel outlier_effective() const;
  double estimate(std::span<const double> x) const;
  std::size_t nonzero_deltas() const;
  double delta_l1() const;
};

struct LocalConfig {
  std::size_t n_samples = 1000;
  double perturb_scale = 0.2;
  double kernel_width = 1.5;  // 0.75 * sqrt(4 features)
  std::uint64_t seed = 0;

  void validate() const;  // throws UserError
};

// Anything estimate() accepts without needing the blackbox.
using FittedExplainer = std::variant<LinearFactorModel, SubglobalModel, IncrementalModel>;

double estimate(const FittedExplainer& explainer, std::span<const double> x);
std::vector<double> estimate_batch(const FittedExplainer& explainer,
                                   const FeatureMatrix& X);

}  // namespace ixai
