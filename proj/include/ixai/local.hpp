#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ixai/explainers.hpp"
#include "ixai/matrix.hpp"
#include "ixai/predictor.hpp"

namespace ixai {

struct LocalFit {
  LinearFactorModel model;
  // Features with zero spread; their factor is fixed at 0.
  std::vector<bool> dropped;
  bool ridge_fallback = false;

  bool degenerate() const;
};

// Per-feature sample standard deviation of the columns of X.
std::vector<double> feature_std(const FeatureMatrix& X);

// LIME-style local surrogate around one instance:
//   sample x_j ~ Normal(target_j, perturb_scale * std_j) for each feature,
//   weight each sample by exp(-d^2 / kernel_width^2) where d is the
//   Euclidean distance in units of std, and fit weighted OLS of the
//   blackbox output on the samples.
LocalFit fit_local(std::span<const double> target, const Predictor& blackbox,
                   std::span<const double> feature_std, const LocalConfig& config);

// Seed for a local fit of one instance: base seed XOR a hash of its values,
// so identical instances always get identical factors.
std::uint64_t local_seed(std::uint64_t base_seed, std::span<const double> instance);

}  // namespace ixai
