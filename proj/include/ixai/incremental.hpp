#pragma once

// Incremental explainer: base factors for every instance plus sparse delta
// factors that apply only in the outlier subspace, trained on
//
//   sum_k (y~_k - yhat_k)^2 + lambda * sum_{r=0..d} |delta_r|
//
// where the sum includes the intercept delta.
//
// The optimizer works in internal coordinates theta = [b_0..b_d, e_0..e_d]:
//   base:  yhat_mean + b_0 + sum_r b_r (x_r - m_r) / s_r
//   delta: e_0 + sum_r e_r x_r / s_r
// The delta block is scaled but not centered, so the raw-unit L1 norm of the
// deltas is exactly sum_j |e_j| * (j == 0 ? 1 : 1 / s_j) and the penalty is
// applied without approximation.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ixai/explainers.hpp"
#include "ixai/matrix.hpp"
#include "ixai/proximal.hpp"
#include "ixai/split_search.hpp"

namespace ixai {

struct IncrementalOptions {
  ProximalOptions solver;
  // Raw-unit deltas smaller than this in magnitude are set to exactly zero.
  double snap = 1e-6;
  // Re-solve the final active set exactly (squared loss only).
  bool polish = true;
  SplitSearchOptions split;
};

// Affine map between internal coordinates and raw-unit parameters.
class IncrementalCoordinates {
 public:
  IncrementalCoordinates() = default;
  IncrementalCoordinates(const FeatureMatrix& X, double target_offset);

  std::size_t features() const { return mean_.size(); }
  std::size_t dim() const { return 2 * (features() + 1); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }
  double target_offset() const { return offset_; }

  // (base, delta) in raw units from theta.
  std::pair<LinearFactorModel, std::vector<double>> to_raw(std::span<const double> theta) const;
  std::vector<double> from_raw(const LinearFactorModel& base,
                               std::span<const double> delta) const;
  // Per-coordinate L1 weights for a given lambda (0 on the base block).
  std::vector<double> l1_weights(double lambda) const;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
  double offset_ = 0.0;
};

// Squared-loss training problem for a fixed rule.
class IncrementalProblem {
 public:
  IncrementalProblem(const FeatureMatrix& X, std::span<const double> yhat,
                     const PartitionRule& rule);

  const IncrementalCoordinates& coords() const { return coords_; }
  const PartitionRule& rule() const { return rule_; }
  std::size_t rows() const { return X_.rows(); }
  std::size_t outlier_rows() const { return outlier_rows_; }

  // Smooth term of the loss at theta, from precomputed moments.
  double smooth_value(std::span<const double> theta) const;
  // Its analytic gradient with respect to theta.
  std::vector<double> smooth_gradient(std::span<const double> theta) const;

  // The same smooth term evaluated directly from the data rows for raw-unit
  // parameters; shares no code path with the moments.
  double rowwise_smooth_loss(const LinearFactorModel& base,
                             std::span<const double> delta) const;

  // Dense quadratic form: smooth_value(theta) = theta' H theta - 2 g' theta + c.
  const std::vector<double>& hessian_half() const { return H_; }
  const std::vector<double>& linear_term() const { return g_; }
  double constant_term() const { return c_; }

 private:
  const FeatureMatrix& X_;
  std::span<const double> yhat_;
  PartitionRule rule_;
  IncrementalCoordinates coords_;
  std::size_t outlier_rows_ = 0;
  std::vector<double> H_;  // dim x dim, row-major
  std::vector<double> g_;
  double c_ = 0.0;
};

// Fits the Incremental explainer. Without a rule, the Subglobal split search
// picks one (scored at lambda = 0).
IncrementalModel fit_incremental(const FeatureMatrix& X, std::span<const double> yhat,
                                 double lambda,
                                 std::optional<PartitionRule> rule = std::nullopt,
                                 const IncrementalOptions& opts = {});

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;        // candidate lambdas, ascending, grid[0] = 0
  // Per candidate: combined training MAE, or mean log-loss for logistic fits.
  std::vector<double> train_score;
};

// Picks the largest lambda from {0} U {1, 10, 100, 1000} * N_outlier / N whose
// combined training MAE is within 5% of the lambda = 0 fit.
LambdaSelection select_lambda(const FeatureMatrix& X, std::span<const double> yhat,
                              const PartitionRule& rule,
                              const IncrementalOptions& opts = {});

}  // namespace ixai
