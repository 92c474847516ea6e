#pragma once

#include <cstddef>
#include <span>

#include "ixai/explainers.hpp"
#include "ixai/matrix.hpp"

namespace ixai {

struct OlsFit {
  LinearFactorModel model;
  bool ridge_fallback = false;
  double sse = 0.0;  // sum_i w_i (y_i - estimate_i)^2 over the fitted rows
};

// Weighted least squares of y on [1, X]. Columns are centered and scaled
// internally and the solution is mapped back to raw units. When the
// standardized normal equations are not positive definite, a ridge of
// 1e-8 * mean(diag) is added and ridge_fallback is set.
// Empty weights means unit weights.
OlsFit fit_ols(const FeatureMatrix& X, std::span<const double> y,
               std::span<const double> weights = {});

// Global explainer: OLS of the predictor output on all training rows.
// Throws UserError for fewer than 6 rows.
GlobalModel fit_global(const FeatureMatrix& X, std::span<const double> yhat);

// Sum of squared residuals of a model over rows, computed row by row.
double sum_squared_error(const LinearFactorModel& m, const FeatureMatrix& X,
                         std::span<const double> y);

}  // namespace ixai
