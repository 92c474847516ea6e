#pragma once

// Glassbox variants for binary targets: the linear factor models are passed
// through a logistic activation and trained on binary cross-entropy. Their
// estimate() values are logits; the predicted class is estimate >= 0.

#include <cstddef>
#include <span>

#include "ixai/explainers.hpp"
#include "ixai/incremental.hpp"
#include "ixai/matrix.hpp"

namespace ixai {

double sigmoid(double z);

struct LogisticOptions {
  std::size_t max_newton_iterations = 100;
  double relative_tolerance = 1e-10;
  ProximalOptions solver;  // incremental fits
};

// Mean binary cross-entropy of logits against labels in {0, 1}.
double mean_log_loss(std::span<const double> logits, std::span<const double> labels);

// Newton-Raphson with step halving. info.converged is false when the
// iteration cap is hit (e.g. separable data, where the MLE does not exist).
GlobalModel fit_logistic(const FeatureMatrix& X, std::span<const double> labels,
                         const LogisticOptions& opts = {});

SubglobalModel fit_logistic_subglobal(const FeatureMatrix& X, std::span<const double> labels,
                                      const PartitionRule& rule,
                                      const LogisticOptions& opts = {});

// Cross-entropy analogue of fit_incremental, same coordinates and penalty.
IncrementalModel fit_logistic_incremental(const FeatureMatrix& X,
                                          std::span<const double> labels, double lambda,
                                          const PartitionRule& rule,
                                          const LogisticOptions& opts = {});

// Same grid as select_lambda; keeps the largest lambda whose training mean
// log-loss is within 5% of the lambda = 0 fit.
LambdaSelection select_logistic_lambda(const FeatureMatrix& X,
                                       std::span<const double> labels,
                                       const PartitionRule& rule,
                                       const LogisticOptions& opts = {});

}  // namespace ixai
