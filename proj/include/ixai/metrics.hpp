#pragma once

#include <cstddef>
#include <span>

#include "ixai/dataset.hpp"
#include "ixai/matrix.hpp"
#include "ixai/predictor.hpp"

namespace ixai {

double mean_absolute_error(std::span<const double> a, std::span<const double> b);
double r_squared(std::span<const double> prediction, std::span<const double> truth);
// Fraction of rows where (score >= threshold) equals the label.
double accuracy(std::span<const double> score, std::span<const double> labels,
                double threshold = 0.5);
// Area under the ROC curve via the rank-sum statistic; tied scores share
// their average rank. NaN when only one class is present.
double roc_auc(std::span<const double> score, std::span<const double> labels);

struct PredictorMetrics {
  Task task = Task::kRegression;
  std::size_t rows = 0;
  double mae = 0.0;
  double r2 = 0.0;
  double accuracy = 0.0;  // classification only
  double auc = 0.0;       // classification only
};

// Throws UserError on an empty partition.
PredictorMetrics evaluate_predictor(const Predictor& model, const FeatureMatrix& X,
                                    std::span<const double> y, Task task);

}  // namespace ixai
