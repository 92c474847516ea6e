#include "ixai/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ixai/error.hpp"
#include "ixai/kernels.hpp"

namespace ixai {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("metric: length mismatch");
  if (a == 0) throw UserError("metric on an empty set of rows");
}

}  // namespace

double mean_absolute_error(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return kernels::sum_abs_diff(a, b) / static_cast<double>(a.size());
}

double r_squared(std::span<const double> prediction, std::span<const double> truth) {
  check_sizes(prediction.size(), truth.size());
  const double mean =
      std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - prediction[i]) * (truth[i] - prediction[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::numeric_limits<double>::quiet_NaN();
}

double accuracy(std::span<const double> score, std::span<const double> labels,
                double threshold) {
  check_sizes(score.size(), labels.size());
  std::size_t hit = 0;
  for (std::size_t i = 0; i < score.size(); ++i)
    hit += (score[i] >= threshold) == (labels[i] == 1.0);
  return static_cast<double>(hit) / static_cast<double>(score.size());
}

double roc_auc(std::span<const double> score, std::span<const double> labels) {
  check_sizes(score.size(), labels.size());
  const std::size_t n = score.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && score[order[j]] == score[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1.0) {
        rank_sum += avg_rank;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

PredictorMetrics evaluate_predictor(const Predictor& model, const FeatureMatrix& X,
                                    std::span<const double> y, Task task) {
  if (X.rows() == 0) throw UserError("cannot evaluate a predictor on an empty partition");
  const std::vector<double> pred = model.predict_batch(X);
  PredictorMetrics m;
  m.task = task;
  m.rows = X.rows();
  m.mae = mean_absolute_error(pred, y);
  m.r2 = r_squared(pred, y);
  if (task == Task::kClassification) {
    m.accuracy = accuracy(pred, y);
    m.auc = roc_auc(pred, y);
  } else {
    m.accuracy = m.auc = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace ixai
