#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ixai/dataset.hpp"
#include "ixai/explainers.hpp"
#include "ixai/faithfulness.hpp"
#include "ixai/forest.hpp"
#include "ixai/incremental.hpp"
#include "ixai/metrics.hpp"
#include "ixai/split_plan.hpp"
#include "ixai/sweep.hpp"

namespace ixai {

struct StudyConfig {
  std::uint64_t seed = 0;
  ForestConfig forest;  // forest.seed is ignored; derived from seed
  LocalConfig local;    // local.seed is ignored; set to seed
  double test_fraction = 0.2;
  std::size_t folds = 5;
  // Local unfaithfulness is evaluated on at most this many seeded rows.
  std::size_t local_eval_cap = 300;
  // Fixed lambda for the Incremental explainer; selected once on the whole
  // training partition when empty.
  std::optional<double> lambda;
  IncrementalOptions incremental;
  std::size_t threads = 0;
};

// Seeds used by the study, in one place so the CLI and tests agree.
std::uint64_t forest_seed(std::uint64_t seed, std::size_t fold);  // fold == folds: heldout
std::uint64_t local_sample_seed(std::uint64_t seed, std::size_t fold, bool train_rows);

// Everything measured on one train/evaluate split. Unfaithfulness and
// glassbox values are already multiplied by the dataset's display scale.
struct SplitResult {
  PartitionRule rule;
  double lambda = 0.0;
  std::size_t train_rows = 0;
  std::size_t eval_rows = 0;
  std::array<SubspaceMae, 4> unfaithfulness_eval;   // indexed by XaiType
  std::array<SubspaceMae, 4> unfaithfulness_train;
  // Global, Subglobal, Incremental trained on ground truth: MAE for
  // regression, accuracy for classification.
  std::array<SubspaceMae, 3> glassbox;
  bool glassbox_converged = true;
  PredictorMetrics predictor;
};

struct StudyReport {
  std::string dataset;
  Task task = Task::kRegression;
  std::string unit;  // of unfaithfulness values
  double display_scale = 1.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  LambdaSelection lambda_selection;     // explainer lambda (empty grid when fixed)
  LambdaSelection glassbox_selection;   // glassbox lambda
  std::vector<SplitResult> folds;       // evaluated on fold validation rows
  SplitResult heldout;                  // trained on all training rows, evaluated on test rows
  Forest heldout_forest;
  ExplainerSet heldout_explainers;
  SplitPlan plan;
};

// Hex FNV-1a of the canonical JSON form of the dataset and study configs.
std::string study_config_hash(const Dataset& data, const StudyConfig& config);

StudyReport run_modeling_study(const Dataset& data, const StudyConfig& config);

// Threshold sweep over the training partition. The forest is the heldout one
// (forest_seed(seed, folds)) unless one is passed; the swept feature and the
// learned threshold come from fit_subglobal on its outputs, and lambda from
// config.lambda or select_lambda.
SweepResult run_threshold_sweep(const Dataset& data, const StudyConfig& config,
                                std::span<const double> percentiles,
                                const Forest* forest = nullptr);

// One line of the study summary. folds holds per-fold values; mean and sample std are
// over those. status is "ok", "not_applicable" or "not_converged".
struct ReportRow {
  std::string xai_type;  // global, subglobal, incremental, local, predictor
  std::string subspace;  // combined, typical, outlier
  std::string metric;
  std::string unit;
  std::vector<double> folds;
  double mean = 0.0;
  double std = 0.0;
  std::string status = "ok";
};

std::vector<ReportRow> table_rows(const StudyReport& report);

double mean_of(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

}  // namespace ixai
