#pragma once

// Per-instance explanation table, the wire format of /api/explain and the
// `explain` command. All numbers are in display units (the target scaled by
// the dataset's display_scale); every *_display string is derived from the
// matching full-precision field and never read back.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ixai/dataset.hpp"
#include "ixai/explainers.hpp"
#include "json.hpp"

namespace ixai {

inline constexpr int kTableSchemaVersion = 1;

struct FeatureMeta {
  std::string name;
  std::string unit;
  double min = 0.0;  // range over the dataset rows, for meters
  double max = 0.0;
};

// What the presentation and service layers need to know about a dataset.
struct DatasetMeta {
  std::string name;
  std::string display_name;
  Task task = Task::kRegression;
  std::string target_name;
  std::string target_unit;
  double display_scale = 1.0;
  std::vector<FeatureMeta> features;

  bool operator==(const DatasetMeta&) const = default;
};

DatasetMeta make_dataset_meta(const Dataset& data);

struct TableRow {
  std::string name;
  std::string unit;
  double value = 0.0;
  std::string value_display;
  double value_meter = 0.0;  // (value - min) / (max - min), clamped to [0, 1]
  double factor_full = 0.0;  // factor used for the contribution
  std::string factor_display;
  // Incremental outlier rows: factor_full = base_factor + delta.
  std::optional<double> base_factor;
  std::optional<double> delta_full;
  std::optional<std::string> delta_display;
  bool overridden = false;
  double partial_contribution = 0.0;  // factor_full * value
  std::string contribution_display;
};

struct ExplanationTable {
  int schema_version = kTableSchemaVersion;
  std::string xai_type;
  std::string target_name;
  std::string target_unit;
  std::vector<TableRow> rows;
  double adjustment = 0.0;
  std::string adjustment_display;
  std::optional<double> adjustment_base;
  std::optional<double> adjustment_delta;
  std::optional<std::string> adjustment_delta_display;
  bool adjustment_overridden = false;
  // adjustment + sum of partial contributions, summed in row order
  double explainer_estimate = 0.0;
  std::string estimate_display;
  double predictor_prediction = 0.0;
  std::string prediction_display;
  // 100 * (estimate - prediction) / prediction; empty when prediction is 0
  std::optional<double> percent_difference;
  std::optional<std::string> percent_difference_display;
  std::optional<std::string> subspace_label;  // "typical" | "outlier"
  std::optional<std::string> rule_text;       // outlier condition
  bool what_if = false;
};

// Attribute name (or "adjustment") -> factor in display units.
using FactorOverrides = std::map<std::string, double>;

// Rule text for the outlier side, e.g. "Living Area ≥ 2.5 ksqft".
std::string rule_text(const PartitionRule& rule, const DatasetMeta& meta);

// model is the fitted explainer; for Local pass the per-instance
// LinearFactorModel. prediction is the raw predictor output. Throws
// UserError for unknown override names or a wrong instance size.
ExplanationTable build_table(const DatasetMeta& meta, XaiType type,
                             const FittedExplainer& model, std::span<const double> instance,
                             double prediction, const FactorOverrides& overrides = {});

nlohmann::json to_json(const ExplanationTable& t);
ExplanationTable table_from_json(const nlohmann::json& j);

// Aligned plain-text rendering for the terminal.
std::string render_text(const ExplanationTable& t);

}  // namespace ixai
