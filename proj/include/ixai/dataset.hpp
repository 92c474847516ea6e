#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ixai/matrix.hpp"

namespace ixai {

enum class Task { kRegression, kClassification };

std::string to_string(Task task);
Task task_from_string(const std::string& s);

struct Transform {
  enum class Kind { kIdentity, kScale, kDeriveAge };
  Kind kind = Kind::kIdentity;
  double factor = 1.0;            // kScale: value * factor
  std::string reference_column;   // kDeriveAge: year(reference) - value, >= 0
};

struct FeatureSpec {
  std::string name;
  std::string unit;
  std::string source_column;
  Transform transform;
};

// Declarative description of one benchmark table; see configs/*.json.
struct DatasetConfig {
  std::string name;
  std::string display_name;
  std::filesystem::path csv_path;
  Task task = Task::kRegression;
  FeatureSpec target;
  std::vector<FeatureSpec> features;
  std::vector<std::string> missing_markers{"?", "", "NA"};
  // Multiplier applied to the explained target for reports and tables
  // (100 turns a probability into a percentage risk score).
  double display_scale = 1.0;
};

inline constexpr std::size_t kConfigFeatureCount = 4;

// Relative csv paths resolve against the config file's directory.
DatasetConfig load_dataset_config(const std::filesystem::path& path);
DatasetConfig parse_dataset_config(const std::string& json_text,
                                   const std::filesystem::path& base_dir);

struct Dataset {
  std::string name;
  std::string display_name;
  Task task = Task::kRegression;
  FeatureSpec target;
  std::vector<FeatureSpec> features;
  FeatureMatrix X;
  std::vector<double> y;
  double display_scale = 1.0;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;

  std::size_t size() const { return y.size(); }
  std::size_t feature_count() const { return features.size(); }
  std::size_t feature_index(const std::string& name) const;
};

Dataset load_dataset(const DatasetConfig& config);

// Applies a transform to one source cell. reference is only read by
// kDeriveAge. Throws UserError on unparseable text.
double apply_transform(const Transform& t, const std::string& cell,
                       const std::string& reference);

// In-memory dataset for synthetic data; feature names default to x1..xd.
Dataset make_dataset(std::string name, FeatureMatrix X, std::vector<double> y,
                     Task task = Task::kRegression,
                     std::vector<std::string> feature_names = {});

}  // namespace ixai
