#include "ixai/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ixai/csv.hpp"
#include "ixai/error.hpp"
#include "json.hpp"

namespace ixai {

using nlohmann::json;

std::string to_string(Task task) {
  return task == Task::kClassification ? "classification" : "regression";
}

Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::kRegression;
  if (s == "classification") return Task::kClassification;
  throw UserError("unknown task '" + s + "' (expected regression|classification)");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

Transform parse_transform(const json& j) {
  Transform t;
  if (j.is_null()) return t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") {
    t.kind = Transform::Kind::kIdentity;
  } else if (kind == "scale") {
    t.kind = Transform::Kind::kScale;
    t.factor = j.at("factor").get<double>();
    if (!(t.factor > 0.0) || !std::isfinite(t.factor))
      throw UserError("scale transform needs a positive finite factor");
  } else if (kind == "derive_age") {
    t.kind = Transform::Kind::kDeriveAge;
    t.reference_column = j.at("reference_column").get<std::string>();
  } else {
    throw UserError("unknown transform kind '" + kind + "'");
  }
  return t;
}

FeatureSpec parse_feature(const json& j) {
  FeatureSpec f;
  f.name = j.at("name").get<std::string>();
  f.unit = j.value("unit", std::string{});
  f.source_column = j.at("source_column").get<std::string>();
  f.transform = parse_transform(j.value("transform", json()));
  return f;
}

}  // namespace

DatasetConfig parse_dataset_config(const std::string& json_text,
                                   const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UserError(std::string("dataset config is not valid JSON: ") + e.what());
  }
  DatasetConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    c.display_name = j.value("display_name", c.name);
    std::filesystem::path csv = j.at("csv").get<std::string>();
    c.csv_path = csv.is_absolute() ? csv : base_dir / csv;
    c.task = task_from_string(j.at("task").get<std::string>());
    c.target = parse_feature(j.at("target"));
    for (const auto& f : j.at("features")) c.features.push_back(parse_feature(f));
    if (j.contains("missing_markers"))
      c.missing_markers = j.at("missing_markers").get<std::vector<std::string>>();
    c.display_scale = j.value("display_scale", 1.0);
  } catch (const json::exception& e) {
    throw UserError(std::string("dataset config: ") + e.what());
  }
  if (c.features.size() != kConfigFeatureCount)
    throw UserError("dataset config must declare exactly " +
                    std::to_string(kConfigFeatureCount) + " features");
  std::set<std::string> names;
  for (const auto& f : c.features)
    if (!names.insert(f.name).second)
      throw UserError("duplicate feature name '" + f.name + "'");
  if (!(c.display_scale > 0.0)) throw UserError("display_scale must be positive");
  return c;
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open dataset config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_config(buf.str(), path.parent_path());
}

double apply_transform(const Transform& t, const std::string& cell,
                       const std::string& reference) {
  double v = 0.0;
  if (!parse_double(cell, v))
    throw UserError("cannot parse numeric value '" + cell + "'");
  switch (t.kind) {
    case Transform::Kind::kIdentity:
      return v;
    case Transform::Kind::kScale:
      return v * t.factor;
    case Transform::Kind::kDeriveAge: {
      const std::string_view ref = trim(reference);
      double year = 0.0;
      if (ref.size() < 4 || !parse_double(ref.substr(0, 4), year))
        throw UserError("cannot parse year from '" + reference + "'");
      return std::max(0.0, year - v);
    }
  }
  return v;
}

std::size_t Dataset::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  throw UserError("unknown feature '" + name + "'");
}

Dataset load_dataset(const DatasetConfig& config) {
  const CsvTable table = read_csv(config.csv_path);

  struct Column {
    std::size_t source;
    std::size_t reference;
  };
  auto resolve = [&](const FeatureSpec& f) {
    Column c{table.column(f.source_column), 0};
    if (f.transform.kind == Transform::Kind::kDeriveAge)
      c.reference = table.column(f.transform.reference_column);
    return c;
  };
  std::vector<Column> cols;
  for (const auto& f : config.features) cols.push_back(resolve(f));
  const Column target_col = resolve(config.target);

  auto is_missing = [&](const std::string& cell) {
    const std::string_view t = trim(cell);
    return std::any_of(config.missing_markers.begin(), config.missing_markers.end(),
                       [&](const std::string& m) { return t == m; });
  };

  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& rec = table.rows[r];
    auto cell_value = [&](const FeatureSpec& f, const Column& c) {
      try {
        return apply_transform(f.transform, rec[c.source], rec[c.reference]);
      } catch (const UserError& e) {
        throw UserError(config.csv_path.string() + ": data row " +
                        std::to_string(r + 1) + ", column '" + f.source_column +
                        "': " + e.what());
      }
    };
    bool missing = is_missing(rec[target_col.source]);
    for (std::size_t j = 0; j < cols.size() && !missing; ++j) {
      missing = is_missing(rec[cols[j].source]) ||
                (config.features[j].transform.kind == Transform::Kind::kDeriveAge &&
                 is_missing(rec[cols[j].reference]));
    }
    if (missing) {
      ++dropped;
      continue;
    }
    std::vector<double> row(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      row[j] = cell_value(config.features[j], cols[j]);
    const double target = cell_value(config.target, target_col);
    if (config.task == Task::kClassification && target != 0.0 && target != 1.0)
      throw UserError(config.csv_path.string() + ": data row " + std::to_string(r + 1) +
                      ": classification target must be 0 or 1");
    rows.push_back(std::move(row));
    y.push_back(target);
  }
  if (rows.empty())
    throw UserError(config.csv_path.string() + ": every row was dropped");

  Dataset d;
  d.name = config.name;
  d.display_name = config.display_name;
  d.task = config.task;
  d.target = config.target;
  d.features = config.features;
  d.X = FeatureMatrix::from_rows(rows);
  d.y = std::move(y);
  d.display_scale = config.display_scale;
  d.rows_read = table.rows.size();
  d.rows_dropped = dropped;
  return d;
}

Dataset make_dataset(std::string name, FeatureMatrix X, std::vector<double> y,
                     Task task, std::vector<std::string> feature_names) {
  if (X.rows() != y.size()) throw std::invalid_argument("make_dataset: size mismatch");
  Dataset d;
  d.name = name;
  d.display_name = std::move(name);
  d.task = task;
  d.target = {"y", "", "y", {}};
  for (std::size_t j = 0; j < X.cols(); ++j) {
    FeatureSpec f;
    f.name = j < feature_names.size() ? feature_names[j] : "x" + std::to_string(j + 1);
    f.source_column = f.name;
    d.features.push_back(std::move(f));
  }
  d.X = std::move(X);
  d.y = std::move(y);
  d.rows_read = d.y.size();
  return d;
}

}  // namespace ixai
