#include "ixai/table.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ixai/display.hpp"
#include "ixai/error.hpp"

namespace ixai {

using nlohmann::json;

DatasetMeta make_dataset_meta(const Dataset& data) {
  DatasetMeta m;
  m.name = data.name;
  m.display_name = data.display_name.empty() ? data.name : data.display_name;
  m.task = data.task;
  m.target_name = data.target.name;
  m.target_unit = data.target.unit;
  m.display_scale = data.display_scale;
  for (std::size_t c = 0; c < data.feature_count(); ++c) {
    FeatureMeta f{data.features[c].name, data.features[c].unit, 0.0, 0.0};
    if (data.size() > 0) {
      const auto col = data.X.col(c);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      f.min = *lo;
      f.max = *hi;
    }
    m.features.push_back(std::move(f));
  }
  return m;
}

std::string rule_text(const PartitionRule& rule, const DatasetMeta& meta) {
  const FeatureMeta& f = meta.features.at(rule.feature_index);
  const char* op = rule.typical_side == Side::kBelow ? " ≥ " : " < ";
  std::string text = f.name + op + round_significant(rule.threshold, 3);
  if (!f.unit.empty()) text += " " + f.unit;
  return text;
}

namespace {

struct Parts {
  LinearFactorModel used;           // in display units
  std::optional<LinearFactorModel> base;
  std::optional<std::vector<double>> delta;
  std::optional<Subspace> subspace;
  std::optional<PartitionRule> rule;
};

LinearFactorModel scaled(const LinearFactorModel& m, double s) {
  LinearFactorModel out{m.intercept * s, m.factors};
  for (double& f : out.factors) f *= s;
  return out;
}

Parts resolve(XaiType type, const FittedExplainer& model, std::span<const double> x,
              double s) {
  Parts p;
  switch (type) {
    case XaiType::kGlobal:
    case XaiType::kLocal: {
      const auto* m = std::get_if<LinearFactorModel>(&model);
      if (!m) throw UserError(to_string(type) + " explanation needs a single linear model");
      p.used = scaled(*m, s);
      return p;
    }
    case XaiType::kSubglobal: {
      const auto* m = std::get_if<SubglobalModel>(&model);
      if (!m) throw UserError("subglobal explanation needs a subglobal model");
      p.rule = m->rule;
      p.subspace = subspace_of(m->rule, x);
      p.used = scaled(m->active(x), s);
      return p;
    }
    case XaiType::kIncremental: {
      const auto* m = std::get_if<IncrementalModel>(&model);
      if (!m) throw UserError("incremental explanation needs an incremental model");
      p.rule = m->rule;
      p.subspace = subspace_of(m->rule, x);
      const LinearFactorModel base = scaled(m->base, s);
      if (*p.subspace == Subspace::kTypical) {
        p.used = base;
        return p;
      }
      std::vector<double> delta = m->delta;
      for (double& d : delta) d *= s;
      p.used.intercept = base.intercept + delta[0];
      for (std::size_t r = 0; r < base.factors.size(); ++r)
        p.used.factors.push_back(base.factors[r] + delta[r + 1]);
      p.base = base;
      p.delta = std::move(delta);
      return p;
    }
  }
  throw std::logic_error("unknown xai type");
}

double meter(double v, const FeatureMeta& f) {
  if (!(f.max > f.min)) return 0.0;
  return std::clamp((v - f.min) / (f.max - f.min), 0.0, 1.0);
}

}  // namespace

ExplanationTable build_table(const DatasetMeta& meta, XaiType type,
                             const FittedExplainer& model, std::span<const double> x,
                             double prediction, const FactorOverrides& overrides) {
  if (x.size() != meta.features.size())
    throw UserError("instance has " + std::to_string(x.size()) + " values, expected " +
                    std::to_string(meta.features.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw UserError("instance values must be finite");
  for (const auto& [name, v] : overrides) {
    if (!std::isfinite(v)) throw UserError("override for '" + name + "' is not finite");
    const bool known = name == "adjustment" ||
                       std::any_of(meta.features.begin(), meta.features.end(),
                                   [&](const FeatureMeta& f) { return f.name == name; });
    if (!known) throw UserError("unknown override attribute '" + name + "'");
  }

  const double s = meta.display_scale;
  const Parts p = resolve(type, model, x, s);

  ExplanationTable t;
  t.xai_type = to_string(type);
  t.target_name = meta.target_name;
  t.target_unit = meta.target_unit;
  t.what_if = !overrides.empty();

  t.adjustment = p.used.intercept;
  if (p.delta) {
    t.adjustment_base = p.base->intercept;
    t.adjustment_delta = (*p.delta)[0];
    t.adjustment_delta_display = round_display((*p.delta)[0], DisplayRole::kAdjustment);
  }
  if (auto it = overrides.find("adjustment"); it != overrides.end()) {
    t.adjustment = it->second;
    t.adjustment_overridden = true;
  }
  t.adjustment_display = round_display(t.adjustment, DisplayRole::kAdjustment);

  double est = t.adjustment;
  for (std::size_t r = 0; r < meta.features.size(); ++r) {
    const FeatureMeta& f = meta.features[r];
    TableRow row;
    row.name = f.name;
    row.unit = f.unit;
    row.value = x[r];
    row.value_display = round_display(x[r], DisplayRole::kValue);
    row.value_meter = meter(x[r], f);
    row.factor_full = p.used.factors[r];
    if (p.delta) {
      row.base_factor = p.base->factors[r];
      row.delta_full = (*p.delta)[r + 1];
      row.delta_display = round_display(*row.delta_full, DisplayRole::kFactor);
    }
    if (auto it = overrides.find(f.name); it != overrides.end()) {
      row.factor_full = it->second;
      row.overridden = true;
    }
    row.factor_display = round_display(row.factor_full, DisplayRole::kFactor);
    row.partial_contribution = row.factor_full * row.value;
    row.contribution_display = round_display(row.partial_contribution, DisplayRole::kContribution);
    est += row.partial_contribution;
    t.rows.push_back(std::move(row));
  }
  t.explainer_estimate = est;
  t.estimate_display = round_display(est, DisplayRole::kEstimate);
  t.predictor_prediction = prediction * s;
  t.prediction_display = round_display(t.predictor_prediction, DisplayRole::kEstimate);
  if (t.predictor_prediction != 0.0) {
    t.percent_difference =
        100.0 * (t.explainer_estimate - t.predictor_prediction) / t.predictor_prediction;
    t.percent_difference_display = round_display(*t.percent_difference, DisplayRole::kValue);
  }
  if (p.rule) {
    t.subspace_label = to_string(*p.subspace);
    t.rule_text = rule_text(*p.rule, meta);
  }
  return t;
}

json to_json(const ExplanationTable& t) {
  json j;
  j["schema_version"] = t.schema_version;
  j["xai_type"] = t.xai_type;
  j["target"] = {{"name", t.target_name}, {"unit", t.target_unit}};
  j["rows"] = json::array();
  for (const TableRow& r : t.rows) {
    json row = {{"name", r.name},
                {"unit", r.unit},
                {"value", r.value},
                {"value_display", r.value_display},
                {"value_meter", r.value_meter},
                {"factor_full", r.factor_full},
                {"factor_display", r.factor_display},
                {"overridden", r.overridden},
                {"partial_contribution", r.partial_contribution},
                {"contribution_display", r.contribution_display}};
    if (r.delta_full) {
      row["base_factor"] = *r.base_factor;
      row["delta_full"] = *r.delta_full;
      row["delta_display"] = *r.delta_display;
    }
    j["rows"].push_back(std::move(row));
  }
  json adj = {{"full", t.adjustment},
              {"display", t.adjustment_display},
              {"overridden", t.adjustment_overridden}};
  if (t.adjustment_delta) {
    adj["base"] = *t.adjustment_base;
    adj["delta_full"] = *t.adjustment_delta;
    adj["delta_display"] = *t.adjustment_delta_display;
  }
  j["adjustment"] = std::move(adj);
  j["explainer_estimate"] = {{"full", t.explainer_estimate}, {"display", t.estimate_display}};
  j["predictor_prediction"] = {{"full", t.predictor_prediction},
                               {"display", t.prediction_display}};
  if (t.percent_difference)
    j["percent_difference"] = {{"full", *t.percent_difference},
                               {"display", *t.percent_difference_display}};
  else
    j["percent_difference"] = nullptr;
  if (t.subspace_label) j["subspace_label"] = *t.subspace_label;
  if (t.rule_text) j["rule_text"] = *t.rule_text;
  j["what_if"] = t.what_if;
  return j;
}

ExplanationTable table_from_json(const json& j) {
  try {
    ExplanationTable t;
    t.schema_version = j.at("schema_version").get<int>();
    if (t.schema_version != kTableSchemaVersion)
      throw UserError("unsupported table schema_version " + std::to_string(t.schema_version));
    t.xai_type = j.at("xai_type").get<std::string>();
    t.target_name = j.at("target").at("name").get<std::string>();
    t.target_unit = j.at("target").at("unit").get<std::string>();
    for (const json& r : j.at("rows")) {
      TableRow row;
      row.name = r.at("name").get<std::string>();
      row.unit = r.at("unit").get<std::string>();
      row.value = r.at("value").get<double>();
      row.value_display = r.at("value_display").get<std::string>();
      row.value_meter = r.at("value_meter").get<double>();
      row.factor_full = r.at("factor_full").get<double>();
      row.factor_display = r.at("factor_display").get<std::string>();
      row.overridden = r.at("overridden").get<bool>();
      row.partial_contribution = r.at("partial_contribution").get<double>();
      row.contribution_display = r.at("contribution_display").get<std::string>();
      if (r.contains("delta_full")) {
        row.base_factor = r.at("base_factor").get<double>();
        row.delta_full = r.at("delta_full").get<double>();
        row.delta_display = r.at("delta_display").get<std::string>();
      }
      t.rows.push_back(std::move(row));
    }
    const json& adj = j.at("adjustment");
    t.adjustment = adj.at("full").get<double>();
    t.adjustment_display = adj.at("display").get<std::string>();
    t.adjustment_overridden = adj.at("overridden").get<bool>();
    if (adj.contains("delta_full")) {
      t.adjustment_base = adj.at("base").get<double>();
      t.adjustment_delta = adj.at("delta_full").get<double>();
      t.adjustment_delta_display = adj.at("delta_display").get<std::string>();
    }
    t.explainer_estimate = j.at("explainer_estimate").at("full").get<double>();
    t.estimate_display = j.at("explainer_estimate").at("display").get<std::string>();
    t.predictor_prediction = j.at("predictor_prediction").at("full").get<double>();
    t.prediction_display = j.at("predictor_prediction").at("display").get<std::string>();
    if (!j.at("percent_difference").is_null()) {
      t.percent_difference = j.at("percent_difference").at("full").get<double>();
      t.percent_difference_display =
          j.at("percent_difference").at("display").get<std::string>();
    }
    if (j.contains("subspace_label")) t.subspace_label = j.at("subspace_label").get<std::string>();
    if (j.contains("rule_text")) t.rule_text = j.at("rule_text").get<std::string>();
    t.what_if = j.at("what_if").get<bool>();
    return t;
  } catch (const json::exception& e) {
    throw UserError(std::string("explanation table: ") + e.what());
  }
}

std::string render_text(const ExplanationTable& t) {
  const bool deltas = std::any_of(t.rows.begin(), t.rows.end(),
                                  [](const TableRow& r) { return r.delta_full.has_value(); });
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head{"attribute", "value", "factor"};
  if (deltas) head.push_back("delta");
  head.push_back("contribution");
  cells.push_back(head);
  for (const TableRow& r : t.rows) {
    std::vector<std::string> line{r.name + (r.unit.empty() ? "" : " (" + r.unit + ")"),
                                  r.value_display,
                                  r.factor_display + (r.overridden ? "*" : "")};
    if (deltas) line.push_back(r.delta_display.value_or(""));
    line.push_back(r.contribution_display);
    cells.push_back(std::move(line));
  }
  std::vector<std::string> adj{"adjustment", "", ""};
  if (deltas) adj.push_back(t.adjustment_delta_display.value_or(""));
  adj.push_back(t.adjustment_display + (t.adjustment_overridden ? "*" : ""));
  cells.push_back(std::move(adj));

  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::ostringstream os;
  os << t.xai_type << " explanation";
  if (t.subspace_label) os << " [" << *t.subspace_label << "; outlier if " << *t.rule_text << "]";
  if (t.what_if) os << " (what-if)";
  os << "\n";
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) os << "  ";
      if (c == 0)
        os << std::left << std::setw(static_cast<int>(width[c])) << line[c];
      else
        os << std::right << std::setw(static_cast<int>(width[c])) << line[c];
    }
    os << "\n";
  }
  const std::string unit = t.target_unit.empty() ? "" : " " + t.target_unit;
  os << "estimate    " << t.estimate_display << unit << "  (" << format_number(t.explainer_estimate)
     << ")\n";
  os << "prediction  " << t.prediction_display << unit << "  ("
     << format_number(t.predictor_prediction) << ")\n";
  if (t.percent_difference)
    os << "difference  " << *t.percent_difference_display << "%\n";
  return os.str();
}

}  // namespace ixai
