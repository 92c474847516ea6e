#include "ixai/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ixai/display.hpp"
#include "ixai/error.hpp"
#include "ixai/faithfulness.hpp"
#include "json.hpp"

namespace ixai {

using nlohmann::json;

std::string artifact_header(const std::string& kind, std::uint64_t seed,
                            const std::string& config_hash) {
  std::ostringstream os;
  os << "# ixai " << kToolVersion << " " << kind << "\n"
     << "# seed=" << seed << " config_hash=" << config_hash << "\n";
  return os.str();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json mae_json(const SubspaceMae& m) {
  return {{"combined", m.combined},
          {"typical", m.typical},
          {"outlier", m.outlier},
          {"n_typical", m.n_typical},
          {"n_outlier", m.n_outlier}};
}

json rule_json(const PartitionRule& r) {
  return {{"feature_index", r.feature_index},
          {"threshold", r.threshold},
          {"typical_side", to_string(r.typical_side)}};
}

json predictor_json(const PredictorMetrics& p) {
  json j = {{"rows", p.rows}, {"mae", p.mae}, {"r2", p.r2}};
  if (p.task == Task::kClassification) {
    j["accuracy"] = p.accuracy;
    j["auc"] = p.auc;
  }
  return j;
}

json split_json(const SplitResult& s, const StudyReport& rep) {
  json j;
  j["rule"] = rule_json(s.rule);
  j["lambda"] = s.lambda;
  j["train_rows"] = s.train_rows;
  j["eval_rows"] = s.eval_rows;
  for (XaiType t : kAllXaiTypes) {
    const auto i = static_cast<std::size_t>(t);
    j["unfaithfulness_eval"][to_string(t)] = mae_json(s.unfaithfulness_eval[i]);
    j["unfaithfulness_train"][to_string(t)] = mae_json(s.unfaithfulness_train[i]);
    if (t != XaiType::kLocal) j["glassbox"][to_string(t)] = mae_json(s.glassbox[i]);
  }
  j["glassbox_metric"] = rep.task == Task::kClassification ? "accuracy" : "mae";
  j["glassbox_converged"] = s.glassbox_converged;
  j["predictor"] = predictor_json(s.predictor);
  return j;
}

json lambda_json(const LambdaSelection& l) {
  return {{"selected", l.lambda}, {"grid", l.grid}, {"train_score", l.train_score}};
}

json report_head(const StudyReport& rep) {
  return {{"version", kToolVersion},
          {"dataset", rep.dataset},
          {"task", to_string(rep.task)},
          {"unit", rep.unit},
          {"display_scale", rep.display_scale},
          {"seed", rep.seed},
          {"config_hash", rep.config_hash},
          {"explainer_lambda", lambda_json(rep.lambda_selection)},
          {"glassbox_lambda", lambda_json(rep.glassbox_selection)}};
}

}  // namespace

std::string study_csv(const StudyReport& rep) {
  std::ostringstream os;
  os << artifact_header("study", rep.seed, rep.config_hash);
  os << "dataset,xai_type,subspace,metric,unit,mean,std";
  for (std::size_t k = 0; k < rep.folds.size(); ++k) os << ",fold" << (k + 1);
  os << ",status\n";
  for (const ReportRow& r : table_rows(rep)) {
    os << csv_field(rep.dataset) << ',' << r.xai_type << ',' << r.subspace << ',' << r.metric
       << ',' << csv_field(r.unit) << ',';
    if (r.status == "not_applicable") {
      os << ',';
      for (std::size_t k = 0; k < rep.folds.size(); ++k) os << ',';
    } else {
      os << format_number(r.mean) << ',' << format_number(r.std);
      for (double v : r.folds) os << ',' << format_number(v);
    }
    os << ',' << r.status << '\n';
  }
  return os.str();
}

std::string study_json(const StudyReport& rep) {
  json j = report_head(rep);
  j["rows"] = json::array();
  for (const ReportRow& r : table_rows(rep)) {
    json row = {{"xai_type", r.xai_type}, {"subspace", r.subspace}, {"metric", r.metric},
                {"unit", r.unit},         {"status", r.status}};
    if (r.status != "not_applicable") {
      row["mean"] = r.mean;
      row["std"] = r.std;
      row["folds"] = r.folds;
    }
    j["rows"].push_back(std::move(row));
  }
  j["folds"] = json::array();
  for (const SplitResult& s : rep.folds) j["folds"].push_back(split_json(s, rep));
  return j.dump(2) + "\n";
}

std::string heldout_json(const StudyReport& rep) {
  json j = report_head(rep);
  j["heldout"] = split_json(rep.heldout, rep);
  return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sw, const Dataset& data, std::uint64_t seed,
                      const std::string& config_hash) {
  const double s = data.display_scale;
  std::ostringstream os;
  os << artifact_header("sweep", seed, config_hash);
  os << "# feature=" << data.features[sw.feature_index].name
     << " learned_threshold=" << format_number(sw.learned_threshold)
     << " lambda=" << format_number(sw.lambda) << "\n";
  os << "percentile,threshold,n_below,n_at_or_above,series,value,status,is_min\n";

  // Side values are scaled first and the combined value rebuilt from them,
  // so the weighted-mean identity holds on the written numbers.
  struct Curves {
    std::vector<double> below, above, combined;
  };
  auto curves = [&](double SweepPoint::*b, double SweepPoint::*a) {
    Curves c;
    for (const SweepPoint& p : sw.points) {
      c.below.push_back(p.*b * s);
      c.above.push_back(p.*a * s);
      c.combined.push_back(p.skipped ? 0.0
                                     : combined_mae(p.n_below, c.below.back(),
                                                    p.n_at_or_above, c.above.back()));
    }
    return c;
  };
  const Curves sub =
      curves(&SweepPoint::subglobal_mae_below, &SweepPoint::subglobal_mae_at_or_above);
  const Curves inc =
      curves(&SweepPoint::incremental_mae_below, &SweepPoint::incremental_mae_at_or_above);
  std::vector<bool> skipped;
  for (const SweepPoint& p : sw.points) skipped.push_back(p.skipped);

  auto emit = [&](const std::string& name, const std::vector<double>& values,
                  std::optional<std::size_t> min_index) {
    for (std::size_t i = 0; i < sw.points.size(); ++i) {
      const SweepPoint& p = sw.points[i];
      os << format_number(p.percentile) << ',' << format_number(p.threshold) << ','
         << p.n_below << ',' << p.n_at_or_above << ',' << name << ',';
      if (p.skipped)
        os << ",skipped,0\n";
      else
        os << format_number(values[i]) << ",ok," << (min_index == i ? 1 : 0) << '\n';
    }
  };
  const std::pair<const char*, const Curves*> families[] = {{"subglobal", &sub},
                                                             {"incremental", &inc}};
  for (const auto& [fam, c] : families) {
    const std::string f = fam;
    const auto mark = f == "subglobal" ? sw.subglobal_min() : sw.incremental_min();
    emit(f + "_below", c->below, std::nullopt);
    emit(f + "_at_or_above", c->above, std::nullopt);
    emit(f + "_combined", c->combined, mark);
    emit("normalized_" + f + "_below", SweepResult::normalize(c->below, skipped), std::nullopt);
    emit("normalized_" + f + "_at_or_above", SweepResult::normalize(c->above, skipped),
         std::nullopt);
    emit("normalized_" + f + "_combined", SweepResult::normalize(c->combined, skipped), mark);
  }
  return os.str();
}

std::string sweep_factors_csv(const SweepResult& sw, const Dataset& data, std::uint64_t seed,
                              const std::string& config_hash) {
  const double s = data.display_scale;
  std::ostringstream os;
  os << artifact_header("sweep_factors", seed, config_hash);
  os << "percentile,threshold,model,side,term,value,status\n";
  auto emit_model = [&](const SweepPoint& p, const char* model, const char* side,
                        const LinearFactorModel& m) {
    const std::string head = format_number(p.percentile) + ',' + format_number(p.threshold) +
                             ',' + model + ',' + side + ',';
    os << head << "adjustment," << format_number(m.intercept * s) << ",ok\n";
    for (std::size_t r = 0; r < m.factors.size(); ++r)
      os << head << csv_field(data.features[r].name) << ',' << format_number(m.factors[r] * s)
         << ",ok\n";
  };
  for (const SweepPoint& p : sw.points) {
    emit_model(p, "global", "all", sw.global);
    if (p.skipped) {
      os << format_number(p.percentile) << ',' << format_number(p.threshold)
         << ",subglobal,,,,skipped\n";
      os << format_number(p.percentile) << ',' << format_number(p.threshold)
         << ",incremental,,,,skipped\n";
      continue;
    }
    emit_model(p, "subglobal", "below", p.subglobal_below);
    emit_model(p, "subglobal", "at_or_above", p.subglobal_at_or_above);
    emit_model(p, "incremental", "below", p.incremental_below);
    emit_model(p, "incremental", "at_or_above", p.incremental_at_or_above);
    const LinearFactorModel delta{p.delta[0],
                                  std::vector<double>(p.delta.begin() + 1, p.delta.end())};
    emit_model(p, "incremental", "delta", delta);
  }
  return os.str();
}

std::string surface_csv(const StudyReport& rep, const FeatureMatrix& X_train,
                        const Dataset& data, std::size_t n) {
  if (X_train.cols() < 4 || X_train.rows() == 0 || n < 2)
    throw UserError("surface export needs 4 features, training rows and n >= 2");
  const double s = data.display_scale;
  const std::size_t fa = 1, fb = 3;
  std::vector<double> base(X_train.cols());
  for (std::size_t c = 0; c < X_train.cols(); ++c) {
    std::vector<double> col(X_train.col(c).begin(), X_train.col(c).end());
    std::sort(col.begin(), col.end());
    const std::size_t m = col.size();
    base[c] = m % 2 ? col[m / 2] : 0.5 * (col[m / 2 - 1] + col[m / 2]);
  }
  auto range = [&](std::size_t c) {
    const auto col = X_train.col(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    return std::pair{*lo, *hi};
  };
  const auto [alo, ahi] = range(fa);
  const auto [blo, bhi] = range(fb);

  std::ostringstream os;
  os << artifact_header("surface", rep.seed, rep.config_hash);
  os << "# fixed features at training medians\n";
  os << "model," << csv_field(data.features[fa].name) << ',' << csv_field(data.features[fb].name)
     << ",estimate\n";
  const ExplainerSet& e = rep.heldout_explainers;
  const std::pair<const char*, FittedExplainer> models[] = {
      {"global", FittedExplainer{e.global.model}},
      {"subglobal", FittedExplainer{e.subglobal}},
      {"incremental", FittedExplainer{e.incremental}}};
  const double dn = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> x = base;
      x[fa] = alo + (ahi - alo) * static_cast<double>(i) / dn;
      x[fb] = blo + (bhi - blo) * static_cast<double>(k) / dn;
      const std::string head = format_number(x[fa]) + ',' + format_number(x[fb]) + ',';
      for (const auto& [name, model] : models)
        os << name << ',' << head << format_number(estimate(model, x) * s) << '\n';
      os << "predictor," << head << format_number(rep.heldout_forest.predict(x) * s) << '\n';
    }
  return os.str();
}

void write_artifact(const std::filesystem::path& path, const std::string& content, bool force) {
  std::error_code ec;
  if (!force && std::filesystem::exists(path, ec))
    throw UserError("refusing to overwrite " + path.string() + " (use --force)");
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw EnvironmentError("cannot create " + path.parent_path().string() + ": " +
                                   ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

}  // namespace ixai
