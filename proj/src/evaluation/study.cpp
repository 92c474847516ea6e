#include "ixai/study.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "ixai/error.hpp"
#include "ixai/least_squares.hpp"
#include "ixai/logistic.hpp"
#include "ixai/rng.hpp"
#include "ixai/split_search.hpp"
#include "json.hpp"

namespace ixai {

using nlohmann::json;

std::uint64_t forest_seed(std::uint64_t seed, std::size_t fold) {
  return mix_seed(seed, 0x100 + fold);
}

std::uint64_t local_sample_seed(std::uint64_t seed, std::size_t fold, bool train_rows) {
  return mix_seed(seed, 0x200 + 2 * fold + (train_rows ? 1 : 0));
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

json feature_json(const FeatureSpec& f) {
  return {{"name", f.name},
          {"unit", f.unit},
          {"source_column", f.source_column},
          {"transform", static_cast<int>(f.transform.kind)},
          {"factor", f.transform.factor},
          {"reference_column", f.transform.reference_column}};
}

SubspaceMae scaled(SubspaceMae m, double s) {
  m.typical *= s;
  m.outlier *= s;
  m.combined = combined_mae(m.n_typical, m.typical, m.n_outlier, m.outlier);
  return m;
}

struct Glassbox {
  std::array<SubspaceMae, 3> result;
  bool converged = true;
};

Glassbox run_glassbox(const Dataset& data, const FeatureMatrix& Xtr, std::span<const double> ytr,
                      const FeatureMatrix& Xev, std::span<const double> yev,
                      const PartitionRule& rule, double lambda, const StudyConfig& cfg) {
  const std::vector<Subspace> member = memberships(Xev, rule);
  Glassbox g;
  if (data.task == Task::kRegression) {
    const std::array<FittedExplainer, 3> fits = {
        FittedExplainer{fit_global(Xtr, ytr).model},
        FittedExplainer{fit_subglobal(Xtr, ytr, rule, cfg.incremental.split)},
        FittedExplainer{fit_incremental(Xtr, ytr, lambda, rule, cfg.incremental)}};
    for (std::size_t t = 0; t < 3; ++t)
      g.result[t] = scaled(subspace_mae(estimate_batch(fits[t], Xev), yev, member),
                           data.display_scale);
    return g;
  }
  const GlobalModel global = fit_logistic(Xtr, ytr);
  const SubglobalModel sub = fit_logistic_subglobal(Xtr, ytr, rule);
  LogisticOptions lopts;
  lopts.solver = cfg.incremental.solver;
  const IncrementalModel inc = fit_logistic_incremental(Xtr, ytr, lambda, rule, lopts);
  g.converged = global.info.converged && sub.info.converged && inc.info.converged;
  const std::array<FittedExplainer, 3> fits = {FittedExplainer{global.model},
                                               FittedExplainer{sub}, FittedExplainer{inc}};
  const std::vector<double> zeros(Xev.rows(), 0.0);
  for (std::size_t t = 0; t < 3; ++t) {
    const std::vector<double> logit = estimate_batch(fits[t], Xev);
    std::vector<double> correct(Xev.rows());
    for (std::size_t i = 0; i < Xev.rows(); ++i)
      correct[i] = (logit[i] >= 0.0) == (yev[i] == 1.0) ? 1.0 : 0.0;
    g.result[t] = scaled(subspace_mae(correct, zeros, member), 100.0);
  }
  return g;
}

// Unfaithfulness of all four explainers on the rows of X; Local only on a
// seeded sample of at most cap rows.
std::array<SubspaceMae, 4> all_unfaithfulness(const ExplainerSet& set, const Forest& forest,
                                              const FeatureMatrix& X, double scale,
                                              std::size_t cap, std::uint64_t sample_seed,
                                              std::size_t threads) {
  std::array<SubspaceMae, 4> out;
  for (XaiType t : kAllXaiTypes) {
    SubspaceMae m;
    if (t == XaiType::kLocal) {
      const std::vector<std::size_t> rows = sample_rows(X.rows(), cap, sample_seed);
      m = unfaithfulness(set, t, forest, X.select_rows(rows), threads);
    } else {
      m = unfaithfulness(set, t, forest, X, threads);
    }
    out[static_cast<std::size_t>(t)] = scaled(m, scale);
  }
  return out;
}

struct SplitInputs {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
  std::size_t index;  // fold number, or folds for heldout
};

struct SplitOutput {
  SplitResult result;
  Forest forest;
  ExplainerSet explainers;
};

SplitOutput run_split(const Dataset& data, const SplitInputs& in, const StudyConfig& cfg,
                      double lambda, double glassbox_lambda) {
  const FeatureMatrix Xtr = data.X.select_rows(in.train);
  const FeatureMatrix Xev = data.X.select_rows(in.eval);
  const std::vector<double> ytr = select<double>(data.y, in.train);
  const std::vector<double> yev = select<double>(data.y, in.eval);

  SplitOutput out;
  ForestConfig fc = cfg.forest;
  fc.seed = forest_seed(cfg.seed, in.index);
  out.forest = train_forest(Xtr, ytr, data.task, fc, cfg.threads);
  const std::vector<double> yhat = out.forest.predict_batch(Xtr);

  LocalConfig lc = cfg.local;
  lc.seed = cfg.seed;
  out.explainers = fit_explainers(Xtr, yhat, lambda, lc, cfg.incremental);

  SplitResult& r = out.result;
  r.rule = out.explainers.rule();
  r.lambda = lambda;
  r.train_rows = in.train.size();
  r.eval_rows = in.eval.size();
  r.unfaithfulness_eval =
      all_unfaithfulness(out.explainers, out.forest, Xev, data.display_scale,
                         cfg.local_eval_cap, local_sample_seed(cfg.seed, in.index, false),
                         cfg.threads);
  r.unfaithfulness_train =
      all_unfaithfulness(out.explainers, out.forest, Xtr, data.display_scale,
                         cfg.local_eval_cap, local_sample_seed(cfg.seed, in.index, true),
                         cfg.threads);
  const Glassbox g = run_glassbox(data, Xtr, ytr, Xev, yev, r.rule,
                                  glassbox_lambda, cfg);
  r.glassbox = g.result;
  r.glassbox_converged = g.converged;
  r.predictor = evaluate_predictor(out.forest, Xev, yev, data.task);
  return out;
}

}  // namespace

std::string study_config_hash(const Dataset& data, const StudyConfig& c) {
  json j;
  j["dataset"] = {{"name", data.name},
                  {"task", to_string(data.task)},
                  {"target", feature_json(data.target)},
                  {"display_scale", data.display_scale},
                  {"rows", data.size()},
                  {"data_fnv", fnv1a64(std::span<const double>(data.y))}};
  for (const auto& f : data.features) j["dataset"]["features"].push_back(feature_json(f));
  std::uint64_t xh = 0;
  for (std::size_t c2 = 0; c2 < data.X.cols(); ++c2) xh = mix_seed(xh, fnv1a64(data.X.col(c2)));
  j["dataset"]["features_fnv"] = xh;
  j["study"] = {{"seed", c.seed},
                {"test_fraction", c.test_fraction},
                {"folds", c.folds},
                {"local_eval_cap", c.local_eval_cap},
                {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
                {"forest",
                 {{"n_trees", c.forest.n_trees},
                  {"max_depth", c.forest.max_depth},
                  {"min_samples_leaf", c.forest.min_samples_leaf},
                  {"features_per_split", c.forest.features_per_split},
                  {"bootstrap", c.forest.bootstrap}}},
                {"local",
                 {{"n_samples", c.local.n_samples},
                  {"perturb_scale", c.local.perturb_scale},
                  {"kernel_width", c.local.kernel_width}}},
                {"incremental",
                 {{"tolerance", c.incremental.solver.relative_tolerance},
                  {"max_iterations", c.incremental.solver.max_iterations},
                  {"snap", c.incremental.snap},
                  {"polish", c.incremental.polish}}}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

StudyReport run_modeling_study(const Dataset& data, const StudyConfig& config) {
  if (data.size() == 0) throw UserError("study: dataset is empty");
  config.forest.validate(data.feature_count());
  config.local.validate();

  StudyReport rep;
  rep.dataset = data.name;
  rep.task = data.task;
  rep.unit = data.target.unit;
  rep.display_scale = data.display_scale;
  rep.seed = config.seed;
  rep.config_hash = study_config_hash(data, config);
  rep.plan = make_split_plan(data.size(), config.seed, config.test_fraction, config.folds);

  // Lambdas are chosen once, on the whole training partition, with the
  // heldout forest and its Subglobal rule.
  const std::vector<std::size_t> train = rep.plan.train_rows();
  const FeatureMatrix Xtr = data.X.select_rows(train);
  const std::vector<double> ytr = select<double>(data.y, train);
  ForestConfig fc = config.forest;
  fc.seed = forest_seed(config.seed, config.folds);
  const Forest selection_forest = train_forest(Xtr, ytr, data.task, fc, config.threads);
  const std::vector<double> yhat = selection_forest.predict_batch(Xtr);
  const SubglobalModel sel_sub = fit_subglobal(Xtr, yhat, config.incremental.split);
  double lambda = 0.0;
  if (config.lambda) {
    lambda = *config.lambda;
  } else {
    rep.lambda_selection = select_lambda(Xtr, yhat, sel_sub.rule, config.incremental);
    lambda = rep.lambda_selection.lambda;
  }
  if (data.task == Task::kRegression) {
    rep.glassbox_selection = select_lambda(Xtr, ytr, sel_sub.rule, config.incremental);
  } else {
    LogisticOptions lopts;
    lopts.solver = config.incremental.solver;
    rep.glassbox_selection = select_logistic_lambda(Xtr, ytr, sel_sub.rule, lopts);
  }
  const double glassbox_lambda = rep.glassbox_selection.lambda;

  for (std::size_t k = 0; k < config.folds; ++k) {
    const SplitInputs in{rep.plan.fold_train_rows(k), rep.plan.fold_validation_rows(k), k};
    rep.folds.push_back(run_split(data, in, config, lambda, glassbox_lambda).result);
  }
  if (!rep.plan.test_rows().empty()) {
    const SplitInputs in{train, rep.plan.test_rows(), config.folds};
    SplitOutput held = run_split(data, in, config, lambda, glassbox_lambda);
    rep.heldout = std::move(held.result);
    rep.heldout_forest = std::move(held.forest);
    rep.heldout_explainers = std::move(held.explainers);
  }
  return rep;
}

std::vector<ReportRow> table_rows(const StudyReport& rep) {
  std::vector<ReportRow> rows;
  const bool cls = rep.task == Task::kClassification;
  auto add = [&](std::string xai, std::string sub, std::string metric, std::string unit,
                 std::vector<double> v, std::string status) {
    ReportRow r{std::move(xai), std::move(sub), std::move(metric), std::move(unit),
                std::move(v)};
    r.status = std::move(status);
    if (r.status != "not_applicable") {
      r.mean = mean_of(r.folds);
      r.std = sample_std(r.folds);
    } else {
      r.mean = r.std = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(r));
  };
  auto pick = [](const SubspaceMae& m, int which) {
    return which < 0 ? m.combined : m.get(which == 0 ? Subspace::kTypical : Subspace::kOutlier);
  };
  const char* sub_names[] = {"combined", "typical", "outlier"};
  for (XaiType t : kAllXaiTypes) {
    const std::size_t ti = static_cast<std::size_t>(t);
    for (int s = -1; s < 2; ++s) {
      const std::string sub = sub_names[s + 1];
      std::vector<double> val, train, glass;
      bool converged = true;
      for (const SplitResult& f : rep.folds) {
        val.push_back(pick(f.unfaithfulness_eval[ti], s));
        train.push_back(pick(f.unfaithfulness_train[ti], s));
        if (t != XaiType::kLocal) {
          glass.push_back(pick(f.glassbox[ti], s));
          converged = converged && f.glassbox_converged;
        }
      }
      add(to_string(t), sub, "unfaithfulness_validation", rep.unit, val, "ok");
      add(to_string(t), sub, "unfaithfulness_train", rep.unit, train, "ok");
      const std::string gmetric = cls ? "glassbox_accuracy" : "glassbox_mae";
      const std::string gunit = cls ? "%" : rep.unit;
      if (t == XaiType::kLocal)
        add(to_string(t), sub, gmetric, gunit, {}, "not_applicable");
      else
        add(to_string(t), sub, gmetric, gunit, glass, converged ? "ok" : "not_converged");
    }
  }
  std::vector<double> a, b;
  for (const SplitResult& f : rep.folds) {
    a.push_back(cls ? f.predictor.accuracy : f.predictor.mae);
    b.push_back(cls ? f.predictor.auc : f.predictor.r2);
  }
  add("predictor", "combined", cls ? "accuracy" : "mae", cls ? "" : rep.unit, a, "ok");
  add("predictor", "combined", cls ? "auc" : "r2", "", b, "ok");
  return rows;
}

SweepResult run_threshold_sweep(const Dataset& data, const StudyConfig& config,
                                std::span<const double> percentiles, const Forest* forest) {
  const SplitPlan plan = make_split_plan(data.size(), config.seed, config.test_fraction,
                                         config.folds);
  const std::vector<std::size_t> train = plan.train_rows();
  const FeatureMatrix X = data.X.select_rows(train);
  Forest trained;
  if (forest == nullptr) {
    ForestConfig fc = config.forest;
    fc.seed = forest_seed(config.seed, config.folds);
    trained = train_forest(X, select<double>(data.y, train), data.task, fc, config.threads);
    forest = &trained;
  } else if (forest->feature_count() != data.feature_count()) {
    throw UserError("forest does not match the dataset's features");
  }
  const std::vector<double> yhat = forest->predict_batch(X);
  const SubglobalModel learned = fit_subglobal(X, yhat, config.incremental.split);
  const double lambda = config.lambda ? *config.lambda
                                      : select_lambda(X, yhat, learned.rule,
                                                      config.incremental).lambda;
  return threshold_sweep(X, yhat, learned.rule.feature_index, percentiles, lambda,
                         learned.rule.threshold, config.incremental);
}

}  // namespace ixai
