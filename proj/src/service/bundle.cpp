#include "ixai/bundle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ixai/error.hpp"
#include "ixai/local.hpp"
#include "ixai/report_io.hpp"
#include "ixai/study.hpp"

namespace ixai {

using nlohmann::json;

namespace {

double finite(const json& j, const char* what) {
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw UserError(std::string("bundle: non-finite ") + what);
  return v;
}

}  // namespace

json to_json(const LinearFactorModel& m) {
  return {{"intercept", m.intercept}, {"factors", m.factors}};
}

json to_json(const PartitionRule& r) {
  return {{"feature_index", r.feature_index},
          {"threshold", r.threshold},
          {"typical_side", to_string(r.typical_side)}};
}

json to_json(const FitInfo& i) {
  return {{"seed", i.seed},
          {"iterations", i.iterations},
          {"final_loss", i.final_loss},
          {"converged", i.converged},
          {"ridge_fallback", i.ridge_fallback},
          {"polished", i.polished}};
}

json to_json(const Forest& f) {
  json trees = json::array();
  for (const Tree& t : f.trees()) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes)
      nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    trees.push_back(std::move(nodes));
  }
  return {{"task", to_string(f.task())},
          {"feature_count", f.feature_count()},
          {"trees", std::move(trees)}};
}

json to_json(const DatasetMeta& m) {
  json features = json::array();
  for (const FeatureMeta& f : m.features)
    features.push_back({{"name", f.name}, {"unit", f.unit}, {"min", f.min}, {"max", f.max}});
  return {{"name", m.name},
          {"display_name", m.display_name},
          {"task", to_string(m.task)},
          {"target", {{"name", m.target_name}, {"unit", m.target_unit}}},
          {"display_scale", m.display_scale},
          {"features", std::move(features)}};
}

LinearFactorModel linear_model_from_json(const json& j) {
  LinearFactorModel m;
  m.intercept = finite(j.at("intercept"), "intercept");
  for (const json& f : j.at("factors")) m.factors.push_back(finite(f, "factor"));
  return m;
}

PartitionRule rule_from_json(const json& j) {
  PartitionRule r;
  r.feature_index = j.at("feature_index").get<std::size_t>();
  r.threshold = finite(j.at("threshold"), "threshold");
  const std::string side = j.at("typical_side").get<std::string>();
  if (side == "below")
    r.typical_side = Side::kBelow;
  else if (side == "at_or_above")
    r.typical_side = Side::kAtOrAbove;
  else
    throw UserError("bundle: bad typical_side '" + side + "'");
  return r;
}

FitInfo fit_info_from_json(const json& j) {
  FitInfo i;
  i.seed = j.value("seed", std::uint64_t{0});
  i.iterations = j.value("iterations", std::size_t{0});
  i.final_loss = j.value("final_loss", 0.0);
  i.converged = j.value("converged", true);
  i.ridge_fallback = j.value("ridge_fallback", false);
  i.polished = j.value("polished", false);
  return i;
}

Forest forest_from_json(const json& j) {
  const Task task = task_from_string(j.at("task").get<std::string>());
  const auto d = j.at("feature_count").get<std::size_t>();
  std::vector<Tree> trees;
  for (const json& jt : j.at("trees")) {
    Tree t;
    for (const json& jn : jt) {
      if (!jn.is_array() || jn.size() != 5) throw UserError("bundle: malformed tree node");
      TreeNode n;
      n.feature = jn[0].get<int>();
      n.threshold = finite(jn[1], "tree threshold");
      n.left = jn[2].get<int>();
      n.right = jn[3].get<int>();
      n.value = finite(jn[4], "leaf value");
      t.nodes.push_back(n);
    }
    const int size = static_cast<int>(t.nodes.size());
    if (size == 0) throw UserError("bundle: empty tree");
    for (const TreeNode& n : t.nodes) {
      if (n.feature >= static_cast<int>(d)) throw UserError("bundle: tree feature out of range");
      if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size))
        throw UserError("bundle: tree child index out of range");
      if (n.feature < 0 && task == Task::kClassification && (n.value < 0.0 || n.value > 1.0))
        throw UserError("bundle: classifier leaf outside [0, 1]");
    }
    trees.push_back(std::move(t));
  }
  if (trees.empty()) throw UserError("bundle: forest has no trees");
  return Forest(task, d, std::move(trees));
}

DatasetMeta dataset_meta_from_json(const json& j) {
  DatasetMeta m;
  m.name = j.at("name").get<std::string>();
  m.display_name = j.value("display_name", m.name);
  m.task = task_from_string(j.at("task").get<std::string>());
  m.target_name = j.at("target").at("name").get<std::string>();
  m.target_unit = j.at("target").at("unit").get<std::string>();
  m.display_scale = finite(j.at("display_scale"), "display_scale");
  for (const json& f : j.at("features"))
    m.features.push_back({f.at("name").get<std::string>(), f.at("unit").get<std::string>(),
                          finite(f.at("min"), "feature min"), finite(f.at("max"), "feature max")});
  return m;
}

std::vector<XaiType> ModelBundle::available() const {
  std::vector<XaiType> out;
  for (XaiType t : kAllXaiTypes)
    if (has(t)) out.push_back(t);
  return out;
}

bool ModelBundle::has(XaiType t) const {
  switch (t) {
    case XaiType::kGlobal: return global.has_value();
    case XaiType::kSubglobal: return subglobal.has_value();
    case XaiType::kIncremental: return incremental.has_value();
    case XaiType::kLocal: return local.has_value();
  }
  return false;
}

std::optional<PartitionRule> ModelBundle::rule() const {
  if (incremental) return incremental->rule;
  if (subglobal) return subglobal->rule;
  return std::nullopt;
}

ModelBundle make_bundle(const StudyReport& report, const Dataset& data) {
  ModelBundle b;
  b.version = kToolVersion;
  b.seed = report.seed;
  b.config_hash = report.config_hash;
  b.meta = make_dataset_meta(data);
  b.forest = report.heldout_forest;
  const ExplainerSet& e = report.heldout_explainers;
  b.global = e.global;
  b.subglobal = e.subglobal;
  b.incremental = e.incremental;
  b.local = LocalSettings{e.local, e.local_std};
  for (std::size_t r : report.plan.test_rows()) b.instances.push_back(data.X.row(r));
  return b;
}

json to_json(const ModelBundle& b) {
  json ex = json::array();
  if (b.global)
    ex.push_back({{"type", "global"}, {"model", to_json(b.global->model)},
                  {"info", to_json(b.global->info)}});
  if (b.subglobal)
    ex.push_back({{"type", "subglobal"},
                  {"rule", to_json(b.subglobal->rule)},
                  {"typical", to_json(b.subglobal->typical)},
                  {"outlier", to_json(b.subglobal->outlier)},
                  {"info", to_json(b.subglobal->info)}});
  if (b.incremental)
    ex.push_back({{"type", "incremental"},
                  {"rule", to_json(b.incremental->rule)},
                  {"base", to_json(b.incremental->base)},
                  {"delta", b.incremental->delta},
                  {"lambda", b.incremental->lambda},
                  {"info", to_json(b.incremental->info)}});
  if (b.local)
    ex.push_back({{"type", "local"},
                  {"n_samples", b.local->config.n_samples},
                  {"perturb_scale", b.local->config.perturb_scale},
                  {"kernel_width", b.local->config.kernel_width},
                  {"seed", b.local->config.seed},
                  {"feature_std", b.local->feature_std}});
  return {{"version", b.version},
          {"seed", b.seed},
          {"config_hash", b.config_hash},
          {"dataset_meta", to_json(b.meta)},
          {"forest", to_json(b.forest)},
          {"explainers", std::move(ex)},
          {"instances", b.instances}};
}

ModelBundle bundle_from_json(const json& j) {
  try {
    ModelBundle b;
    b.version = j.at("version").get<std::string>();
    b.seed = j.at("seed").get<std::uint64_t>();
    b.config_hash = j.value("config_hash", std::string());
    b.meta = dataset_meta_from_json(j.at("dataset_meta"));
    b.forest = forest_from_json(j.at("forest"));
    const std::size_t d = b.meta.features.size();
    if (b.forest.feature_count() != d)
      throw UserError("bundle: forest and dataset_meta disagree on the feature count");
    auto check_model = [&](const LinearFactorModel& m) {
      if (m.factors.size() != d) throw UserError("bundle: model has the wrong factor count");
      return m;
    };
    auto check_rule = [&](const PartitionRule& r) {
      if (r.feature_index >= d) throw UserError("bundle: rule feature out of range");
      return r;
    };
    for (const json& e : j.at("explainers")) {
      const XaiType t = xai_type_from_string(e.at("type").get<std::string>());
      if (b.has(t)) throw UserError("bundle: duplicate explainer " + to_string(t));
      switch (t) {
        case XaiType::kGlobal:
          b.global = GlobalModel{check_model(linear_model_from_json(e.at("model"))),
                                 fit_info_from_json(e.value("info", json::object()))};
          break;
        case XaiType::kSubglobal:
          b.subglobal = SubglobalModel{check_rule(rule_from_json(e.at("rule"))),
                                       check_model(linear_model_from_json(e.at("typical"))),
                                       check_model(linear_model_from_json(e.at("outlier"))),
                                       fit_info_from_json(e.value("info", json::object()))};
          break;
        case XaiType::kIncremental: {
          IncrementalModel m;
          m.rule = check_rule(rule_from_json(e.at("rule")));
          m.base = check_model(linear_model_from_json(e.at("base")));
          for (const json& v : e.at("delta")) m.delta.push_back(finite(v, "delta"));
          if (m.delta.size() != d + 1) throw UserError("bundle: delta has the wrong length");
          m.lambda = finite(e.at("lambda"), "lambda");
          m.info = fit_info_from_json(e.value("info", json::object()));
          b.incremental = std::move(m);
          break;
        }
        case XaiType::kLocal: {
          LocalSettings s;
          s.config.n_samples = e.at("n_samples").get<std::size_t>();
          s.config.perturb_scale = finite(e.at("perturb_scale"), "perturb_scale");
          s.config.kernel_width = finite(e.at("kernel_width"), "kernel_width");
          s.config.seed = e.at("seed").get<std::uint64_t>();
          s.config.validate();
          for (const json& v : e.at("feature_std")) s.feature_std.push_back(finite(v, "std"));
          if (s.feature_std.size() != d) throw UserError("bundle: feature_std has the wrong length");
          b.local = std::move(s);
          break;
        }
      }
    }
    for (const json& row : j.value("instances", json::array())) {
      std::vector<double> x;
      for (const json& v : row) x.push_back(finite(v, "instance value"));
      if (x.size() != d) throw UserError("bundle: instance has the wrong length");
      b.instances.push_back(std::move(x));
    }
    return b;
  } catch (const json::exception& e) {
    throw UserError(std::string("bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& b, const std::filesystem::path& path, bool force) {
  write_artifact(path, to_json(b).dump() + "\n", force);
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open bundle " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw UserError("bundle " + path.string() + " is not valid JSON: " + e.what());
  }
  return bundle_from_json(j);
}

}  // namespace ixai
