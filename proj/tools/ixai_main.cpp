// ixai: study, sweep, explain and serve from one binary.
//
// Exit codes: 0 ok, 2 bad input (flags, config, data, bundle), 3 the
// environment refused (port in use, unwritable output), 1 anything else.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ixai/bundle.hpp"
#include "ixai/error.hpp"
#include "ixai/local.hpp"
#include "ixai/report_io.hpp"
#include "ixai/server.hpp"
#include "ixai/study.hpp"
#include "ixai/sweep.hpp"
#include "ixai/table.hpp"

namespace fs = std::filesystem;
using namespace ixai;

namespace {

struct TrainFlags {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool force = false;
  std::optional<double> lambda;
  std::size_t threads = 0;
  ForestConfig forest;
  LocalConfig local;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--dataset", f.dataset, "Dataset config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Seed for splits, forests and local fits")->required();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--force", f.force, "Overwrite existing outputs");
  cmd->add_option("--lambda", f.lambda, "Fixed Incremental lambda (default: selected)");
  cmd->add_option("--threads", f.threads, "Worker threads (default: all cores)");
  cmd->add_option("--trees", f.forest.n_trees, "Forest size")->capture_default_str();
  cmd->add_option("--max-depth", f.forest.max_depth)->capture_default_str();
  cmd->add_option("--min-leaf", f.forest.min_samples_leaf)->capture_default_str();
  cmd->add_option("--features-per-split", f.forest.features_per_split)->capture_default_str();
  cmd->add_option("--local-samples", f.local.n_samples)->capture_default_str();
  cmd->add_option("--local-scale", f.local.perturb_scale)->capture_default_str();
  cmd->add_option("--local-width", f.local.kernel_width)->capture_default_str();
}

StudyConfig study_config(const TrainFlags& f) {
  StudyConfig c;
  c.seed = f.seed;
  c.forest = f.forest;
  c.local = f.local;
  c.lambda = f.lambda;
  c.threads = f.threads;
  return c;
}

void refuse_existing(const fs::path& dir, const std::vector<std::string>& names, bool force) {
  if (force) return;
  for (const auto& n : names)
    if (fs::exists(dir / n))
      throw UserError("refusing to overwrite " + (dir / n).string() + " (use --force)");
}

int run_study(const TrainFlags& f) {
  const fs::path out = f.out;
  const std::vector<std::string> files = {"study.csv", "study.json", "heldout.json",
                                          "bundle.json", "surface.csv"};
  refuse_existing(out, files, f.force);
  const Dataset data = load_dataset(load_dataset_config(f.dataset));
  const StudyReport rep = run_modeling_study(data, study_config(f));

  const FeatureMatrix X_train = data.X.select_rows(rep.plan.train_rows());
  write_artifact(out / "study.csv", study_csv(rep), true);
  write_artifact(out / "study.json", study_json(rep), true);
  write_artifact(out / "heldout.json", heldout_json(rep), true);
  save_bundle(make_bundle(rep, data), out / "bundle.json", true);
  write_artifact(out / "surface.csv", surface_csv(rep, X_train, data), true);

  std::cout << data.name << ": " << data.size() << " rows (" << data.rows_dropped
            << " dropped), lambda " << format_number(rep.heldout.lambda) << ", rule "
            << rule_text(rep.heldout.rule, make_dataset_meta(data)) << "\n";
  for (const ReportRow& r : table_rows(rep))
    if (r.subspace == "combined" && r.metric == "unfaithfulness_validation")
      std::cout << "  " << r.xai_type << " unfaithfulness " << format_number(r.mean) << " "
                << r.unit << "\n";
  std::cout << "wrote ";
  for (const auto& n : files) std::cout << (out / n).string() << " ";
  std::cout << "\n";
  return 0;
}

int run_sweep(const TrainFlags& f, const std::string& grid_spec, const std::string& bundle_path) {
  const fs::path out = f.out;
  refuse_existing(out, {"sweep.csv", "sweep_factors.csv"}, f.force);
  const std::vector<double> grid = parse_percentile_grid(grid_spec);
  const Dataset data = load_dataset(load_dataset_config(f.dataset));
  const StudyConfig cfg = study_config(f);
  std::optional<Forest> forest;
  if (!bundle_path.empty()) forest = load_bundle(bundle_path).forest;
  const SweepResult sw = run_threshold_sweep(data, cfg, grid, forest ? &*forest : nullptr);
  const std::string hash = study_config_hash(data, cfg);
  write_artifact(out / "sweep.csv", sweep_csv(sw, data, cfg.seed, hash), true);
  write_artifact(out / "sweep_factors.csv", sweep_factors_csv(sw, data, cfg.seed, hash), true);

  std::cout << data.name << ": swept " << data.features[sw.feature_index].name << " over "
            << grid.size() << " thresholds, learned " << format_number(sw.learned_threshold);
  if (const auto m = sw.subglobal_min())
    std::cout << ", combined minimum at " << format_number(sw.points[*m].threshold)
              << (sw.minimum_matches_learned() ? " (within one step)" : " (not within one step)");
  std::cout << "\nwrote " << (out / "sweep.csv").string() << " "
            << (out / "sweep_factors.csv").string() << "\n";
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UserError("bad value '" + item + "' in --values");
    out.push_back(v);
  }
  return out;
}

int run_explain(const std::string& bundle_path, const std::string& xai,
                const std::string& values, const std::vector<std::string>& overrides_text,
                bool json_only) {
  const ModelBundle b = load_bundle(bundle_path);
  const XaiType type = xai_type_from_string(xai);
  if (!b.has(type)) throw UserError("bundle has no " + xai + " explainer");
  const std::vector<double> x = parse_values(values);
  if (x.size() != b.meta.features.size())
    throw UserError("--values needs " + std::to_string(b.meta.features.size()) + " numbers");
  for (std::size_t r = 0; r < x.size(); ++r)
    if (!std::isfinite(x[r]) || !within_allowed_range(x[r], b.meta.features[r]))
      throw UserError("value for '" + b.meta.features[r].name + "' is outside the allowed range");

  FactorOverrides overrides;
  for (const std::string& o : overrides_text) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UserError("--override expects name=factor");
    const std::vector<double> v = parse_values(o.substr(eq + 1));
    if (v.size() != 1) throw UserError("--override expects one number");
    overrides[o.substr(0, eq)] = v[0];
  }

  FittedExplainer model;
  switch (type) {
    case XaiType::kGlobal: model = b.global->model; break;
    case XaiType::kSubglobal: model = *b.subglobal; break;
    case XaiType::kIncremental: model = *b.incremental; break;
    case XaiType::kLocal: {
      LocalConfig cfg = b.local->config;
      cfg.seed = local_seed(b.local->config.seed, x);
      model = fit_local(x, b.forest, b.local->feature_std, cfg).model;
      break;
    }
  }
  const ExplanationTable t = build_table(b.meta, type, model, x, b.forest.predict(x), overrides);
  if (!json_only) std::cout << render_text(t) << "\n";
  std::cout << to_json(t).dump(2) << "\n";
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

int run_serve(const std::string& bundle_path, const std::string& host, int port,
              const std::string& static_dir) {
  auto bundle = std::make_shared<const ModelBundle>(load_bundle(bundle_path));
  HttpServer server(bundle, ServerOptions{host, port, static_dir});
  const int bound = server.bind();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!g_stop && !done) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  std::cout << "serving " << bundle->meta.name << " on http://" << host << ":" << bound
            << std::endl;
  server.listen();
  done = true;
  watcher.join();
  std::cout << "stopped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain a tabular predictor with linear factor surrogates"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags win");
  app.require_subcommand(1);

  TrainFlags study_flags;
  CLI::App* study = app.add_subcommand("study", "Cross-validated faithfulness study");
  add_train_flags(study, study_flags);

  TrainFlags sweep_flags;
  std::string grid = "10:90:5";
  std::string sweep_bundle;
  CLI::App* sweep = app.add_subcommand("sweep", "Threshold sweep on the learned split feature");
  add_train_flags(sweep, sweep_flags);
  sweep->add_option("--grid", grid, "Percentile grid lo:hi:step")->capture_default_str();
  sweep->add_option("--bundle", sweep_bundle, "Reuse this bundle's forest instead of training");

  std::string bundle_path, xai = "incremental", values;
  std::vector<std::string> overrides;
  bool json_only = false;
  CLI::App* explain = app.add_subcommand("explain", "Explanation table for one instance");
  explain->add_option("--bundle", bundle_path, "Model bundle from `study`")->required();
  explain->add_option("--xai", xai, "global|subglobal|incremental|local")->capture_default_str();
  explain->add_option("--values", values, "Comma-separated attribute values")->required();
  explain->add_option("--override", overrides, "name=factor (what-if); repeatable");
  explain->add_flag("--json", json_only, "Print only the JSON table");

  std::string serve_bundle, host = "127.0.0.1", static_dir;
  int port = 8080;
  CLI::App* serve = app.add_subcommand("serve", "HTTP JSON API over a bundle");
  serve->add_option("--bundle", serve_bundle, "Model bundle from `study`")->required();
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*study) return run_study(study_flags);
    if (*sweep) return run_sweep(sweep_flags, grid, sweep_bundle);
    if (*explain) return run_explain(bundle_path, xai, values, overrides, json_only);
    if (*serve) return run_serve(serve_bundle, host, port, static_dir);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EnvironmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
