#pragma once

// Model bundle: one JSON document holding everything the service and the
// `explain` command need, so nothing is retrained after a study.
//
//   {
//     "version": "0.1.0",
//     "seed": 42,
//     "config_hash": "...",
//     "dataset_meta": {name, display_name, task, target: {name, unit},
//                      display_scale, features: [{name, unit, min, max}]},
//     "forest": {task, feature_count, trees: [[[feature, threshold, left,
//                right, value], ...], ...]},
//     "explainers": [{"type": "global", ...}, ...],
//     "instances": [[x1, x2, x3, x4], ...]        // heldout test rows
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ixai/explainers.hpp"
#include "ixai/forest.hpp"
#include "ixai/table.hpp"
#include "json.hpp"

namespace ixai {

struct StudyReport;

nlohmann::json to_json(const LinearFactorModel& m);
nlohmann::json to_json(const PartitionRule& r);
nlohmann::json to_json(const FitInfo& info);
nlohmann::json to_json(const Forest& f);
nlohmann::json to_json(const DatasetMeta& m);

LinearFactorModel linear_model_from_json(const nlohmann::json& j);
PartitionRule rule_from_json(const nlohmann::json& j);
FitInfo fit_info_from_json(const nlohmann::json& j);
Forest forest_from_json(const nlohmann::json& j);
DatasetMeta dataset_meta_from_json(const nlohmann::json& j);

// Local explanations are fitted on demand; the bundle keeps their settings
// and the training spread used for perturbations.
struct LocalSettings {
  LocalConfig config;
  std::vector<double> feature_std;

  bool operator==(const LocalSettings& o) const {
    return config.n_samples == o.config.n_samples &&
           config.perturb_scale == o.config.perturb_scale &&
           config.kernel_width == o.config.kernel_width && config.seed == o.config.seed &&
           feature_std == o.feature_std;
  }
};

struct ModelBundle {
  std::string version;
  std::uint64_t seed = 0;
  std::string config_hash;
  DatasetMeta meta;
  Forest forest;
  std::optional<GlobalModel> global;
  std::optional<SubglobalModel> subglobal;
  std::optional<IncrementalModel> incremental;
  std::optional<LocalSettings> local;
  std::vector<std::vector<double>> instances;

  std::vector<XaiType> available() const;
  bool has(XaiType t) const;
  // The partition rule shown for subspaces: Incremental's, else Subglobal's.
  std::optional<PartitionRule> rule() const;
};

ModelBundle make_bundle(const StudyReport& report, const Dataset& data);

nlohmann::json to_json(const ModelBundle& b);
// Throws UserError on malformed or inconsistent documents.
ModelBundle bundle_from_json(const nlohmann::json& j);

void save_bundle(const ModelBundle& b, const std::filesystem::path& path, bool force);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace ixai
