#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ixai/dataset.hpp"
#include "ixai/display.hpp"
#include "ixai/study.hpp"
#include "ixai/sweep.hpp"

namespace ixai {

inline constexpr const char* kToolVersion = "0.1.0";

// Header lines every CSV artifact starts with, each prefixed by "# ".
std::string artifact_header(const std::string& kind, std::uint64_t seed,
                            const std::string& config_hash);

std::string study_csv(const StudyReport& report);
std::string study_json(const StudyReport& report);
std::string heldout_json(const StudyReport& report);

// Long format: percentile, threshold, n_below, n_at_or_above, series, value,
// status, is_min. Values are in display units of the target.
std::string sweep_csv(const SweepResult& sweep, const Dataset& data, std::uint64_t seed,
                      const std::string& config_hash);
// percentile, threshold, model, side, term, value, status
std::string sweep_factors_csv(const SweepResult& sweep, const Dataset& data,
                              std::uint64_t seed, const std::string& config_hash);

// Estimates of the Global, Subglobal and Incremental explainers and the
// predictor over an n x n grid spanning the training range of features 2
// and 4 (indices 1 and 3); the other features sit at their training medians.
std::string surface_csv(const StudyReport& report, const FeatureMatrix& X_train,
                        const Dataset& data, std::size_t n = 25);

// Refuses to replace an existing file unless force is set (UserError);
// write failures are EnvironmentError.
void write_artifact(const std::filesystem::path& path, const std::string& content, bool force);

}  // namespace ixai
