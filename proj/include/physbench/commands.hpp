#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "physbench/baselines.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

/// Version of the JSON reports printed by the commands below.
inline constexpr int kReportSchemaVersion = 1;

struct GenerateConfig {
  DatasetId dataset = DatasetId::bounce2d;
  int n_videos = 0;  // 0 selects the canonical count
  std::uint64_t master_seed = 0;
  std::filesystem::path root = "data";
  int jobs = 1;
  bool overwrite = false;
};

struct BaselineConfig {
  std::filesystem::path root = "data";
  DatasetId dataset = DatasetId::bounce2d;
  std::optional<TaskId> task;  // every task of the dataset when empty
  LinearFitConfig fit;
};

struct ScoreConfig {
  std::filesystem::path pred;
  std::filesystem::path truth;
  bool rollout = false;
};

/// Each command returns its machine-readable report and fills `table` with a
/// human-readable summary. Timings go only to the table.
nlohmann::json run_generate(const GenerateConfig& config, std::string* table = nullptr);
nlohmann::json run_baseline(const BaselineConfig& config, std::string* table = nullptr);
nlohmann::json run_score(const ScoreConfig& config, std::string* table = nullptr);

/// Per-task baseline report for an already-open dataset directory.
nlohmann::json baseline_task_report(const std::filesystem::path& dataset_directory, TaskId task,
                                    const LinearFitConfig& fit = {});

/// JSON number, or the string "inf" for the identical-frame PSNR sentinel.
nlohmann::json metric_value(double v);

}  // namespace physbench
