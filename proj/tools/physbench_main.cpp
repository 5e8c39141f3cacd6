// physbench command-line entry point: generate, baseline, score.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "physbench/commands.hpp"
#include "physbench/errors.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> dataset_names() {
  std::vector<std::string> out;
  for (auto d : physbench::kAllDatasets) out.emplace_back(physbench::to_string(d));
  return out;
}

std::vector<std::string> task_names() {
  std::vector<std::string> out;
  for (auto t : physbench::kAllTasks) out.emplace_back(physbench::to_string(t));
  return out;
}

void emit(const nlohmann::json& report, const std::string& out_path, const std::string& table) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text << std::flush;
    if (!std::cout) throw physbench::IoError("failed to write report to stdout");
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw physbench::IoError("failed to write report to " + out_path);
  }
  std::cerr << table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics video benchmark: dataset generation, lower-bound baselines, frame metrics"};
  app.require_subcommand(1);
  std::string out_path;

  physbench::GenerateConfig gen;
  std::string gen_dataset;
  std::string gen_root = "data";
  auto* generate = app.add_subcommand("generate", "Generate a dataset of rendered videos with labels");
  generate->add_option("--dataset", gen_dataset, "Dataset id")->required()->check(CLI::IsMember(dataset_names()));
  generate->add_option("--videos", gen.n_videos, "Number of videos (default: canonical count)")
      ->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.master_seed, "Master seed")->default_val(0);
  generate->add_option("--root", gen_root, "Output root directory")->default_val("data");
  generate->add_option("--jobs", gen.jobs, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
  generate->add_flag("--overwrite", gen.overwrite, "Replace an existing dataset directory");
  generate->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  physbench::BaselineConfig base;
  std::string base_dataset, base_task;
  std::string base_root = "data";
  auto* baseline = app.add_subcommand("baseline", "Compute the constant and image-linear lower bounds");
  baseline->add_option("--dataset", base_dataset, "Dataset id")->required()->check(CLI::IsMember(dataset_names()));
  baseline->add_option("--task", base_task, "Probing task (default: every task of the dataset)")
      ->check(CLI::IsMember(task_names()));
  baseline->add_option("--root", base_root, "Root directory holding the dataset")->default_val("data");
  baseline->add_option("--epochs", base.fit.max_epochs, "Maximum gradient-descent epochs")
      ->default_val(base.fit.max_epochs)
      ->check(CLI::PositiveNumber);
  baseline->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  physbench::ScoreConfig score;
  std::string pred_dir, truth_dir;
  auto* score_cmd = app.add_subcommand("score", "Score predicted frames against ground truth");
  score_cmd->add_option("--pred", pred_dir, "Directory of predicted .pgm frames")->required();
  score_cmd->add_option("--truth", truth_dir, "Directory of ground-truth .pgm frames")->required();
  score_cmd->add_flag("--rollout", score.rollout, "Score each directory as one rollout sequence");
  score_cmd->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    nlohmann::json report;
    std::string table;
    if (*generate) {
      gen.dataset = physbench::parse_dataset_id(gen_dataset);
      gen.root = gen_root;
      report = physbench::run_generate(gen, &table);
    } else if (*baseline) {
      base.dataset = physbench::parse_dataset_id(base_dataset);
      base.root = base_root;
      if (!base_task.empty()) {
        base.task = physbench::parse_task_id(base_task);
        if (physbench::dataset_of(*base.task) != base.dataset) {
          std::cerr << "error: task " << base_task << " does not belong to dataset " << base_dataset << "\n";
          return kExitUsage;
        }
      }
      report = physbench::run_baseline(base, &table);
    } else {
      score.pred = pred_dir;
      score.truth = truth_dir;
      report = physbench::run_score(score, &table);
    }
    emit(report, out_path, table);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
