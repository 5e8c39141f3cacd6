#include "physbench/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "physbench/dataset_io.hpp"
#include "physbench/errors.hpp"
#include "physbench/generate.hpp"
#include "physbench/metrics.hpp"

namespace physbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Orders "frame_2" before "frame_10".
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      const std::string na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      const auto ta = na.find_first_not_of('0'), tb = nb.find_first_not_of('0');
      const std::string sa = ta == std::string::npos ? "" : na.substr(ta);
      const std::string sb = tb == std::string::npos ? "" : nb.substr(tb);
      if (sa.size() != sb.size()) return sa.size() < sb.size();
      if (sa != sb) return sa < sb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

std::vector<std::string> pgm_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") out.push_back(fs::relative(e.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end(), natural_less);
  return out;
}

std::string task_key(TaskId t) { return std::string(to_string(t)); }

}  // namespace

json metric_value(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

json run_generate(const GenerateConfig& config, std::string* table) {
  const int n = config.n_videos > 0 ? config.n_videos : canonical_video_count(config.dataset);
  const auto start = std::chrono::steady_clock::now();
  const GenerateResult r =
      generate_dataset(config.root, config.dataset, n, config.master_seed, config.jobs, config.overwrite);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["command"] = "generate";
  report["dataset"] = std::string(to_string(config.dataset));
  report["master_seed"] = config.master_seed;
  report["n_videos"] = n;
  report["frames_per_video"] = r.manifest.frames_per_video;
  report["directory"] = r.directory.generic_string();
  report["retries"] = r.retries;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(tree_checksum(r.directory)));
  report["checksum"] = hex;

  json hist = json::object();
  for (TaskId t : tasks_of(config.dataset)) {
    std::map<double, int> counts;
    for (const auto& v : r.manifest.videos) {
      for (const auto& l : v.labels) {
        if (l.task == t) ++counts[l.raw_value];
      }
    }
    json h = json::array();
    for (const auto& [value, count] : counts) h.push_back({{"value", value}, {"count", count}});
    hist[task_key(t)] = h;
  }
  report["label_histogram"] = hist;

  if (table) {
    std::ostringstream ss;
    ss << "dataset   " << to_string(config.dataset) << "\n"
       << "videos    " << n << " x " << r.manifest.frames_per_video << " frames\n"
       << "written   " << r.directory.generic_string() << "\n"
       << "retries   " << r.retries << "\n"
       << "checksum  " << hex << "\n"
       << "wall time " << fmt("%.2f s", seconds) << "\n";
    for (const auto& [task, h] : hist.items()) ss << "task      " << task << ": " << h.size() << " distinct labels\n";
    *table = ss.str();
  }
  return report;
}

json baseline_task_report(const fs::path& dataset_directory, TaskId task, const LinearFitConfig& fit) {
  const DatasetReader reader(dataset_directory);
  const DatasetManifest& m = reader.manifest();
  if (dataset_of(task) != m.dataset) {
    throw InvalidTask("task " + task_key(task) + " does not belong to dataset " + std::string(to_string(m.dataset)));
  }
  const int inputs = input_frames(task);

  std::vector<double> raw;
  std::vector<Clip> clips;
  for (const auto& v : m.videos) {
    const auto it = std::find_if(v.labels.begin(), v.labels.end(), [task](const LabelSet& l) { return l.task == task; });
    if (it == v.labels.end()) throw FormatError("video " + std::to_string(v.index) + " has no label for " + task_key(task));
    raw.push_back(it->raw_value);
    Clip c;
    c.inputs = reader.video_frames(v.index, inputs);
    c.target = inputs < m.frames_per_video ? reader.frame(v.index, inputs) : Frame();
    c.video = v.index;
    clips.push_back(std::move(c));
  }
  const NormalizedLabels labels = normalize_labels(raw);
  const FeatureSet features = flatten_clips(clips);
  clips.clear();

  const Split split = split_by_video(features.videos, fit.holdout_fraction);
  std::vector<double> train, holdout;
  for (auto i : split.train) train.push_back(labels.scaled[i]);
  for (auto i : split.holdout) holdout.push_back(labels.scaled[i]);

  BaselineResult constant = optimal_constant(train, fit.beta);
  constant.task = task;
  if (!holdout.empty()) constant.loss = constant_objective(holdout, constant.constant, fit.beta);

  BaselineResult linear = fit_image_linear(features, labels.scaled, fit);
  linear.task = task;

  json report;
  report["input_frames"] = inputs;
  report["normalization_scale"] = labels.scale;
  report["n_train"] = split.train.size();
  report["n_holdout"] = split.holdout.size();
  report["beta"] = fit.beta;
  report["zero_prediction_train_loss"] = constant_objective(train, 0.0, fit.beta);
  report["optimal_constant"] = {
      {"constant", constant.constant}, {"loss", constant.loss}, {"train_loss", constant.train_loss}};
  report["image_linear"] = {{"loss", linear.loss},
                            {"train_loss", linear.train_loss},
                            {"epochs", linear.loss_history.size()},
                            {"bias", linear.bias}};
  return report;
}

json run_baseline(const BaselineConfig& config, std::string* table) {
  const fs::path dir = dataset_dir(config.root, config.dataset);
  if (!fs::exists(dir / kManifestName)) throw IoError("no dataset at " + dir.string());
  std::vector<TaskId> tasks = config.task ? std::vector<TaskId>{*config.task} : tasks_of(config.dataset);
  for (TaskId t : tasks) {
    if (dataset_of(t) != config.dataset) {
      throw InvalidTask("task " + task_key(t) + " does not belong to dataset " + std::string(to_string(config.dataset)));
    }
  }
  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["command"] = "baseline";
  report["dataset"] = std::string(to_string(config.dataset));
  report["directory"] = dir.generic_string();
  json per_task = json::object();
  std::ostringstream ss;
  ss << "task                  m   optimal_constant   image_linear\n";
  for (TaskId t : tasks) {
    const json r = baseline_task_report(dir, t, config.fit);
    per_task[task_key(t)] = r;
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %3d   %16.6f   %12.6f\n", task_key(t).c_str(), r["input_frames"].get<int>(),
                  r["optimal_constant"]["loss"].get<double>(), r["image_linear"]["loss"].get<double>());
    ss << line;
  }
  report["tasks"] = per_task;
  if (table) *table = ss.str();
  return report;
}

json run_score(const ScoreConfig& config, std::string* table) {
  const auto pred_files = pgm_files(config.pred);
  const auto truth_files = pgm_files(config.truth);
  if (pred_files.empty()) throw InvalidInput("no .pgm frames under " + config.pred.string());
  if (pred_files != truth_files) {
    throw InvalidInput("prediction and truth frames are misaligned (" + std::to_string(pred_files.size()) + " vs " +
                       std::to_string(truth_files.size()) + " files, or differing names)");
  }

  // Sequences are the frames sharing a parent directory; without rollout every frame is its own clip.
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  std::map<std::string, std::size_t> group_of;
  for (const auto& f : pred_files) {
    const std::string key = config.rollout ? fs::path(f).parent_path().generic_string() : f;
    auto [it, inserted] = group_of.try_emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].second.push_back(f);
  }

  std::vector<double> all_psnr, all_ssim, all_l1;
  json entries = json::array();
  for (const auto& [key, files] : groups) {
    std::vector<Frame> pred, truth;
    for (const auto& f : files) {
      pred.push_back(read_pgm(config.pred / f));
      truth.push_back(read_pgm(config.truth / f));
    }
    const MetricReport r = score_rollout(pred, truth);
    all_psnr.insert(all_psnr.end(), r.psnr_per_frame.begin(), r.psnr_per_frame.end());
    all_ssim.insert(all_ssim.end(), r.ssim_per_frame.begin(), r.ssim_per_frame.end());
    all_l1.insert(all_l1.end(), r.l1_per_frame.begin(), r.l1_per_frame.end());
    json e = {{"name", key}, {"psnr", metric_value(r.psnr)}, {"ssim", r.ssim}, {"l1", r.l1}};
    if (config.rollout) {
      json p = json::array();
      for (double v : r.psnr_per_frame) p.push_back(metric_value(v));
      e["frames"] = files.size();
      e["psnr_per_frame"] = p;
      e["ssim_per_frame"] = r.ssim_per_frame;
      e["l1_per_frame"] = r.l1_per_frame;
    }
    entries.push_back(e);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["command"] = "score";
  report["mode"] = config.rollout ? "rollout" : "clip";
  report["n_frames"] = pred_files.size();
  report[config.rollout ? "sequences" : "clips"] = entries;
  const double agg_psnr = aggregate_psnr(all_psnr);
  report["aggregate"] = {{"psnr", metric_value(agg_psnr)}, {"ssim", mean(all_ssim)}, {"l1", mean(all_l1)}};
  if (table) {
    std::ostringstream ss;
    ss << "frames " << pred_files.size() << "  " << (config.rollout ? "sequences " : "clips ") << groups.size() << "\n"
       << "PSNR   " << (std::isinf(agg_psnr) ? std::string("inf") : fmt("%.4f dB", agg_psnr)) << "\n"
       << "SSIM   " << fmt("%.6f", mean(all_ssim)) << "\n"
       << "L1     " << fmt("%.6f", mean(all_l1)) << "\n";
    *table = ss.str();
  }
  return report;
}

}  // namespace physbench
