#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "physbench/clip.hpp"
#include "physbench/render.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";

struct VideoRecord {
  int index = 0;
  std::uint64_t seed = 0;  // seed actually passed to sample_params (after any retries)
  std::string split;       // "train", "val" or "test"
  ScenarioParams params;
  std::vector<LabelSet> labels;
  std::vector<std::string> frame_paths;  // relative to the dataset directory

  bool operator==(const VideoRecord& o) const;
};

struct DatasetManifest {
  int schema_version = kSchemaVersion;
  DatasetId dataset = DatasetId::bounce2d;
  std::uint64_t master_seed = 0;
  int n_videos = 0;
  int frames_per_video = 0;
  /// Population std of each task's raw labels over this dataset.
  std::map<std::string, double> normalization;
  std::vector<VideoRecord> videos;

  bool operator==(const DatasetManifest& o) const;
};

// Layout helpers: <root>/<dataset_id>/video_<i>/frame_<k>.pgm
std::string video_dir_name(int video);
std::string frame_relative_path(int video, int frame);
std::filesystem::path dataset_dir(const std::filesystem::path& root, DatasetId id);

/// Canonical 80/10/10 split by video index.
std::string canonical_split(int index, int n_videos);

/// Fills normalization scales from the raw labels of every video.
void compute_normalization(DatasetManifest& manifest);

nlohmann::json params_to_json(const ScenarioParams& params);
ScenarioParams params_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Binary P5 graymap, maxval 255.
void write_pgm(const std::filesystem::path& path, const Frame& frame);
Frame read_pgm(const std::filesystem::path& path);
/// Parses only the header; returns {width, height}.
std::pair<int, int> read_pgm_header(const std::filesystem::path& path);

/// Streams a dataset to disk one video at a time; the manifest is written last.
/// Videos may be written from several threads at once.
class DatasetWriter {
 public:
  DatasetWriter(const std::filesystem::path& root, DatasetId id, bool overwrite);

  const std::filesystem::path& directory() const { return dir_; }
  /// Writes frames and returns their relative paths.
  std::vector<std::string> write_video(int index, const std::vector<Frame>& frames) const;
  void write_manifest(const DatasetManifest& manifest) const;

 private:
  std::filesystem::path dir_;
};

/// Writes every video of the manifest and then the manifest itself.
std::filesystem::path write_dataset(const std::filesystem::path& root, DatasetManifest manifest,
                                    const std::vector<std::vector<Frame>>& frames, bool overwrite = false);

/// Opens a dataset directory (the one holding manifest.json), validating the schema
/// version, frame counts, and every frame header. Frames load lazily.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& dataset_directory);

  const DatasetManifest& manifest() const { return manifest_; }
  const std::filesystem::path& directory() const { return dir_; }

  Frame frame(int video, int k) const;
  std::vector<Frame> video_frames(int video, int count = -1) const;

 private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
};

DatasetReader read_dataset(const std::filesystem::path& dataset_directory);

/// FNV-1a over sorted relative paths and file bytes of a directory tree.
std::uint64_t tree_checksum(const std::filesystem::path& dir);

}  // namespace physbench
