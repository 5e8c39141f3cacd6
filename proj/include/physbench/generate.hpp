#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "physbench/dataset_io.hpp"
#include "physbench/render.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

/// Attempts per video before a simulation failure is reported.
inline constexpr int kMaxGenerationAttempts = 16;

struct GeneratedVideo {
  VideoRecord record;  // frame_paths left empty until written
  std::vector<Frame> frames;
  int attempts = 1;
};

/// Seed used for attempt `attempt` of a video whose base seed is `video_seed`.
std::uint64_t attempt_seed(std::uint64_t video_seed, int attempt);

/// Samples, simulates and renders one video. Attempt 0 uses derive_seed(master_seed, index);
/// each simulation failure moves on to the next sub-seed.
GeneratedVideo generate_video(DatasetId id, std::uint64_t master_seed, int index, int n_videos,
                              const GenerationOptions& options = {});

struct GenerateResult {
  DatasetManifest manifest;
  std::filesystem::path directory;
  int retries = 0;  // extra attempts summed over all videos
};

/// Generates and writes a whole dataset. Output is identical for any job count.
GenerateResult generate_dataset(const std::filesystem::path& root, DatasetId id, int n_videos,
                                std::uint64_t master_seed, int jobs = 1, bool overwrite = false,
                                const GenerationOptions& options = {});

}  // namespace physbench
