#include "physbench/generate.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "physbench/errors.hpp"
#include "physbench/numerics.hpp"

namespace physbench {

std::uint64_t attempt_seed(std::uint64_t video_seed, int attempt) {
  return attempt == 0 ? video_seed : derive_seed(video_seed, static_cast<std::uint64_t>(attempt));
}

GeneratedVideo generate_video(DatasetId id, std::uint64_t master_seed, int index, int n_videos,
                              const GenerationOptions& options) {
  if (index < 0 || index >= n_videos) throw InvalidInput("video index out of range");
  const std::uint64_t video_seed = derive_seed(master_seed, static_cast<std::uint64_t>(index));
  std::string last_error;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    const std::uint64_t seed = attempt_seed(video_seed, attempt);
    try {
      GeneratedVideo out;
      out.record.params = sample_params(id, seed, options);
      const Trajectory traj = simulate(out.record.params);
      out.record.index = index;
      out.record.seed = seed;
      out.record.split = canonical_split(index, n_videos);
      out.record.labels = labels_for(out.record.params, traj);
      out.frames = render_trajectory(traj, out.record.params);
      out.attempts = attempt + 1;
      return out;
    } catch (const SimulationFailure& e) {
      last_error = e.what();
    } catch (const NumericFailure& e) {
      last_error = e.what();
    }
  }
  throw SimulationFailure("video " + std::to_string(index) + " failed after " +
                          std::to_string(kMaxGenerationAttempts) + " attempts: " + last_error);
}

GenerateResult generate_dataset(const std::filesystem::path& root, DatasetId id, int n_videos,
                                std::uint64_t master_seed, int jobs, bool overwrite,
                                const GenerationOptions& options) {
  if (n_videos <= 0) throw InvalidInput("need at least one video");
  if (jobs <= 0) throw InvalidInput("jobs must be positive");

  DatasetWriter writer(root, id, overwrite);
  GenerateResult result;
  result.directory = writer.directory();
  DatasetManifest& m = result.manifest;
  m.dataset = id;
  m.master_seed = master_seed;
  m.n_videos = n_videos;
  m.frames_per_video = frames_per_video(id);
  m.videos.resize(static_cast<std::size_t>(n_videos));
  std::vector<int> attempts(static_cast<std::size_t>(n_videos), 1);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_videos || failed.load()) return;
      try {
        GeneratedVideo v = generate_video(id, master_seed, i, n_videos, options);
        v.record.frame_paths = writer.write_video(i, v.frames);
        attempts[static_cast<std::size_t>(i)] = v.attempts;
        m.videos[static_cast<std::size_t>(i)] = std::move(v.record);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int threads = std::min(jobs, n_videos);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (int a : attempts) result.retries += a - 1;
  compute_normalization(m);
  writer.write_manifest(m);
  return result;
}

}  // namespace physbench
