#include "physbench/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "physbench/baselines.hpp"
#include "physbench/errors.hpp"

namespace physbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string video_dir_name(int video) { return "video_" + std::to_string(video); }

std::string frame_relative_path(int video, int frame) {
  return video_dir_name(video) + "/frame_" + std::to_string(frame) + ".pgm";
}

fs::path dataset_dir(const fs::path& root, DatasetId id) { return root / std::string(to_string(id)); }

std::string canonical_split(int index, int n_videos) {
  const long long scaled = 10LL * index;
  if (scaled < 8LL * n_videos) return "train";
  if (scaled < 9LL * n_videos) return "val";
  return "test";
}

bool VideoRecord::operator==(const VideoRecord& o) const {
  return params_to_json(params) == params_to_json(o.params) && index == o.index && seed == o.seed &&
         split == o.split && frame_paths == o.frame_paths && labels.size() == o.labels.size() &&
         std::equal(labels.begin(), labels.end(), o.labels.begin(), [](const LabelSet& a, const LabelSet& b) {
           return a.task == b.task && a.raw_value == b.raw_value && a.normalized_value == b.normalized_value &&
                  a.input_frames_m == b.input_frames_m;
         });
}

bool DatasetManifest::operator==(const DatasetManifest& o) const {
  return schema_version == o.schema_version && dataset == o.dataset && master_seed == o.master_seed &&
         n_videos == o.n_videos && frames_per_video == o.frames_per_video && normalization == o.normalization &&
         videos == o.videos;
}

void compute_normalization(DatasetManifest& manifest) {
  manifest.normalization.clear();
  for (TaskId task : tasks_of(manifest.dataset)) {
    std::vector<double> raw;
    for (const auto& v : manifest.videos) {
      for (const auto& l : v.labels) {
        if (l.task == task) raw.push_back(l.raw_value);
      }
    }
    if (raw.empty()) continue;
    // A single-valued label set has no spread to normalize by; keep the raw scale.
    const double sd = population_std(raw);
    manifest.normalization[std::string(to_string(task))] = sd > 0.0 ? sd : 1.0;
  }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json balls_to_json(const std::vector<Ball>& balls) {
  json out = json::array();
  for (const auto& b : balls) {
    out.push_back({{"position", vec_to_json(b.position)},
                   {"velocity", vec_to_json(b.velocity)},
                   {"radius", b.radius},
                   {"intensity", b.intensity}});
  }
  return out;
}

std::vector<Ball> balls_from_json(const json& j) {
  std::vector<Ball> out;
  for (const auto& b : j) {
    out.push_back({vec_from_json(b.at("position")), vec_from_json(b.at("velocity")), b.at("radius").get<double>(),
                   b.at("intensity").get<double>()});
  }
  return out;
}

}  // namespace

json params_to_json(const ScenarioParams& params) {
  json j;
  j["dataset"] = std::string(to_string(params.dataset));
  j["seed"] = params.seed;
  j["background"] = params.background;
  json c;
  std::visit(
      [&c](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Bounce2dParams>) {
          c = {{"gravity_y", p.gravity_y}, {"gravity", vec_to_json(p.gravity)}, {"balls", balls_to_json(p.balls)}};
        } else if constexpr (std::is_same_v<T, Bounce3dParams>) {
          c = {{"gravity_y", p.gravity_y}, {"balls", balls_to_json(p.balls)}};
        } else if constexpr (std::is_same_v<T, RollerParams>) {
          c = {{"gravity", p.gravity},
               {"cubic", p.cubic},
               {"quad", p.quad},
               {"valley_x", p.valley_x},
               {"base_height", p.base_height},
               {"start_x", p.start_x},
               {"start_speed", p.start_speed},
               {"ball_radius", p.ball_radius},
               {"ball_intensity", p.ball_intensity},
               {"track_intensity", p.track_intensity}};
        } else if constexpr (std::is_same_v<T, PendulumParams>) {
          c = {{"gravity", p.gravity},
               {"length", p.length},
               {"theta0", p.theta0},
               {"mass", p.mass},
               {"bob_intensity", p.bob_intensity}};
        } else if constexpr (std::is_same_v<T, BlocksParams>) {
          c = {{"mass1", p.mass1},         {"mass2", p.mass2},         {"center1", p.center1},
               {"center2", p.center2},     {"velocity1", p.velocity1}, {"velocity2", p.velocity2},
               {"intensity1", p.intensity1}, {"intensity2", p.intensity2}};
        } else {
          c = {{"moon_mass", p.moon_mass},
               {"moon_radius", p.moon_radius},
               {"asteroid_radius", p.asteroid_radius},
               {"asteroid_position", vec_to_json(p.asteroid_position)},
               {"asteroid_velocity", vec_to_json(p.asteroid_velocity)},
               {"moon_intensity", p.moon_intensity},
               {"asteroid_intensity", p.asteroid_intensity}};
        }
      },
      params.constants);
  j["constants"] = c;
  return j;
}

ScenarioParams params_from_json(const json& j) {
  ScenarioParams p;
  p.dataset = parse_dataset_id(j.at("dataset").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.background = j.at("background").get<double>();
  const json& c = j.at("constants");
  auto d = [&c](const char* key) { return c.at(key).get<double>(); };
  switch (p.dataset) {
    case DatasetId::bounce2d:
      p.constants = Bounce2dParams{d("gravity_y"), vec_from_json(c.at("gravity")), balls_from_json(c.at("balls"))};
      break;
    case DatasetId::bounce3d: p.constants = Bounce3dParams{d("gravity_y"), balls_from_json(c.at("balls"))}; break;
    case DatasetId::roller:
      p.constants = RollerParams{d("gravity"),   d("cubic"),       d("quad"),           d("valley_x"),
                                 d("base_height"), d("start_x"),   d("start_speed"),    d("ball_radius"),
                                 d("ball_intensity"), d("track_intensity")};
      break;
    case DatasetId::pendulum:
      p.constants = PendulumParams{d("gravity"), d("length"), d("theta0"), d("mass"), d("bob_intensity")};
      break;
    case DatasetId::blocks:
      p.constants = BlocksParams{d("mass1"),     d("mass2"),     d("center1"),    d("center2"),
                                 d("velocity1"), d("velocity2"), d("intensity1"), d("intensity2")};
      break;
    case DatasetId::moon:
      p.constants = MoonParams{d("moon_mass"),
                               d("moon_radius"),
                               d("asteroid_radius"),
                               vec_from_json(c.at("asteroid_position")),
                               vec_from_json(c.at("asteroid_velocity")),
                               d("moon_intensity"),
                               d("asteroid_intensity")};
      break;
  }
  return p;
}

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["dataset_id"] = std::string(to_string(m.dataset));
  j["master_seed"] = m.master_seed;
  j["n_videos"] = m.n_videos;
  j["frames_per_video"] = m.frames_per_video;
  j["frame_size"] = kFrameSize;
  json norm = json::object();
  for (const auto& [task, scale] : m.normalization) norm[task] = {{"scale", scale}};
  j["normalization"] = norm;
  json videos = json::array();
  for (const auto& v : m.videos) {
    json labels = json::array();
    for (const auto& l : v.labels) {
      const std::string name(to_string(l.task));
      json lj = {{"task", name},
                 {"raw", l.raw_value},
                 {"normalized", l.normalized_value},
                 {"input_frames", l.input_frames_m}};
      if (auto it = m.normalization.find(name); it != m.normalization.end()) {
        lj["dataset_normalized"] = l.raw_value / it->second;
      }
      labels.push_back(lj);
    }
    videos.push_back({{"index", v.index},
                      {"seed", v.seed},
                      {"split", v.split},
                      {"params", params_to_json(v.params)},
                      {"labels", labels},
                      {"frames", v.frame_paths}});
  }
  j["videos"] = videos;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  m.schema_version = j.at("schema_version").get<int>();
  if (m.schema_version != kSchemaVersion) {
    throw SchemaVersionError("manifest schema_version " + std::to_string(m.schema_version) + " is not supported (expected " +
                             std::to_string(kSchemaVersion) + ")");
  }
  m.dataset = parse_dataset_id(j.at("dataset_id").get<std::string>());
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.n_videos = j.at("n_videos").get<int>();
  m.frames_per_video = j.at("frames_per_video").get<int>();
  for (const auto& [task, entry] : j.at("normalization").items()) m.normalization[task] = entry.at("scale").get<double>();
  for (const auto& vj : j.at("videos")) {
    VideoRecord v;
    v.index = vj.at("index").get<int>();
    v.seed = vj.at("seed").get<std::uint64_t>();
    v.split = vj.at("split").get<std::string>();
    v.params = params_from_json(vj.at("params"));
    for (const auto& lj : vj.at("labels")) {
      v.labels.push_back({parse_task_id(lj.at("task").get<std::string>()), lj.at("raw").get<double>(),
                          lj.at("normalized").get<double>(), lj.at("input_frames").get<int>()});
    }
    v.frame_paths = vj.at("frames").get<std::vector<std::string>>();
    m.videos.push_back(std::move(v));
  }
  return m;
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

void write_pgm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  std::vector<char> bytes(frame.size());
  const auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) bytes[i] = static_cast<char>(to_byte(px[i]));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in, const fs::path& path) {
  std::string tok;
  for (;;) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw FormatError("truncated PGM header: " + path.string());
  return tok;
}

int header_int(std::istream& in, const fs::path& path) {
  const std::string tok = header_token(in, path);
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw FormatError("malformed PGM header value '" + tok + "': " + path.string());
  }
  return std::stoi(tok);
}

std::pair<int, int> parse_header(std::istream& in, const fs::path& path) {
  if (header_token(in, path) != "P5") throw FormatError("not a binary PGM (P5): " + path.string());
  const int w = header_int(in, path);
  const int h = header_int(in, path);
  const int maxval = header_int(in, path);
  if (maxval != 255) throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + ": " + path.string());
  if (w <= 0 || h <= 0) throw FormatError("invalid PGM dimensions: " + path.string());
  return {w, h};
}

}  // namespace

std::pair<int, int> read_pgm_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFrameError(path.string());
  return parse_header(in, path);
}

Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFrameError(path.string());
  const auto [w, h] = parse_header(in, path);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError("truncated PGM data: " + path.string());
  Frame f(w, h);
  auto px = f.pixels();
  for (std::size_t i = 0; i < bytes.size(); ++i) px[i] = bytes[i] / 255.0;
  return f;
}

// ---------------------------------------------------------------------------
// Writer / reader
// ---------------------------------------------------------------------------

DatasetWriter::DatasetWriter(const fs::path& root, DatasetId id, bool overwrite) : dir_(dataset_dir(root, id)) {
  std::error_code ec;
  if (fs::exists(dir_)) {
    if (!overwrite) throw IoError("dataset directory already exists (pass overwrite to replace): " + dir_.string());
    fs::remove_all(dir_, ec);
    if (ec) throw IoError("cannot remove " + dir_.string() + ": " + ec.message());
  }
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
}

std::vector<std::string> DatasetWriter::write_video(int index, const std::vector<Frame>& frames) const {
  std::error_code ec;
  fs::create_directories(dir_ / video_dir_name(index), ec);
  if (ec) throw IoError("cannot create video directory: " + ec.message());
  std::vector<std::string> paths;
  paths.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    paths.push_back(frame_relative_path(index, static_cast<int>(k)));
    write_pgm(dir_ / paths.back(), frames[k]);
  }
  return paths;
}

void DatasetWriter::write_manifest(const DatasetManifest& manifest) const {
  std::ofstream out(dir_ / kManifestName, std::ios::binary);
  if (!out) throw IoError("cannot write manifest in " + dir_.string());
  // nlohmann::json objects are key-sorted, so equal manifests serialize identically.
  out << manifest_to_json(manifest).dump(2) << '\n';
  if (!out) throw IoError("manifest write failed in " + dir_.string());
}

fs::path write_dataset(const fs::path& root, DatasetManifest manifest, const std::vector<std::vector<Frame>>& frames,
                       bool overwrite) {
  if (static_cast<int>(frames.size()) != manifest.n_videos || manifest.videos.size() != frames.size()) {
    throw InvalidInput("manifest video count does not match the frames provided");
  }
  DatasetWriter writer(root, manifest.dataset, overwrite);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (static_cast<int>(frames[i].size()) != manifest.frames_per_video) {
      throw InvalidInput("video " + std::to_string(i) + " has the wrong number of frames");
    }
    manifest.videos[i].frame_paths = writer.write_video(manifest.videos[i].index, frames[i]);
  }
  writer.write_manifest(manifest);
  return writer.directory();
}

DatasetReader::DatasetReader(const fs::path& dataset_directory) : dir_(dataset_directory) {
  const fs::path manifest_path = dir_ / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("no manifest at " + manifest_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  try {
    manifest_ = manifest_from_json(j);
  } catch (const json::exception& e) {
    throw FormatError("manifest " + manifest_path.string() + " does not match the schema: " + e.what());
  }
  if (static_cast<int>(manifest_.videos.size()) != manifest_.n_videos) {
    throw FormatError("manifest lists " + std::to_string(manifest_.videos.size()) + " videos but n_videos is " +
                      std::to_string(manifest_.n_videos));
  }
  for (const auto& v : manifest_.videos) {
    if (static_cast<int>(v.frame_paths.size()) != manifest_.frames_per_video) {
      throw FormatError("video " + std::to_string(v.index) + " lists the wrong number of frames");
    }
    for (const auto& rel : v.frame_paths) {
      const fs::path p = dir_ / rel;
      if (!fs::exists(p)) throw MissingFrameError(p.string());
      const auto [w, h] = read_pgm_header(p);
      if (w != kFrameSize || h != kFrameSize) throw FormatError("frame is not 64x64: " + p.string());
    }
  }
}

Frame DatasetReader::frame(int video, int k) const {
  if (video < 0 || video >= static_cast<int>(manifest_.videos.size())) throw InvalidInput("video index out of range");
  const auto& paths = manifest_.videos[video].frame_paths;
  if (k < 0 || k >= static_cast<int>(paths.size())) throw InvalidInput("frame index out of range");
  return read_pgm(dir_ / paths[k]);
}

std::vector<Frame> DatasetReader::video_frames(int video, int count) const {
  const int n = count < 0 ? manifest_.frames_per_video : std::min(count, manifest_.frames_per_video);
  std::vector<Frame> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(frame(video, k));
  return out;
}

DatasetReader read_dataset(const fs::path& dataset_directory) { return DatasetReader(dataset_directory); }

std::uint64_t tree_checksum(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& rel : files) {
    const std::string name = rel.generic_string();
    feed(name.data(), name.size() + 1);
    std::ifstream in(dir / rel, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    feed(bytes.data(), bytes.size());
  }
  return h;
}

// ---------------------------------------------------------------------------

std::vector<Clip> extract_windows(const std::vector<Frame>& video, int m, int video_id) {
  if (m <= 0) throw InvalidInput("window needs at least one input frame");
  if (static_cast<int>(video.size()) < m + 1) {
    throw InvalidInput("video of " + std::to_string(video.size()) + " frames is too short for m = " + std::to_string(m));
  }
  std::vector<Clip> out;
  for (int start = 0; start + m < static_cast<int>(video.size()); ++start) {
    Clip c;
    c.inputs.assign(video.begin() + start, video.begin() + start + m);
    c.target = video[static_cast<std::size_t>(start + m)];
    c.video = video_id;
    c.start = start;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace physbench
