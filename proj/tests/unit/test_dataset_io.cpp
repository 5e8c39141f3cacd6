#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "physbench/baselines.hpp"
#include "physbench/dataset_io.hpp"
#include "physbench/errors.hpp"
#include "physbench/generate.hpp"

using namespace physbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("physbench_io_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

std::vector<Frame> numbered_frames(int n) {
  std::vector<Frame> v;
  for (int i = 0; i < n; ++i) v.emplace_back(64, 64, i / 255.0);
  return v;
}

}  // namespace

TEST_CASE("layout names") {
  CHECK(video_dir_name(7) == "video_7");
  CHECK(frame_relative_path(3, 12) == "video_3/frame_12.pgm");
  CHECK(dataset_dir("root", DatasetId::moon) == fs::path("root") / "moon");
}

TEST_CASE("canonical split is 80/10/10 by index") {
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const std::string s = canonical_split(i, 1000);
    counts[s == "train" ? 0 : s == "val" ? 1 : 2]++;
  }
  CHECK(counts[0] == 800);
  CHECK(counts[1] == 100);
  CHECK(counts[2] == 100);
  CHECK(canonical_split(0, 1000) == "train");
  CHECK(canonical_split(999, 1000) == "test");
}

TEST_CASE("pgm header and pixels round trip") {
  TempDir tmp("pgm");
  Frame f;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) f.at(x, y) = ((x * 7 + y * 3) % 256) / 255.0;
  const fs::path p = tmp.path / "a.pgm";
  write_pgm(p, f);
  const std::string bytes = slurp(p);
  CHECK(bytes.substr(0, 13) == "P5\n64 64\n255\n");
  CHECK(bytes.size() == 13 + 64 * 64);
  CHECK(static_cast<unsigned char>(bytes[13 + 64 * 2 + 5]) == (5 * 7 + 2 * 3) % 256);
  CHECK(read_pgm(p) == f);
  CHECK(read_pgm_header(p) == std::pair{64, 64});

  spit(tmp.path / "comment.pgm", "P5\n# made by hand\n64 64\n255\n" + bytes.substr(13));
  CHECK(read_pgm(tmp.path / "comment.pgm") == f);
}

TEST_CASE("pgm rejects other maxvals, truncation and missing files") {
  TempDir tmp("pgmbad");
  const std::string body(64 * 64 * 2, '\0');
  spit(tmp.path / "wide.pgm", "P5\n64 64\n65535\n" + body);
  CHECK_THROWS_AS(read_pgm(tmp.path / "wide.pgm"), FormatError);
  spit(tmp.path / "short.pgm", "P5\n64 64\n255\n" + std::string(100, '\0'));
  CHECK_THROWS_AS(read_pgm(tmp.path / "short.pgm"), FormatError);
  spit(tmp.path / "ascii.pgm", "P2\n64 64\n255\n0 0 0");
  CHECK_THROWS_AS(read_pgm(tmp.path / "ascii.pgm"), FormatError);
  CHECK_THROWS_AS(read_pgm(tmp.path / "nope.pgm"), MissingFrameError);
}

TEST_CASE("generated dataset round trips and is reproducible") {
  TempDir a("gen_a"), b("gen_b");
  const GenerateResult ra = generate_dataset(a.path, DatasetId::bounce2d, 100, 7, 1);
  const GenerateResult rb = generate_dataset(b.path, DatasetId::bounce2d, 100, 7, 4);

  int dirs = 0;
  for (const auto& e : fs::directory_iterator(ra.directory)) {
    if (!e.is_directory()) continue;
    ++dirs;
    int frames = 0;
    for (const auto& f : fs::directory_iterator(e.path())) frames += f.path().extension() == ".pgm";
    CHECK(frames == 60);
  }
  CHECK(dirs == 100);
  CHECK(tree_checksum(ra.directory) == tree_checksum(rb.directory));
  CHECK(slurp(ra.directory / kManifestName) == slurp(rb.directory / kManifestName));

  const DatasetReader reader(ra.directory);
  CHECK(reader.manifest() == ra.manifest);
  CHECK(reader.manifest().n_videos == 100);
  CHECK(reader.manifest().frames_per_video == 60);

  // Pixels survive the trip exactly.
  for (int v : {0, 41, 99}) {
    const GeneratedVideo g = generate_video(DatasetId::bounce2d, 7, v, 100);
    CHECK(reader.video_frames(v) == g.frames);
  }
}

TEST_CASE("manifest normalization agrees with normalize_labels") {
  TempDir tmp("norm");
  const GenerateResult r = generate_dataset(tmp.path, DatasetId::pendulum, 60, 3);
  std::vector<double> raw;
  for (const auto& v : r.manifest.videos) raw.push_back(v.labels.at(0).raw_value);
  const auto n = normalize_labels(raw);
  CHECK(std::abs(r.manifest.normalization.at("gravity_pendulum") - n.scale) <= 1e-12);
}

TEST_CASE("manifest JSON keys are sorted and schema is checked") {
  TempDir tmp("schema");
  const GenerateResult r = generate_dataset(tmp.path, DatasetId::blocks, 5, 1);
  const fs::path mp = r.directory / kManifestName;
  const auto j = nlohmann::json::parse(slurp(mp));
  CHECK(j.at("schema_version") == kSchemaVersion);
  std::string prev;
  for (const auto& [k, v] : j.items()) {
    CHECK(prev < k);
    prev = k;
  }
  auto bumped = j;
  bumped["schema_version"] = kSchemaVersion + 1;
  spit(mp, bumped.dump(2));
  CHECK_THROWS_AS(DatasetReader{r.directory}, SchemaVersionError);
  spit(mp, "{ not json");
  CHECK_THROWS_AS(DatasetReader{r.directory}, FormatError);
}

TEST_CASE("reader reports a deleted frame by path") {
  TempDir tmp("missing");
  const GenerateResult r = generate_dataset(tmp.path, DatasetId::moon, 4, 2);
  const fs::path victim = r.directory / "video_2" / "frame_17.pgm";
  fs::remove(victim);
  try {
    DatasetReader reader(r.directory);
    FAIL("expected a missing-frame error");
  } catch (const MissingFrameError& e) {
    CHECK(e.path() == victim.string());
    CHECK(std::string(e.what()).find("frame_17.pgm") != std::string::npos);
  }
}

TEST_CASE("reader rejects frames of the wrong size") {
  TempDir tmp("size");
  const GenerateResult r = generate_dataset(tmp.path, DatasetId::moon, 2, 2);
  write_pgm(r.directory / "video_1" / "frame_0.pgm", Frame(32, 32));
  CHECK_THROWS_AS(DatasetReader{r.directory}, FormatError);
}

TEST_CASE("writer refuses to overwrite unless asked") {
  TempDir tmp("overwrite");
  generate_dataset(tmp.path, DatasetId::blocks, 2, 1);
  CHECK_THROWS_AS(generate_dataset(tmp.path, DatasetId::blocks, 2, 1), IoError);
  CHECK_NOTHROW(generate_dataset(tmp.path, DatasetId::blocks, 3, 1, 1, true));
  CHECK(DatasetReader(tmp.path / "blocks").manifest().n_videos == 3);
}

TEST_CASE("write_dataset validates frame counts") {
  TempDir tmp("wd");
  DatasetManifest m;
  m.dataset = DatasetId::blocks;
  m.n_videos = 1;
  m.frames_per_video = 100;
  VideoRecord v;
  v.params = sample_params(DatasetId::blocks, 1);
  m.videos.push_back(v);
  CHECK_THROWS_AS(write_dataset(tmp.path, m, {numbered_frames(10)}), InvalidInput);
  const fs::path dir = write_dataset(tmp.path, m, {numbered_frames(100)}, true);
  const DatasetReader reader(dir);
  CHECK(reader.frame(0, 42) == Frame(64, 64, 42 / 255.0));
}

TEST_CASE("params survive JSON for every dataset") {
  for (DatasetId d : kAllDatasets) {
    const ScenarioParams p = sample_params(d, 2024);
    const ScenarioParams q = params_from_json(params_to_json(p));
    CHECK(params_to_json(q) == params_to_json(p));
    CHECK(q.seed == p.seed);
    CHECK(q.background == p.background);
    // Bit-exact parameters reproduce the same trajectory.
    const Trajectory a = simulate(p), b = simulate(q);
    CHECK(a.frames.back().bodies[0].position == b.frames.back().bodies[0].position);
  }
}

TEST_CASE("extract_windows") {
  const auto video = numbered_frames(60);
  CHECK(extract_windows(video, 5).size() == 55);
  CHECK(extract_windows(video, 59).size() == 1);
  CHECK_THROWS_AS(extract_windows(video, 60), InvalidInput);
  CHECK_THROWS_AS(extract_windows(video, 0), InvalidInput);

  const auto clips = extract_windows(video, 5, 9);
  std::set<int> targets;
  for (const auto& c : clips) {
    CHECK(c.video == 9);
    REQUIRE(c.inputs.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(c.inputs[i] == video[c.start + i]);
    CHECK(c.target == video[c.start + 5]);
    targets.insert(static_cast<int>(std::lround(c.target.at(0, 0) * 255)));
  }
  CHECK(targets.size() == 55);
  CHECK(*targets.begin() == 5);
  CHECK(*targets.rbegin() == 59);
}
