#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "physbench/dataset_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("physbench_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string("'") + PHYSBENCH_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_constant_frames(const fs::path& dir, int count, double value) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    physbench::write_pgm(dir / ("frame_" + std::to_string(i) + ".pgm"), physbench::Frame(64, 64, value));
  }
}

}  // namespace

TEST_CASE("generate writes the requested videos and is reproducible") {
  const fs::path a = workdir() / "gen_a", b = workdir() / "gen_b";
  const Run r1 = run("generate --dataset bounce2d --videos 100 --seed 7 --root '" + a.string() + "'");
  REQUIRE(r1.status == 0);
  const json j1 = json::parse(r1.out);
  CHECK(j1.at("n_videos") == 100);
  CHECK(j1.at("frames_per_video") == 60);
  CHECK(j1.at("label_histogram").contains("bounces_2d"));
  CHECK(j1.at("label_histogram").contains("gravity_2d"));
  int dirs = 0;
  for (const auto& e : fs::directory_iterator(a / "bounce2d")) {
    if (!e.is_directory()) continue;
    ++dirs;
    int frames = 0;
    for (const auto& f : fs::directory_iterator(e.path())) frames += f.path().extension() == ".pgm";
    CHECK(frames == 60);
  }
  CHECK(dirs == 100);

  const Run r2 = run("generate --dataset bounce2d --videos 100 --seed 7 --jobs 3 --root '" + b.string() + "'");
  REQUIRE(r2.status == 0);
  CHECK(json::parse(r2.out).at("checksum") == j1.at("checksum"));
  CHECK(physbench::tree_checksum(a / "bounce2d") == physbench::tree_checksum(b / "bounce2d"));

  // Existing output is not clobbered without --overwrite.
  CHECK(run("generate --dataset bounce2d --videos 100 --seed 7 --root '" + a.string() + "'").status == 1);
  CHECK(run("generate --dataset bounce2d --videos 3 --seed 7 --overwrite --root '" + a.string() + "'").status == 0);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run("generate --dataset bounce4d --videos 3").status == 2);
  CHECK(run("generate --videos 3").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("baseline --dataset blocks --task gravity_2d --root '" + workdir().string() + "'").status == 2);
  CHECK(run("--help").status == 0);
}

TEST_CASE("baseline reports both lower bounds") {
  const fs::path root = workdir() / "base";
  REQUIRE(run("generate --dataset blocks --videos 40 --seed 3 --root '" + root.string() + "'").status == 0);
  const fs::path report = workdir() / "blocks_report.json";
  const Run r = run("baseline --dataset blocks --task mass_diff_blocks --epochs 50 --root '" + root.string() +
                    "' --out '" + report.string() + "'");
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const json j = json::parse(slurp(report));
  const json& t = j.at("tasks").at("mass_diff_blocks");
  CHECK(t.at("input_frames") == 49);
  CHECK(t.at("optimal_constant").at("loss").get<double>() >= 0.0);
  CHECK(t.at("image_linear").at("loss").get<double>() >= 0.0);
  CHECK(r.err.find("mass_diff_blocks") != std::string::npos);
}

TEST_CASE("optimal constant is no worse than predicting zero on gravity tasks") {
  const fs::path root = workdir() / "grav";
  for (const char* d : {"bounce2d", "roller", "pendulum"}) {
    REQUIRE(run(std::string("generate --dataset ") + d + " --videos 40 --seed 11 --root '" + root.string() + "'").status == 0);
  }
  for (const auto& [d, task] : {std::pair{"bounce2d", "gravity_2d"}, std::pair{"roller", "gravity_roller"},
                                std::pair{"pendulum", "gravity_pendulum"}}) {
    const Run r = run(std::string("baseline --dataset ") + d + " --task " + task + " --epochs 20 --root '" +
                      root.string() + "'");
    REQUIRE(r.status == 0);
    const json t = json::parse(r.out).at("tasks").at(task);
    CHECK(t.at("optimal_constant").at("train_loss").get<double>() <=
          t.at("zero_prediction_train_loss").get<double>() + 1e-12);
  }
}

TEST_CASE("baseline on a missing dataset names the path") {
  const Run r = run("baseline --dataset moon --root '" + (workdir() / "nowhere").string() + "'");
  CHECK(r.status == 1);
  CHECK(r.err.find("nowhere") != std::string::npos);
}

TEST_CASE("score identity and maximal error") {
  const fs::path ones = workdir() / "ones", zeros = workdir() / "zeros";
  write_constant_frames(ones / "clip_0", 3, 1.0);
  write_constant_frames(zeros / "clip_0", 3, 0.0);

  const Run same = run("score --pred '" + ones.string() + "' --truth '" + ones.string() + "'");
  REQUIRE(same.status == 0);
  const json js = json::parse(same.out);
  CHECK(js.at("aggregate").at("ssim") == 1.0);
  CHECK(js.at("aggregate").at("l1") == 0.0);
  CHECK(js.at("aggregate").at("psnr") == "inf");

  const Run worst = run("score --pred '" + zeros.string() + "' --truth '" + ones.string() + "'");
  REQUIRE(worst.status == 0);
  CHECK(json::parse(worst.out).at("aggregate").at("psnr") == 0.0);
  CHECK(json::parse(worst.out).at("clips").size() == 3);
}

TEST_CASE("score rollout reports every frame") {
  const fs::path pred = workdir() / "roll_pred", truth = workdir() / "roll_truth";
  for (int v = 0; v < 2; ++v) {
    write_constant_frames(pred / ("video_" + std::to_string(v)), 20, 0.25);
    write_constant_frames(truth / ("video_" + std::to_string(v)), 20, 0.5);
  }
  const Run r = run("score --rollout --pred '" + pred.string() + "' --truth '" + truth.string() + "'");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.at("sequences").size() == 2);
  for (const auto& s : j.at("sequences")) {
    CHECK(s.at("psnr_per_frame").size() == 20);
    CHECK(s.at("ssim_per_frame").size() == 20);
    CHECK(s.at("l1_per_frame").size() == 20);
  }
  CHECK(j.at("aggregate").at("l1").get<double>() == doctest::Approx(64.0 / 255).epsilon(1e-12));
}

TEST_CASE("score rejects misaligned inputs") {
  const fs::path pred = workdir() / "mis_pred", truth = workdir() / "mis_truth";
  write_constant_frames(pred, 4, 0.0);
  write_constant_frames(truth, 5, 0.0);
  const Run r = run("score --pred '" + pred.string() + "' --truth '" + truth.string() + "'");
  CHECK(r.status == 1);
  CHECK(r.err.find("misaligned") != std::string::npos);
}

TEST_CASE("cleanup") { fs::remove_all(workdir()); }
