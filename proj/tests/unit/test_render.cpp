#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "physbench/numerics.hpp"
#include "physbench/render.hpp"
#include "supersample.hpp"

using namespace physbench;

namespace {

double max_deviation(const Frame& f, const std::vector<double>& oracle_pixels) {
  double worst = 0.0;
  for (std::size_t i = 0; i < oracle_pixels.size(); ++i) {
    worst = std::max(worst, std::abs(f.pixels()[i] - oracle_pixels[i]));
  }
  return worst;
}

SceneFrame random_scene(Sampler& s, int kind) {
  SceneFrame scene;
  scene.background = s.uniform();
  const int n = 1 + static_cast<int>(s.index(3));
  for (int i = 0; i < n; ++i) {
    SceneObject obj;
    obj.intensity = s.uniform();
    const Vec3 c{s.uniform(-0.1, 1.1), s.uniform(-0.1, 1.1), 0.0};
    if (kind == 0) {
      obj.shape = Circle{c, s.uniform(0.005, 0.35)};
    } else if (kind == 1) {
      obj.shape = Capsule{c, {s.uniform(-0.1, 1.1), s.uniform(-0.1, 1.1), 0.0}, s.uniform(0.002, 0.1)};
    } else {
      const double x1 = c.x + s.uniform(0.0, 0.5), y1 = c.y + s.uniform(0.0, 0.5);
      obj.shape = Rect{c.x, c.y, x1, y1};
    }
    scene.objects.push_back(obj);
  }
  return scene;
}

SceneFrame spheres(std::vector<std::pair<Sphere, double>> list, std::optional<Vec3> light = std::nullopt) {
  SceneFrame scene;
  scene.background = 0.7;
  for (auto& [s, a] : list) scene.objects.push_back({s, a});
  scene.light_direction = light;
  return scene;
}

// Scene-space x (or y) on the plane z = depth that projects to the center of pixel `p`.
double project_to_pixel(int p, double depth, bool vertical) {
  const double tan_half = 0.5 / (0.9 * 1.5);
  const double ndc = (p + 0.5) / 32.0 - 1.0;
  const double distance = 2.5 - depth;
  return 0.5 + (vertical ? -ndc : ndc) * tan_half * distance;
}

}  // namespace

TEST_CASE("byte quantization rounds half away from zero") {
  CHECK(to_byte(0.0) == 0);
  CHECK(to_byte(1.0) == 255);
  CHECK(to_byte(0.5) == 128);
  CHECK(to_byte(-0.2) == 0);
  CHECK(to_byte(1.7) == 255);
  CHECK(quantize(0.5) == 128.0 / 255.0);
}

TEST_CASE("empty and fully covered scenes") {
  SceneFrame empty;
  empty.background = 0.5;
  const Frame a = rasterize_2d(empty);
  for (double p : a.pixels()) CHECK(p == quantize(0.5));

  SceneFrame full;
  full.objects.push_back({Circle{{0.5, 0.5, 0.0}, 0.75}, 1.0});
  const Frame b = rasterize_2d(full);
  for (double p : b.pixels()) CHECK(p == 1.0);
}

TEST_CASE("viewport maps scene corners onto pixel corners") {
  SceneFrame scene;
  scene.objects.push_back({Rect{0.0, 0.0, 1.0 / 64, 1.0 / 64}, 1.0});
  scene.objects.push_back({Rect{63.0 / 64, 63.0 / 64, 1.0, 1.0}, 1.0});
  const Frame f = rasterize_2d(scene);
  double total = 0.0;
  for (double p : f.pixels()) total += p;
  CHECK(f.at(0, 0) == 1.0);
  CHECK(f.at(63, 63) == 1.0);
  CHECK(total == 2.0);

  SceneFrame half;
  half.objects.push_back({Rect{10.0 / 64, 5.0 / 64, 10.5 / 64, 6.0 / 64}, 1.0});
  CHECK(rasterize_2d(half).at(10, 5) == quantize(0.5));
}

TEST_CASE("half-covered pixel lands on the midpoint intensity") {
  // A huge circle whose edge passes vertically through the center of pixel (20, 20).
  SceneFrame scene;
  scene.background = 0.2;
  scene.objects.push_back({Circle{{20.5 / 64 + 10.0, 20.5 / 64, 0.0}, 10.0}, 0.8});
  const Frame f = rasterize_2d(scene);
  const auto oracle_pixels = oracle::supersample(scene);
  CHECK(std::abs(f.at(20, 20) - oracle_pixels[20 * 64 + 20]) <= 1.0 / 255);
  CHECK(std::abs(f.at(20, 20) - 0.5) <= 1.0 / 255);
}

TEST_CASE("rasterizer matches the supersampling oracle on random circles") {
  Sampler s(2718);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const SceneFrame scene = random_scene(s, 0);
    worst = std::max(worst, max_deviation(rasterize_2d(scene), oracle::supersample(scene)));
  }
  CHECK(worst <= 2.0 / 255);
}

TEST_CASE("rasterizer matches the supersampling oracle on capsules and rectangles") {
  Sampler s(31415);
  for (int kind : {1, 2}) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const SceneFrame scene = random_scene(s, kind);
      worst = std::max(worst, max_deviation(rasterize_2d(scene), oracle::supersample(scene)));
    }
    CHECK(worst <= 2.0 / 255);
  }
}

TEST_CASE("later objects are drawn over earlier ones") {
  SceneFrame scene;
  scene.objects.push_back({Circle{{0.5, 0.5, 0.0}, 0.3}, 0.2});
  scene.objects.push_back({Circle{{0.5, 0.5, 0.0}, 0.1}, 0.9});
  const Frame f = rasterize_2d(scene);
  CHECK(f.at(32, 32) == quantize(0.9));
  CHECK(f.at(32, 45) == quantize(0.2));
}

TEST_CASE("empty room renders deterministically") {
  const SceneFrame scene = spheres({});
  const Frame a = render_3d(scene);
  const Frame b = render_3d(scene);
  CHECK(a == b);
  double total = 0.0;
  for (double p : a.pixels()) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    total += p;
  }
  CHECK(total > 0.0);
}

TEST_CASE("nearer sphere occludes the farther one") {
  const Sphere front{{0.5, 0.5, 0.7}, 0.1};
  const Sphere back{{0.5, 0.5, 0.3}, 0.2};
  const Frame both = render_3d(spheres({{front, 1.0}, {back, 0.3}}));
  const Frame front_only = render_3d(spheres({{front, 1.0}}));
  const Frame back_only = render_3d(spheres({{back, 0.3}}));
  CHECK(both.at(32, 32) == front_only.at(32, 32));
  CHECK(both.at(32, 32) != back_only.at(32, 32));
  // Listing order does not matter.
  CHECK(render_3d(spheres({{back, 0.3}, {front, 1.0}})) == both);
}

TEST_CASE("sphere casts a shadow on the floor") {
  const Vec3 up{0.0, 1.0, 0.0};
  const Sphere blocker{{0.5, 0.3, 0.5}, 0.1};
  const Frame lit = render_3d(spheres({}, up));
  const Frame shadowed = render_3d(spheres({{blocker, 1.0}}, up));
  // Light from the camera side puts no shadow there, so the patch is floor in every variant.
  const Frame frontal = render_3d(spheres({{blocker, 1.0}}, Vec3{0.0, 0.0, 1.0}));
  const Frame frontal_empty = render_3d(spheres({}, Vec3{0.0, 0.0, 1.0}));
  double lit_sum = 0.0, shadow_sum = 0.0;
  for (int y = 52; y <= 54; ++y) {
    for (int x = 30; x <= 33; ++x) {
      REQUIRE(frontal.at(x, y) == frontal_empty.at(x, y));
      lit_sum += lit.at(x, y);
      shadow_sum += shadowed.at(x, y);
    }
  }
  CHECK(shadow_sum < lit_sum);
}

TEST_CASE("Lambertian peak sits at the sphere center pixel") {
  // Light arriving along the camera-to-center line; the camera looks from (0.5, 0.5, 2.5).
  const double depth = 0.5;
  for (auto [px, py] : {std::pair{32, 40}, std::pair{20, 25}, std::pair{31, 31}}) {
    const Vec3 center{project_to_pixel(px, depth, false), project_to_pixel(py, depth, true), depth};
    const Sphere s{center, 0.2};
    const Vec3 light = (Vec3{0.5, 0.5, 2.5} - center).normalized();
    const Frame f = render_3d(spheres({{s, 1.0}}, light));
    const Frame room = render_3d(spheres({}, light));
    double peak = 0.0;
    int sphere_pixels = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (f.at(x, y) == room.at(x, y)) continue;
        ++sphere_pixels;
        peak = std::max(peak, f.at(x, y));
      }
    }
    CHECK(sphere_pixels > 50);
    CHECK(f.at(px, py) == peak);
  }
}

TEST_CASE("render_trajectory produces one frame per state") {
  const ScenarioParams p = sample_params(DatasetId::bounce2d, 9);
  const Trajectory t = simulate(p);
  const auto frames = render_trajectory(t, p);
  CHECK(frames.size() == 60);
  CHECK(render_trajectory(t, p) == frames);
  for (double v : frames[0].pixels()) CHECK(std::round(v * 255.0) == doctest::Approx(v * 255.0).epsilon(1e-12));

  const ScenarioParams q = sample_params(DatasetId::bounce3d, 9);
  CHECK(render_trajectory(simulate(q), q).size() == 100);

  ScenarioParams still = sample_params(DatasetId::pendulum, 4);
  std::get<PendulumParams>(still.constants).gravity = 0.0;
  const auto pf = render_trajectory(simulate(still), still);
  REQUIRE(pf.size() == 100);
  for (const auto& f : pf) CHECK(f == pf.front());

  CHECK_THROWS_AS(render_trajectory(t, q), InvalidInput);
}

TEST_CASE("every dataset renders inside [0, 1]") {
  for (DatasetId d : kAllDatasets) {
    const ScenarioParams p = sample_params(d, 123);
    for (const auto& f : render_trajectory(simulate(p), p)) {
      for (double v : f.pixels()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}
