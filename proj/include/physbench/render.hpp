#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "physbench/scenarios.hpp"
#include "physbench/vec.hpp"

namespace physbench {

inline constexpr int kFrameSize = 64;
/// Sub-samples per pixel along each axis for 2D coverage.
inline constexpr int kSupersample = 16;

/// Grayscale image, row-major, values in [0, 1].
class Frame {
 public:
  Frame() : Frame(kFrameSize, kFrameSize) {}
  Frame(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool operator==(const Frame&) const = default;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

/// Rounds to the nearest 1/255 step, halves away from zero.
std::uint8_t to_byte(double value);
double quantize(double value);

// 2D shapes live in scene units on the unit square; (0,0) is the top-left image corner.
struct Circle {
  Vec3 center;
  double radius = 0.0;
};
/// Segment with round caps; `radius` is half the stroke width.
struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};
/// 3D sphere inside the unit room, y up.
struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

struct SceneObject {
  std::variant<Circle, Capsule, Rect, Sphere> shape;
  double intensity = 1.0;
};

struct SceneFrame {
  std::vector<SceneObject> objects;  // later objects are drawn over earlier ones
  double background = 0.0;
  std::optional<Vec3> light_direction;  // 3D only; points toward the light
};

/// Direction toward the light used for the 3D bouncing dataset.
Vec3 default_light_direction();

/// Anti-aliased 2D rasterization with exact 16x16 sub-sample coverage per pixel.
Frame rasterize_2d(const SceneFrame& scene);

/// Ray-cast 3D render: spheres inside an open-front box room, Lambertian shading with
/// an ambient floor and hard sphere shadows.
Frame render_3d(const SceneFrame& scene);

SceneFrame scene_for(const ScenarioParams& params, const WorldState& state);
std::vector<Frame> render_trajectory(const Trajectory& traj, const ScenarioParams& params);

}  // namespace physbench
