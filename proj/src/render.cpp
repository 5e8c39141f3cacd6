#include "physbench/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "physbench/errors.hpp"

namespace physbench {

Frame::Frame(int width, int height, double fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
  if (width <= 0 || height <= 0) throw InvalidInput("frame dimensions must be positive");
}

std::uint8_t to_byte(double value) {
  const double clamped = std::clamp(value, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

double quantize(double value) { return to_byte(value) / 255.0; }

Vec3 default_light_direction() { return Vec3{0.3, 1.0, 0.6}.normalized(); }

// ---------------------------------------------------------------------------
// 2D coverage rasterizer
// ---------------------------------------------------------------------------
//
// Each pixel holds kSupersample x kSupersample sample points at sub-cell centers.
// For every sub-row the covered x-interval of each (convex) shape is computed in
// closed form and converted to a run of sample columns, so coverage is exact for
// that sample pattern without testing samples one by one.

namespace {

struct Span {
  double lo = 0.0;
  double hi = -1.0;
  bool empty() const { return hi < lo; }
  void include(double x) {
    if (empty()) {
      lo = hi = x;
    } else {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
};

Span circle_span(double cx, double cy, double r, double y) {
  const double dy = y - cy;
  const double q = r * r - dy * dy;
  if (q < 0.0) return {};
  const double half = std::sqrt(q);
  return {cx - half, cx + half};
}

// Extreme points of a horizontal line through a capsule lie on its boundary, which is
// covered by the two cap circles and the two straight sides.
Span capsule_span(const Vec3& a, const Vec3& b, double r, double y) {
  Span out;
  for (const Vec3& c : {a, b}) {
    const Span s = circle_span(c.x, c.y, r, y);
    if (!s.empty()) {
      out.include(s.lo);
      out.include(s.hi);
    }
  }
  const Vec3 d = b - a;
  const double len = std::hypot(d.x, d.y);
  if (len == 0.0 || d.y == 0.0) {
    if (len > 0.0 && std::abs(y - a.y) <= r) {
      out.include(std::min(a.x, b.x));
      out.include(std::max(a.x, b.x));
    }
    return out;
  }
  const Vec3 n{-d.y / len * r, d.x / len * r, 0.0};
  for (double sign : {-1.0, 1.0}) {
    const Vec3 e0 = a + n * sign;
    const double t = (y - e0.y) / d.y;
    if (t >= 0.0 && t <= 1.0) out.include(e0.x + t * d.x);
  }
  return out;
}

struct PreparedShape {
  int kind = 0;  // 0 circle, 1 capsule, 2 rect
  Vec3 a, b;
  double r = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double intensity = 0.0;

  Span span(double y) const {
    switch (kind) {
      case 0: return circle_span(a.x, a.y, r, y);
      case 1: return capsule_span(a, b, r, y);
      default: return (y >= a.y && y <= b.y) ? Span{a.x, b.x} : Span{};
    }
  }
};

PreparedShape prepare(const SceneObject& obj, double scale) {
  PreparedShape p;
  p.intensity = obj.intensity;
  if (const auto* c = std::get_if<Circle>(&obj.shape)) {
    p.kind = 0;
    p.a = c->center * scale;
    p.r = c->radius * scale;
    p.y_min = p.a.y - p.r;
    p.y_max = p.a.y + p.r;
  } else if (const auto* k = std::get_if<Capsule>(&obj.shape)) {
    p.kind = 1;
    p.a = k->a * scale;
    p.b = k->b * scale;
    p.r = k->radius * scale;
    p.y_min = std::min(p.a.y, p.b.y) - p.r;
    p.y_max = std::max(p.a.y, p.b.y) + p.r;
  } else if (const auto* rc = std::get_if<Rect>(&obj.shape)) {
    p.kind = 2;
    p.a = Vec3{std::min(rc->x0, rc->x1), std::min(rc->y0, rc->y1), 0.0} * scale;
    p.b = Vec3{std::max(rc->x0, rc->x1), std::max(rc->y0, rc->y1), 0.0} * scale;
    p.y_min = p.a.y;
    p.y_max = p.b.y;
  } else {
    throw InvalidInput("rasterize_2d cannot draw spheres");
  }
  return p;
}

}  // namespace

Frame rasterize_2d(const SceneFrame& scene) {
  constexpr int W = kFrameSize;
  constexpr int H = kFrameSize;
  constexpr int S = kSupersample;
  constexpr int kCols = W * S;

  std::vector<PreparedShape> shapes;
  shapes.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) shapes.push_back(prepare(obj, static_cast<double>(W)));

  std::vector<double> excess(static_cast<std::size_t>(W) * H, 0.0);
  std::vector<int> owner(kCols, 0);

  for (int row = 0; row < H * S; ++row) {
    const double y = (row + 0.5) / S;
    int lo = kCols;
    int hi = -1;
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      const PreparedShape& shape = shapes[k];
      if (y < shape.y_min || y > shape.y_max) continue;
      const Span s = shape.span(y);
      if (s.empty()) continue;
      // Sample column c sits at x = (c + 0.5) / S.
      const int c0 = std::max(0, static_cast<int>(std::ceil(s.lo * S - 0.5)));
      const int c1 = std::min(kCols - 1, static_cast<int>(std::floor(s.hi * S - 0.5)));
      if (c0 > c1) continue;
      std::fill(owner.begin() + c0, owner.begin() + c1 + 1, static_cast<int>(k) + 1);
      lo = std::min(lo, c0);
      hi = std::max(hi, c1);
    }
    double* out_row = excess.data() + static_cast<std::size_t>(row / S) * W;
    for (int c = lo; c <= hi; ++c) {
      if (owner[c] == 0) continue;
      out_row[c / S] += shapes[owner[c] - 1].intensity - scene.background;
      owner[c] = 0;
    }
  }

  Frame frame(W, H);
  auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = quantize(scene.background + excess[i] / (S * S));
  }
  return frame;
}

// ---------------------------------------------------------------------------
// 3D ray caster
// ---------------------------------------------------------------------------

namespace {

constexpr double kAmbient = 0.2;
constexpr double kDiffuse = 0.8;
constexpr double kCameraDistance = 1.5;  // from the open front face at z = 1
constexpr double kEps = 1e-9;
const double kTanHalfFov = 0.5 / (0.9 * kCameraDistance);

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal;
  double albedo = 0.0;
};

double ray_sphere(const Vec3& origin, const Vec3& dir, const Sphere& s) {
  const Vec3 oc = origin - s.center;
  const double b = oc.dot(dir);
  const double c = oc.norm2() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t > kEps) return t;
  t = -b + root;
  return t > kEps ? t : std::numeric_limits<double>::infinity();
}

// Walls of the open-front unit box: x = 0, x = 1, y = 0, y = 1, z = 0.
void intersect_walls(const Vec3& origin, const Vec3& dir, double albedo, Hit& best) {
  struct Plane {
    int axis;
    double value;
    double normal_sign;
  };
  static constexpr Plane kPlanes[] = {{0, 0.0, 1.0}, {0, 1.0, -1.0}, {1, 0.0, 1.0}, {1, 1.0, -1.0}, {2, 0.0, 1.0}};
  for (const auto& p : kPlanes) {
    if (dir[p.axis] == 0.0) continue;
    const double t = (p.value - origin[p.axis]) / dir[p.axis];
    if (t <= kEps || t >= best.t) continue;
    const Vec3 q = origin + dir * t;
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      if (a == p.axis) continue;
      if (q[a] < -kEps || q[a] > 1.0 + kEps) inside = false;
    }
    if (!inside) continue;
    Vec3 n;
    n[p.axis] = p.normal_sign;
    best = {t, n, albedo};
  }
}

}  // namespace

Frame render_3d(const SceneFrame& scene) {
  constexpr int W = kFrameSize;
  constexpr int H = kFrameSize;
  std::vector<std::pair<Sphere, double>> spheres;
  for (const auto& obj : scene.objects) {
    const auto* s = std::get_if<Sphere>(&obj.shape);
    if (!s) throw InvalidInput("render_3d draws spheres only");
    spheres.emplace_back(*s, obj.intensity);
  }
  const Vec3 light = scene.light_direction.value_or(default_light_direction()).normalized();
  const Vec3 eye{0.5, 0.5, 1.0 + kCameraDistance};

  Frame frame(W, H);
  for (int py = 0; py < H; ++py) {
    for (int px = 0; px < W; ++px) {
      const double u = ((px + 0.5) / (W / 2.0) - 1.0) * kTanHalfFov;
      const double v = (1.0 - (py + 0.5) / (H / 2.0)) * kTanHalfFov;
      const Vec3 dir = Vec3{u, v, -1.0}.normalized();

      Hit hit;
      intersect_walls(eye, dir, scene.background, hit);
      for (const auto& [sphere, albedo] : spheres) {
        const double t = ray_sphere(eye, dir, sphere);
        if (t < hit.t) hit = {t, (eye + dir * t - sphere.center) / sphere.radius, albedo};
      }
      if (!std::isfinite(hit.t)) {
        frame.at(px, py) = 0.0;
        continue;
      }
      const Vec3 point = eye + dir * hit.t;
      double lambert = std::max(0.0, hit.normal.dot(light));
      if (lambert > 0.0) {
        const Vec3 origin = point + hit.normal * 1e-7;
        for (const auto& [sphere, albedo] : spheres) {
          if (std::isfinite(ray_sphere(origin, light, sphere))) {
            lambert = 0.0;
            break;
          }
        }
      }
      frame.at(px, py) = quantize(hit.albedo * (kAmbient + kDiffuse * lambert));
    }
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Scenario scenes
// ---------------------------------------------------------------------------

namespace {

constexpr double kPixel = 1.0 / kFrameSize;
constexpr int kTrackSegments = 64;

void require_bodies(const WorldState& state, std::size_t n) {
  if (state.bodies.size() != n) throw InvalidInput("trajectory body count does not match scenario parameters");
}

}  // namespace

SceneFrame scene_for(const ScenarioParams& params, const WorldState& state) {
  SceneFrame scene;
  scene.background = params.background;
  switch (params.dataset) {
    case DatasetId::bounce2d: {
      const auto& b = std::get<Bounce2dParams>(params.constants);
      require_bodies(state, b.balls.size());
      for (std::size_t i = 0; i < b.balls.size(); ++i) {
        scene.objects.push_back({Circle{state.bodies[i].position, b.balls[i].radius}, b.balls[i].intensity});
      }
      break;
    }
    case DatasetId::bounce3d: {
      const auto& b = std::get<Bounce3dParams>(params.constants);
      require_bodies(state, b.balls.size());
      for (std::size_t i = 0; i < b.balls.size(); ++i) {
        scene.objects.push_back({Sphere{state.bodies[i].position, b.balls[i].radius}, b.balls[i].intensity});
      }
      scene.light_direction = default_light_direction();
      break;
    }
    case DatasetId::pendulum: {
      const auto& p = std::get<PendulumParams>(params.constants);
      require_bodies(state, 1);
      const Vec3 pivot{0.5, 0.5, 0.0};
      scene.objects.push_back({Capsule{pivot, state.bodies[0].position, 0.75 * kPixel}, p.bob_intensity});
      scene.objects.push_back({Circle{state.bodies[0].position, p.bob_radius()}, p.bob_intensity});
      break;
    }
    case DatasetId::blocks: {
      const auto& b = std::get<BlocksParams>(params.constants);
      require_bodies(state, 2);
      scene.objects.push_back({Rect{0.0, kBlockFloorY, 1.0, kBlockFloorY + kPixel}, 0.3});
      const double widths[2] = {b.width1(), b.width2()};
      const double intensities[2] = {b.intensity1, b.intensity2};
      for (int i = 0; i < 2; ++i) {
        const double x = state.bodies[i].position.x;
        scene.objects.push_back(
            {Rect{x - 0.5 * widths[i], kBlockFloorY - widths[i], x + 0.5 * widths[i], kBlockFloorY},
             intensities[i]});
      }
      break;
    }
    case DatasetId::roller: {
      const auto& r = std::get<RollerParams>(params.constants);
      require_bodies(state, 1);
      for (int k = 0; k < kTrackSegments; ++k) {
        const double x0 = static_cast<double>(k) / kTrackSegments;
        const double x1 = static_cast<double>(k + 1) / kTrackSegments;
        scene.objects.push_back({Capsule{{x0, 1.0 - r.height(x0), 0.0}, {x1, 1.0 - r.height(x1), 0.0}, 0.5 * kPixel},
                                 r.track_intensity});
      }
      scene.objects.push_back({Circle{state.bodies[0].position, r.ball_radius}, r.ball_intensity});
      break;
    }
    case DatasetId::moon: {
      const auto& m = std::get<MoonParams>(params.constants);
      require_bodies(state, 1);
      scene.objects.push_back({Circle{{0.5, 0.5, 0.0}, m.moon_radius}, m.moon_intensity});
      scene.objects.push_back({Circle{state.bodies[0].position, m.asteroid_radius}, m.asteroid_intensity});
      break;
    }
  }
  return scene;
}

std::vector<Frame> render_trajectory(const Trajectory& traj, const ScenarioParams& params) {
  if (traj.dataset != params.dataset) throw InvalidInput("trajectory and parameters come from different scenarios");
  if (static_cast<int>(traj.frames.size()) != frames_per_video(params.dataset)) {
    throw InvalidInput("trajectory frame count does not match the dataset");
  }
  std::vector<Frame> out;
  out.reserve(traj.frames.size());
  for (const auto& state : traj.frames) {
    const SceneFrame scene = scene_for(params, state);
    out.push_back(params.dataset == DatasetId::bounce3d ? render_3d(scene) : rasterize_2d(scene));
  }
  return out;
}

}  // namespace physbench
