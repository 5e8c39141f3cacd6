// Bouncing balls in the unit square / unit cube.
//
// Each frame is split into explicit Euler substeps: positions drift with the
// substep's starting velocity, then gravity kicks the velocity. Contacts inside a
// drift are resolved exactly at their time of impact, so no ball is ever moved
// through a wall or another ball and elastic collisions conserve energy to
// rounding.

#include <cmath>
#include <limits>

#include "physbench/errors.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

namespace {

constexpr int kMaxContactsPerSubstep = 256;
constexpr double kOverlapTolerance = 1e-9;

struct Body {
  Vec3 p;
  Vec3 v;
  double r;
  double m;
};

struct Contact {
  double t = std::numeric_limits<double>::infinity();
  bool is_wall = false;
  int i = -1;
  int j = -1;  // second ball, or wall index
};

template <int Dims>
Contact earliest_contact(const std::vector<Body>& bodies, double horizon) {
  Contact best;
  const int n = static_cast<int>(bodies.size());
  for (int i = 0; i < n; ++i) {
    const Body& b = bodies[i];
    for (int a = 0; a < Dims; ++a) {
      double t = std::numeric_limits<double>::infinity();
      int side = 0;
      if (b.v[a] < 0.0) {
        t = std::max(0.0, (b.p[a] - b.r) / -b.v[a]);
        side = 0;
      } else if (b.v[a] > 0.0) {
        t = std::max(0.0, (1.0 - b.r - b.p[a]) / b.v[a]);
        side = 1;
      }
      if (t <= horizon && t < best.t) best = {t, true, i, wall_index(a, side)};
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec3 dp = bodies[j].p - bodies[i].p;
      const Vec3 dv = bodies[j].v - bodies[i].v;
      const double approach = dp.dot(dv);
      if (approach >= 0.0) continue;
      const double rsum = bodies[i].r + bodies[j].r;
      const double c = dp.norm2() - rsum * rsum;
      double t = 0.0;
      if (c > 0.0) {
        const double a = dv.norm2();
        const double disc = approach * approach - a * c;
        if (disc < 0.0) continue;
        // Smaller root of a t^2 + 2 approach t + c, in cancellation-free form.
        t = c / (-approach + std::sqrt(disc));
      }
      if (t <= horizon && t < best.t) best = {t, false, i, j};
    }
  }
  return best;
}

void drift(std::vector<Body>& bodies, double dt) {
  for (auto& b : bodies) b.p += b.v * dt;
}

template <int Dims>
void resolve(std::vector<Body>& bodies, const Contact& c) {
  if (c.is_wall) {
    Body& b = bodies[c.i];
    const int axis = c.j / 2;
    const int side = c.j % 2;
    b.p[axis] = side == 0 ? b.r : 1.0 - b.r;
    b.v[axis] = -b.v[axis];
    return;
  }
  Body& a = bodies[c.i];
  Body& b = bodies[c.j];
  const Vec3 n = (b.p - a.p).normalized();
  const double vn = (b.v - a.v).dot(n);
  const double total = a.m + b.m;
  a.v += n * (2.0 * b.m / total * vn);
  b.v -= n * (2.0 * a.m / total * vn);
}

template <int Dims>
void check_separation(const std::vector<Body>& bodies) {
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    for (int a = 0; a < Dims; ++a) {
      if (bodies[i].p[a] < bodies[i].r - kOverlapTolerance ||
          bodies[i].p[a] > 1.0 - bodies[i].r + kOverlapTolerance) {
        throw SimulationFailure("ball left the domain");
      }
    }
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      const double gap = (bodies[j].p - bodies[i].p).norm() - bodies[i].r - bodies[j].r;
      if (gap < -kOverlapTolerance) throw SimulationFailure("unresolved interpenetration");
    }
  }
}

template <int Dims>
Trajectory simulate_balls(DatasetId dataset, const std::vector<Ball>& balls, Vec3 gravity) {
  std::vector<Body> bodies;
  for (const auto& b : balls) {
    const double mass = Dims == 2 ? b.radius * b.radius : b.radius * b.radius * b.radius;
    bodies.push_back({b.position, b.velocity, b.radius, mass});
  }
  check_separation<Dims>(bodies);

  auto snapshot = [&] {
    WorldState w;
    for (const auto& b : bodies) w.bodies.push_back({b.p, b.v});
    return w;
  };

  Trajectory traj;
  traj.dataset = dataset;
  const int frames = frames_per_video(dataset);
  traj.frames.reserve(static_cast<std::size_t>(frames));
  traj.frames.push_back(snapshot());

  const double h = 1.0 / kBounceSubsteps;
  for (int frame = 1; frame < frames; ++frame) {
    for (int step = 0; step < kBounceSubsteps; ++step) {
      double elapsed = 0.0;
      int contacts = 0;
      for (;;) {
        const double remaining = h - elapsed;
        const Contact c = earliest_contact<Dims>(bodies, remaining);
        if (c.i < 0) {
          drift(bodies, remaining);
          break;
        }
        if (++contacts > kMaxContactsPerSubstep) throw SimulationFailure("contact cascade did not settle");
        drift(bodies, c.t);
        elapsed += c.t;
        resolve<Dims>(bodies, c);
        const double time = (frame - 1) + (step * h + elapsed);
        traj.events.push_back({static_cast<int>(std::ceil(time)), time,
                               c.is_wall ? EventKind::ball_wall : EventKind::ball_ball, c.i, c.j});
      }
      for (auto& b : bodies) b.v += gravity * h;
    }
    check_separation<Dims>(bodies);
    traj.frames.push_back(snapshot());
  }
  return traj;
}

}  // namespace

Trajectory simulate_bounce2d(const ScenarioParams& params) {
  if (params.dataset != DatasetId::bounce2d) throw InvalidInput("simulate_bounce2d needs bounce2d params");
  const auto& b = std::get<Bounce2dParams>(params.constants);
  if (b.balls.empty() || b.balls.size() > 3) throw InvalidInput("bounce2d needs 1-3 balls");
  return simulate_balls<2>(params.dataset, b.balls, b.gravity);
}

Trajectory simulate_bounce3d(const ScenarioParams& params) {
  if (params.dataset != DatasetId::bounce3d) throw InvalidInput("simulate_bounce3d needs bounce3d params");
  const auto& b = std::get<Bounce3dParams>(params.constants);
  if (b.balls.empty() || b.balls.size() > 3) throw InvalidInput("bounce3d needs 1-3 balls");
  return simulate_balls<3>(params.dataset, b.balls, Vec3{0.0, b.gravity_y, 0.0});
}

}  // namespace physbench
