// Runge-Kutta driven scenarios: pendulum, roller coaster with flight, moon orbit
// and colliding blocks. Every frame is integrated with kRk4Substeps RK4 steps.

#include <cmath>
#include <limits>
#include <numbers>

#include "physbench/errors.hpp"
#include "physbench/numerics.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

namespace {

constexpr int kBisectionIterations = 60;

/// Latest time in [0, dt] at which `ok(state_after(t))` still holds, given it holds at 0
/// and fails at dt.
template <class Advance, class Ok>
double bisect_crossing(Advance&& state_after, Ok&& ok, double dt) {
  double lo = 0.0;
  double hi = dt;
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ok(state_after(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

Event make_event(double time, EventKind kind, int body = 0, int other = -1) {
  return {static_cast<int>(std::ceil(time)), time, kind, body, other};
}

}  // namespace

// ---------------------------------------------------------------------------
// Pendulum
// ---------------------------------------------------------------------------

Trajectory simulate_pendulum(const ScenarioParams& params) {
  if (params.dataset != DatasetId::pendulum) throw InvalidInput("simulate_pendulum needs pendulum params");
  const auto& p = std::get<PendulumParams>(params.constants);
  if (!(p.length > 0.0)) throw InvalidInput("pendulum length must be positive");

  const double k = p.gravity / p.length;
  auto deriv = [k](const OdeState<2>& y) { return OdeState<2>{y[1], -k * std::sin(y[0])}; };
  const Vec3 pivot{0.5, 0.5, 0.0};
  const double fs = kPendulumFrameSeconds;

  auto snapshot = [&](const OdeState<2>& y) {
    BodyState b;
    b.angle = y[0];
    b.angular_velocity = y[1] * fs;
    b.position = pivot + Vec3{std::sin(y[0]), std::cos(y[0]), 0.0} * p.length;
    b.velocity = Vec3{std::cos(y[0]), -std::sin(y[0]), 0.0} * (p.length * y[1] * fs);
    return WorldState{{b}};
  };

  Trajectory traj;
  traj.dataset = params.dataset;
  OdeState<2> y{p.theta0, 0.0};
  traj.frames.push_back(snapshot(y));
  for (int f = 1; f < frames_per_video(params.dataset); ++f) {
    y = rk4_advance(y, deriv, fs, kRk4Substeps);
    traj.frames.push_back(snapshot(y));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Moon
// ---------------------------------------------------------------------------

Trajectory simulate_moon(const ScenarioParams& params) {
  if (params.dataset != DatasetId::moon) throw InvalidInput("simulate_moon needs moon params");
  const auto& m = std::get<MoonParams>(params.constants);
  const double gm = kMoonG * m.moon_mass;
  const double contact = m.moon_radius + m.asteroid_radius;
  const Vec3 center{0.5, 0.5, 0.0};

  auto deriv = [gm](const OdeState<4>& s) {
    const double r2 = s[0] * s[0] + s[1] * s[1];
    const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
    return OdeState<4>{s[2], s[3], -gm * s[0] * inv_r3, -gm * s[1] * inv_r3};
  };
  auto radius = [](const OdeState<4>& s) { return std::hypot(s[0], s[1]); };

  const Vec3 rel = m.asteroid_position - center;
  OdeState<4> s{rel.x, rel.y, m.asteroid_velocity.x, m.asteroid_velocity.y};
  bool stuck = radius(s) <= contact;

  auto snapshot = [&] {
    BodyState b;
    b.position = center + Vec3{s[0], s[1], 0.0};
    b.velocity = Vec3{s[2], s[3], 0.0};
    return WorldState{{b}};
  };

  Trajectory traj;
  traj.dataset = params.dataset;
  if (stuck) s[2] = s[3] = 0.0;
  traj.frames.push_back(snapshot());
  const double h = 1.0 / kRk4Substeps;
  for (int f = 1; f < frames_per_video(params.dataset); ++f) {
    for (int step = 0; step < kRk4Substeps && !stuck; ++step) {
      const OdeState<4> next = rk4_step(s, deriv, h);
      if (radius(next) > contact) {
        s = next;
        continue;
      }
      const OdeState<4> start = s;
      const double t = bisect_crossing([&](double dt) { return rk4_step(start, deriv, dt); },
                                       [&](const OdeState<4>& y) { return radius(y) > contact; }, h);
      const OdeState<4> hit = rk4_step(start, deriv, t);
      const double r = radius(hit);
      s = {hit[0] / r * contact, hit[1] / r * contact, 0.0, 0.0};
      stuck = true;
      traj.events.push_back(make_event((f - 1) + step * h + t, EventKind::land));
    }
    traj.frames.push_back(snapshot());
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

Trajectory simulate_blocks(const ScenarioParams& params) {
  if (params.dataset != DatasetId::blocks) throw InvalidInput("simulate_blocks needs blocks params");
  const auto& b = std::get<BlocksParams>(params.constants);
  const double w1 = b.width1();
  const double w2 = b.width2();
  if (b.center1 - 0.5 * w1 < 0.0 || b.center2 + 0.5 * w2 > 1.0 ||
      b.center1 + 0.5 * w1 > b.center2 - 0.5 * w2) {
    throw InvalidInput("blocks overlap or leave the track");
  }

  // State: x1, v1, x2, v2. Free motion between contacts.
  auto deriv = [](const OdeState<4>& s) { return OdeState<4>{s[1], 0.0, s[3], 0.0}; };
  OdeState<4> s{b.center1, b.velocity1, b.center2, b.velocity2};

  auto snapshot = [&] {
    WorldState w;
    w.bodies.push_back({{s[0], kBlockFloorY - 0.5 * w1, 0.0}, {s[1], 0.0, 0.0}});
    w.bodies.push_back({{s[2], kBlockFloorY - 0.5 * w2, 0.0}, {s[3], 0.0, 0.0}});
    return w;
  };

  Trajectory traj;
  traj.dataset = params.dataset;
  traj.frames.push_back(snapshot());
  const double h = 1.0 / kRk4Substeps;
  const double total = b.mass1 + b.mass2;
  for (int f = 1; f < frames_per_video(params.dataset); ++f) {
    for (int step = 0; step < kRk4Substeps; ++step) {
      double elapsed = 0.0;
      for (int guard = 0;; ++guard) {
        if (guard > 64) throw SimulationFailure("block contacts did not settle");
        const double remaining = h - elapsed;
        double t = std::numeric_limits<double>::infinity();
        int which = -1;  // 0 left wall, 1 right wall, 2 block-block
        if (s[1] < 0.0) {
          const double tw = std::max(0.0, (s[0] - 0.5 * w1) / -s[1]);
          if (tw < t) t = tw, which = 0;
        }
        if (s[3] > 0.0) {
          const double tw = std::max(0.0, (1.0 - 0.5 * w2 - s[2]) / s[3]);
          if (tw < t) t = tw, which = 1;
        }
        const double closing = s[1] - s[3];
        if (closing > 0.0) {
          const double gap = (s[2] - 0.5 * w2) - (s[0] + 0.5 * w1);
          const double tb = std::max(0.0, gap / closing);
          if (tb < t) t = tb, which = 2;
        }
        if (which < 0 || t > remaining) {
          s = rk4_step(s, deriv, remaining);
          break;
        }
        s = rk4_step(s, deriv, t);
        elapsed += t;
        const double time = (f - 1) + step * h + elapsed;
        if (which == 0) {
          s[0] = 0.5 * w1;
          s[1] = -s[1];
          traj.events.push_back(make_event(time, EventKind::block_wall, 0, wall_index(0, 0)));
        } else if (which == 1) {
          s[2] = 1.0 - 0.5 * w2;
          s[3] = -s[3];
          traj.events.push_back(make_event(time, EventKind::block_wall, 1, wall_index(0, 1)));
        } else {
          const double u1 = s[1];
          const double u2 = s[3];
          s[1] = ((b.mass1 - b.mass2) * u1 + 2.0 * b.mass2 * u2) / total;
          s[3] = ((b.mass2 - b.mass1) * u2 + 2.0 * b.mass1 * u1) / total;
          traj.events.push_back(make_event(time, EventKind::block_block, 0, 1));
        }
      }
    }
    traj.frames.push_back(snapshot());
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Roller coaster with flight
// ---------------------------------------------------------------------------
//
// Physics runs in a y-up frame with time in seconds. On the track the state is
// (x, dx/dt) for a frictionless bead on y = h(x); in flight it is (x, y, vx, vy).
// The ball leaves the track where the track curves downward faster than gravity
// can bend its path: v^2 * kappa > g * cos(theta), which on y = h(x) reduces to
// -h''(x) * xdot^2 > g.

namespace {

bool wants_to_detach(const RollerParams& r, double x, double xdot) {
  const double hpp = r.curvature_term(x);
  return hpp < 0.0 && -hpp * xdot * xdot > r.gravity;
}

}  // namespace

Trajectory simulate_roller(const ScenarioParams& params) {
  if (params.dataset != DatasetId::roller) throw InvalidInput("simulate_roller needs roller params");
  const RollerParams& r = std::get<RollerParams>(params.constants);
  const double g = r.gravity;
  const double fs = kRollerFrameSeconds;

  auto on_track = [&r, g](const OdeState<2>& s) {
    const double hp = r.slope(s[0]);
    const double hpp = r.curvature_term(s[0]);
    const double xddot = -hp * (g + hpp * s[1] * s[1]) / (1.0 + hp * hp);
    return OdeState<2>{s[1], xddot};
  };
  auto flight = [g](const OdeState<4>& s) { return OdeState<4>{s[2], s[3], 0.0, -g}; };

  bool attached = true;
  OdeState<2> track{r.start_x, r.start_speed};
  OdeState<4> free{};

  auto snapshot = [&] {
    BodyState b;
    b.constrained = attached;
    if (attached) {
      const double hp = r.slope(track[0]);
      b.position = {track[0], 1.0 - r.height(track[0]), 0.0};
      b.velocity = Vec3{track[1], -hp * track[1], 0.0} * fs;
    } else {
      b.position = {free[0], 1.0 - free[1], 0.0};
      b.velocity = Vec3{free[2], -free[3], 0.0} * fs;
    }
    return WorldState{{b}};
  };

  auto enter_flight = [&](const OdeState<2>& s) {
    const double hp = r.slope(s[0]);
    free = {s[0], r.height(s[0]), s[1], hp * s[1]};
    attached = false;
  };

  Trajectory traj;
  traj.dataset = params.dataset;
  if (wants_to_detach(r, track[0], track[1])) {
    enter_flight(track);
    traj.events.push_back(make_event(0.0, EventKind::detach));
  }
  traj.frames.push_back(snapshot());

  const double h = fs / kRk4Substeps;
  for (int f = 1; f < frames_per_video(params.dataset); ++f) {
    for (int step = 0; step < kRk4Substeps; ++step) {
      const double step_start = (f - 1) + static_cast<double>(step) / kRk4Substeps;
      if (attached) {
        const OdeState<2> start = track;
        const OdeState<2> next = rk4_step(start, on_track, h);
        if (!wants_to_detach(r, next[0], next[1])) {
          track = next;
          continue;
        }
        const double t = bisect_crossing([&](double dt) { return rk4_step(start, on_track, dt); },
                                         [&](const OdeState<2>& y) { return !wants_to_detach(r, y[0], y[1]); },
                                         h);
        const OdeState<2> at = rk4_step(start, on_track, t);
        enter_flight(at);
        traj.events.push_back(make_event(step_start + t / fs, EventKind::detach));
        free = rk4_step(free, flight, h - t);
        continue;
      }

      const OdeState<4> start = free;
      const OdeState<4> next = rk4_step(start, flight, h);
      auto above = [&r](const OdeState<4>& y) {
        return y[0] < 0.0 || y[0] > 1.0 || y[1] >= r.height(y[0]);
      };
      const bool falling_into_track =
          !above(next) && (next[3] - r.slope(next[0]) * next[2]) < 0.0;
      if (!falling_into_track) {
        free = next;
        continue;
      }
      const double t = bisect_crossing([&](double dt) { return rk4_step(start, flight, dt); }, above, h);
      const OdeState<4> at = rk4_step(start, flight, t);
      const double hp = r.slope(at[0]);
      // Keep the tangential component of velocity on landing.
      const double xdot = (at[2] + hp * at[3]) / (1.0 + hp * hp);
      track = {at[0], xdot};
      attached = true;
      const double when = step_start + t / fs;
      traj.events.push_back(make_event(when, EventKind::land));
      if (wants_to_detach(r, track[0], track[1])) {
        enter_flight(track);
        traj.events.push_back(make_event(when, EventKind::detach));
        free = rk4_step(free, flight, h - t);
      } else {
        track = rk4_step(track, on_track, h - t);
      }
    }
    traj.frames.push_back(snapshot());
  }
  return traj;
}

}  // namespace physbench
