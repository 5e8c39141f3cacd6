#include "physbench/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "physbench/errors.hpp"
#include "physbench/numerics.hpp"

namespace physbench {

namespace {

struct DatasetInfo {
  DatasetId id;
  std::string_view name;
  int frames;
  int videos;
};

constexpr DatasetInfo kDatasetInfo[] = {
    {DatasetId::bounce2d, "bounce2d", 60, 20000}, {DatasetId::bounce3d, "bounce3d", 100, 10000},
    {DatasetId::roller, "roller", 100, 10000},     {DatasetId::pendulum, "pendulum", 100, 10000},
    {DatasetId::blocks, "blocks", 100, 10000},     {DatasetId::moon, "moon", 100, 10000},
};

struct TaskInfo {
  TaskId id;
  std::string_view name;
  DatasetId dataset;
  int input_frames;
};

constexpr TaskInfo kTaskInfo[] = {
    {TaskId::bounces_2d, "bounces_2d", DatasetId::bounce2d, 59},
    {TaskId::gravity_2d, "gravity_2d", DatasetId::bounce2d, 5},
    {TaskId::bounces_3d, "bounces_3d", DatasetId::bounce3d, 99},
    {TaskId::gravity_roller, "gravity_roller", DatasetId::roller, 5},
    {TaskId::gravity_pendulum, "gravity_pendulum", DatasetId::pendulum, 5},
    {TaskId::mass_diff_blocks, "mass_diff_blocks", DatasetId::blocks, 49},
    {TaskId::mass_moon, "mass_moon", DatasetId::moon, 5},
};

const DatasetInfo& info(DatasetId id) {
  for (const auto& d : kDatasetInfo) {
    if (d.id == id) return d;
  }
  throw InvalidInput("unknown dataset id");
}

const TaskInfo& info(TaskId id) {
  for (const auto& t : kTaskInfo) {
    if (t.id == id) return t;
  }
  throw InvalidInput("unknown task id");
}

// Grid values are built as integer multiples of the step so they sit exactly on the grid.
std::vector<double> arithmetic_grid(double start, double step, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(start + step * k);
  return out;
}

std::vector<double> gravity_2d_grid() {
  std::vector<double> out;
  for (int k = -3; k <= 3; ++k) out.push_back(k / 1e4);  // k / 1e4 rounds to the same double as the literal
  return out;
}
std::vector<double> roller_grid() { return arithmetic_grid(0.0, 0.5, 201); }
std::vector<double> pendulum_grid() { return arithmetic_grid(0.0, 0.5, 41); }
std::vector<double> block_mass_grid() { return arithmetic_grid(0.5, 0.5, 39); }
std::vector<double> moon_mass_grid() { return arithmetic_grid(70.0, 5.0, 26); }

double pick(Sampler& s, const std::vector<double>& grid) { return grid[s.index(grid.size())]; }

double contrasting_intensity(Sampler& s, double background, double lo = 0.0, double hi = 1.0) {
  for (;;) {
    const double v = s.uniform(lo, hi);
    if (std::abs(v - background) >= kContrastFloor) return v;
  }
}

Vec3 unit_direction_2d(Sampler& s) {
  const double a = s.uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(a), std::sin(a), 0.0};
}

Vec3 unit_direction_3d(Sampler& s) {
  const double z = s.uniform(-1.0, 1.0);
  const double a = s.uniform(0.0, 2.0 * std::numbers::pi);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(a), rho * std::sin(a), z};
}

std::vector<Ball> sample_balls(Sampler& s, int dims, double r_lo, double r_hi, double background) {
  const int count = 1 + static_cast<int>(s.index(3));
  for (;;) {
    std::vector<Ball> balls;
    bool placed_all = true;
    for (int i = 0; i < count && placed_all; ++i) {
      Ball b;
      b.radius = s.uniform(r_lo, r_hi);
      placed_all = false;
      for (int attempt = 0; attempt < 200; ++attempt) {
        Vec3 p;
        for (int a = 0; a < dims; ++a) p[a] = s.uniform(b.radius, 1.0 - b.radius);
        const bool clear = std::all_of(balls.begin(), balls.end(), [&](const Ball& o) {
          return (o.position - p).norm() >= o.radius + b.radius + 0.01;
        });
        if (clear) {
          b.position = p;
          placed_all = true;
          break;
        }
      }
      const Vec3 dir = dims == 2 ? unit_direction_2d(s) : unit_direction_3d(s);
      b.velocity = dir * s.uniform(0.01, 0.05);
      b.intensity = contrasting_intensity(s, background);
      balls.push_back(b);
    }
    if (placed_all) return balls;
  }
}

ScenarioParams sample_moon(Sampler& s, ScenarioParams params) {
  MoonParams m;
  m.moon_mass = pick(s, moon_mass_grid());
  m.moon_radius = s.uniform(8.0, 14.0) / 64.0;
  m.asteroid_radius = s.uniform(2.0, 4.0) / 64.0;
  m.moon_intensity = s.uniform(0.3, 0.7);
  m.asteroid_intensity = s.uniform(0.8, 1.0);
  const double gm = kMoonG * m.moon_mass;
  for (;;) {
    const double r0 = s.uniform(m.moon_radius + m.asteroid_radius + 0.05, 0.42);
    const double phi = s.uniform(0.0, 2.0 * std::numbers::pi);
    const double tangential = s.uniform(0.75, 1.1) * (s.uniform() < 0.5 ? -1.0 : 1.0);
    const double radial = s.uniform(-0.15, 0.15);
    const Vec3 rhat{std::cos(phi), std::sin(phi), 0.0};
    const Vec3 that{-rhat.y, rhat.x, 0.0};
    const double vc = std::sqrt(gm / r0);
    const Vec3 v = (that * tangential + rhat * radial) * vc;
    // Reject orbits whose apoapsis would leave the frame.
    const double energy = 0.5 * v.norm2() - gm / r0;
    if (energy >= 0.0) continue;
    const double h = r0 * (that.dot(v));
    const double a = -gm / (2.0 * energy);
    const double e = std::sqrt(std::max(0.0, 1.0 + 2.0 * energy * h * h / (gm * gm)));
    if (a * (1.0 + e) + m.asteroid_radius > 0.48) continue;
    m.asteroid_position = Vec3{0.5, 0.5, 0.0} + rhat * r0;
    m.asteroid_velocity = v;
    break;
  }
  params.background = 0.0;
  params.constants = m;
  return params;
}

}  // namespace

std::string_view to_string(DatasetId id) { return info(id).name; }
std::string_view to_string(TaskId id) { return info(id).name; }

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ball_wall: return "ball_wall";
    case EventKind::ball_ball: return "ball_ball";
    case EventKind::block_block: return "block_block";
    case EventKind::block_wall: return "block_wall";
    case EventKind::detach: return "detach";
    case EventKind::land: return "land";
  }
  return "unknown";
}

DatasetId parse_dataset_id(std::string_view name) {
  for (const auto& d : kDatasetInfo) {
    if (d.name == name) return d.id;
  }
  throw InvalidInput("unknown dataset: " + std::string(name));
}

TaskId parse_task_id(std::string_view name) {
  for (const auto& t : kTaskInfo) {
    if (t.name == name) return t.id;
  }
  throw InvalidInput("unknown task: " + std::string(name));
}

int frames_per_video(DatasetId id) { return info(id).frames; }
int canonical_video_count(DatasetId id) { return info(id).videos; }
int input_frames(TaskId task) { return info(task).input_frames; }
DatasetId dataset_of(TaskId task) { return info(task).dataset; }

std::vector<TaskId> tasks_of(DatasetId id) {
  std::vector<TaskId> out;
  for (const auto& t : kTaskInfo) {
    if (t.dataset == id) out.push_back(t.id);
  }
  return out;
}

std::vector<double> label_grid(TaskId task) {
  switch (task) {
    case TaskId::bounces_2d:
    case TaskId::bounces_3d: return arithmetic_grid(0.0, 1.0, kBounceCap + 1);
    case TaskId::gravity_2d: return gravity_2d_grid();
    case TaskId::gravity_roller: return roller_grid();
    case TaskId::gravity_pendulum: return pendulum_grid();
    case TaskId::mass_diff_blocks: {
      auto g = block_mass_grid();
      for (double& v : g) v -= kBlockMass1;
      return g;
    }
    case TaskId::mass_moon: return moon_mass_grid();
  }
  throw InvalidInput("unknown task id");
}

double grid_population_std(TaskId task) {
  const auto grid = label_grid(task);
  double mean = 0.0;
  for (double v : grid) mean += v;
  mean /= static_cast<double>(grid.size());
  double ss = 0.0;
  for (double v : grid) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(grid.size()));
}

// ---------------------------------------------------------------------------

double RollerParams::height(double x) const {
  const double d = x - valley_x;
  return base_height + quad * d * d + cubic * d * d * d;
}

double RollerParams::slope(double x) const {
  const double d = x - valley_x;
  return 2.0 * quad * d + 3.0 * cubic * d * d;
}

double RollerParams::curvature_term(double x) const { return 2.0 * quad + 6.0 * cubic * (x - valley_x); }

double PendulumParams::bob_radius() const { return 0.02 + 0.01 * mass; }

double BlocksParams::width1() const { return kBlockReferenceWidth * std::sqrt(mass1 / kBlockMass1); }
double BlocksParams::width2() const { return kBlockReferenceWidth * std::sqrt(mass2 / kBlockMass1); }

ScenarioParams sample_params(DatasetId id, std::uint64_t seed, const GenerationOptions& options) {
  Sampler s(seed);
  ScenarioParams params;
  params.dataset = id;
  params.seed = seed;

  switch (id) {
    case DatasetId::bounce2d: {
      Bounce2dParams b;
      b.gravity_y = pick(s, gravity_2d_grid());
      params.background = s.uniform();
      b.balls = sample_balls(s, 2, 0.04, 0.1, params.background);
      b.gravity = {0.0, b.gravity_y, 0.0};
      if (options.vary_gravity_direction) {
        const double a = s.uniform(-std::numbers::pi, std::numbers::pi);
        b.gravity = {b.gravity_y * std::sin(a), b.gravity_y * std::cos(a), 0.0};
      }
      params.constants = b;
      return params;
    }
    case DatasetId::bounce3d: {
      Bounce3dParams b;
      b.gravity_y = pick(s, gravity_2d_grid());
      params.background = s.uniform();
      b.balls = sample_balls(s, 3, 0.06, 0.12, params.background);
      params.constants = b;
      return params;
    }
    case DatasetId::roller: {
      RollerParams r;
      r.gravity = pick(s, roller_grid());
      // One valley at valley_x and one hump 0.3 to its right.
      r.quad = 6.0;
      r.cubic = -2.0 * r.quad / (3.0 * 0.3);
      r.valley_x = s.uniform(0.3, 0.5);
      r.base_height = s.uniform(0.05, 0.3);
      r.start_x = r.valley_x - 0.25;
      r.start_speed = 0.0;
      r.ball_radius = 0.03;
      r.ball_intensity = s.uniform(0.6, 1.0);
      r.track_intensity = s.uniform(0.25, 0.5);
      params.background = 0.0;
      params.constants = r;
      return params;
    }
    case DatasetId::pendulum: {
      PendulumParams p;
      p.gravity = pick(s, pendulum_grid());
      p.length = s.uniform(0.2, 0.45);
      p.theta0 = s.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
      p.mass = s.uniform(0.5, 2.0);
      p.bob_intensity = s.uniform(0.5, 1.0);
      params.background = 0.0;
      params.constants = p;
      return params;
    }
    case DatasetId::blocks: {
      BlocksParams b;
      b.mass1 = kBlockMass1;
      b.mass2 = pick(s, block_mass_grid());
      b.center1 = s.uniform(0.02, 0.3) + 0.5 * b.width1();
      b.center2 = s.uniform(0.7, 0.98) - 0.5 * b.width2();
      b.velocity1 = s.uniform(0.01, 0.03);
      b.velocity2 = -s.uniform(0.01, 0.03);
      b.intensity1 = s.uniform(0.4, 1.0);
      b.intensity2 = s.uniform(0.4, 1.0);
      params.background = 0.0;
      params.constants = b;
      return params;
    }
    case DatasetId::moon: return sample_moon(s, params);
  }
  throw InvalidInput("unknown dataset id");
}

Trajectory simulate(const ScenarioParams& params) {
  switch (params.dataset) {
    case DatasetId::bounce2d: return simulate_bounce2d(params);
    case DatasetId::bounce3d: return simulate_bounce3d(params);
    case DatasetId::roller: return simulate_roller(params);
    case DatasetId::pendulum: return simulate_pendulum(params);
    case DatasetId::blocks: return simulate_blocks(params);
    case DatasetId::moon: return simulate_moon(params);
  }
  throw InvalidInput("unknown dataset id");
}

// ---------------------------------------------------------------------------

int count_bounces(const Trajectory& traj, int window_frames) {
  if (traj.dataset != DatasetId::bounce2d && traj.dataset != DatasetId::bounce3d) {
    throw InvalidTask("bounce counting needs a bouncing-ball trajectory, got " +
                      std::string(to_string(traj.dataset)));
  }
  int count = 0;
  for (const auto& e : traj.events) {
    if ((e.kind == EventKind::ball_wall || e.kind == EventKind::ball_ball) &&
        e.frame_index <= window_frames - 1) {
      ++count;
    }
  }
  return std::min(count, kBounceCap);
}

int count_bounces(const Trajectory& traj) {
  if (traj.dataset == DatasetId::bounce2d) return count_bounces(traj, input_frames(TaskId::bounces_2d));
  if (traj.dataset == DatasetId::bounce3d) return count_bounces(traj, input_frames(TaskId::bounces_3d));
  return count_bounces(traj, 0);  // throws InvalidTask
}

LabelSet label_of(const ScenarioParams& params, const Trajectory& traj, TaskId task) {
  if (dataset_of(task) != params.dataset || traj.dataset != params.dataset) {
    throw InvalidTask("task " + std::string(to_string(task)) + " is not defined for dataset " +
                      std::string(to_string(params.dataset)));
  }
  LabelSet out;
  out.task = task;
  out.input_frames_m = input_frames(task);
  switch (task) {
    case TaskId::bounces_2d:
    case TaskId::bounces_3d: out.raw_value = count_bounces(traj, out.input_frames_m); break;
    case TaskId::gravity_2d: out.raw_value = std::get<Bounce2dParams>(params.constants).gravity_y; break;
    case TaskId::gravity_roller: out.raw_value = std::get<RollerParams>(params.constants).gravity; break;
    case TaskId::gravity_pendulum: out.raw_value = std::get<PendulumParams>(params.constants).gravity; break;
    case TaskId::mass_diff_blocks: {
      const auto& b = std::get<BlocksParams>(params.constants);
      out.raw_value = b.mass2 - b.mass1;
      break;
    }
    case TaskId::mass_moon: out.raw_value = std::get<MoonParams>(params.constants).moon_mass; break;
  }
  out.normalized_value = out.raw_value / grid_population_std(task);
  return out;
}

std::vector<LabelSet> labels_for(const ScenarioParams& params, const Trajectory& traj) {
  std::vector<LabelSet> out;
  for (TaskId t : tasks_of(params.dataset)) out.push_back(label_of(params, traj, t));
  return out;
}

double kinetic_energy(const ScenarioParams& params, const WorldState& state) {
  double e = 0.0;
  switch (params.dataset) {
    case DatasetId::bounce2d: {
      const auto& b = std::get<Bounce2dParams>(params.constants);
      for (std::size_t i = 0; i < b.balls.size(); ++i) {
        const double r = b.balls[i].radius;
        e += 0.5 * r * r * state.bodies[i].velocity.norm2();
      }
      return e;
    }
    case DatasetId::bounce3d: {
      const auto& b = std::get<Bounce3dParams>(params.constants);
      for (std::size_t i = 0; i < b.balls.size(); ++i) {
        const double r = b.balls[i].radius;
        e += 0.5 * r * r * r * state.bodies[i].velocity.norm2();
      }
      return e;
    }
    case DatasetId::blocks: {
      const auto& b = std::get<BlocksParams>(params.constants);
      return 0.5 * b.mass1 * state.bodies[0].velocity.norm2() +
             0.5 * b.mass2 * state.bodies[1].velocity.norm2();
    }
    default:
      for (const auto& body : state.bodies) e += 0.5 * body.velocity.norm2();
      return e;
  }
}

double pendulum_energy(const PendulumParams& p, double theta, double omega_per_second) {
  return 0.5 * p.length * p.length * omega_per_second * omega_per_second -
         p.gravity * p.length * std::cos(theta);
}

}  // namespace physbench
