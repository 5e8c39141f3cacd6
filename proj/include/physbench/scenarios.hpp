#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "physbench/vec.hpp"

namespace physbench {

enum class DatasetId { bounce2d, bounce3d, roller, pendulum, blocks, moon };

enum class TaskId {
  bounces_2d,
  gravity_2d,
  bounces_3d,
  gravity_roller,
  gravity_pendulum,
  mass_diff_blocks,
  mass_moon,
};

inline constexpr DatasetId kAllDatasets[] = {DatasetId::bounce2d, DatasetId::bounce3d,
                                             DatasetId::roller,   DatasetId::pendulum,
                                             DatasetId::blocks,   DatasetId::moon};

inline constexpr TaskId kAllTasks[] = {TaskId::bounces_2d,       TaskId::gravity_2d,
                                       TaskId::bounces_3d,       TaskId::gravity_roller,
                                       TaskId::gravity_pendulum, TaskId::mass_diff_blocks,
                                       TaskId::mass_moon};

std::string_view to_string(DatasetId id);
std::string_view to_string(TaskId id);
/// Throws InvalidInput for unknown names.
DatasetId parse_dataset_id(std::string_view name);
TaskId parse_task_id(std::string_view name);

int frames_per_video(DatasetId id);
int canonical_video_count(DatasetId id);
/// Number of input frames m the probing task consumes.
int input_frames(TaskId task);
DatasetId dataset_of(TaskId task);
std::vector<TaskId> tasks_of(DatasetId id);

/// Every value the task's label can take: the gridded constants, or 0..50 for bounce counts.
std::vector<double> label_grid(TaskId task);
double grid_population_std(TaskId task);

inline constexpr int kBounceCap = 50;

// ---------------------------------------------------------------------------
// Time base and fixed physical constants
// ---------------------------------------------------------------------------

inline constexpr int kBounceSubsteps = 8;  // explicit Euler, 1 frame = 1 time unit
inline constexpr int kRk4Substeps = 4;
inline constexpr double kPendulumFrameSeconds = 0.01;
inline constexpr double kRollerFrameSeconds = 0.005;
/// Chosen so a circular orbit of radius 0.3 around a mid-grid moon (M = 132.5) takes 80 frames.
inline constexpr double kMoonG = (2.0 * 3.14159265358979323846 / 80.0) *
                                 (2.0 * 3.14159265358979323846 / 80.0) * 0.027 / 132.5;
inline constexpr double kBlockMass1 = 10.0;
/// Width of a block of mass 10; widths scale with sqrt(mass).
inline constexpr double kBlockReferenceWidth = 0.14;
inline constexpr double kBlockFloorY = 0.7;
inline constexpr double kContrastFloor = 0.15;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct Ball {
  Vec3 position;  // scene units; z unused in 2D
  Vec3 velocity;  // scene units per frame
  double radius = 0.0;
  double intensity = 1.0;
};

/// Gravity is the y component in image coordinates (positive pulls toward the bottom row).
struct Bounce2dParams {
  double gravity_y = 0.0;
  Vec3 gravity;  // full acceleration; equals (0, gravity_y) unless direction variation is enabled
  std::vector<Ball> balls;
};

/// World is y-up inside the unit cube; acceleration along y is gravity_y.
struct Bounce3dParams {
  double gravity_y = 0.0;
  std::vector<Ball> balls;
};

/// Track height h(x) = base + quad*(x - valley)^2 + cubic*(x - valley)^3 in a y-up frame.
struct RollerParams {
  double gravity = 0.0;
  double cubic = 0.0;
  double quad = 0.0;
  double valley_x = 0.5;
  double base_height = 0.2;
  double start_x = 0.25;
  double start_speed = 0.0;  // dx/dt along the track, scene units per second
  double ball_radius = 0.03;
  double ball_intensity = 1.0;
  double track_intensity = 0.5;

  double height(double x) const;
  double slope(double x) const;
  double curvature_term(double x) const;  // second derivative h''(x)
};

/// Pivot at the scene center; theta measured from straight down.
struct PendulumParams {
  double gravity = 0.0;
  double length = 0.3;
  double theta0 = 0.0;
  double mass = 1.0;
  double bob_intensity = 1.0;

  double bob_radius() const;
};

/// Block 1 is always on the left; the label direction is m2 - m1.
struct BlocksParams {
  double mass1 = kBlockMass1;
  double mass2 = kBlockMass1;
  double center1 = 0.3;
  double center2 = 0.7;
  double velocity1 = 0.0;  // scene units per frame
  double velocity2 = 0.0;
  double intensity1 = 1.0;
  double intensity2 = 0.6;

  double width1() const;
  double width2() const;
};

/// Moon fixed at the scene center; asteroid position is relative to the scene origin.
struct MoonParams {
  double moon_mass = 100.0;
  double moon_radius = 0.15;
  double asteroid_radius = 0.04;
  Vec3 asteroid_position;
  Vec3 asteroid_velocity;  // scene units per frame
  double moon_intensity = 0.6;
  double asteroid_intensity = 1.0;
};

using ScenarioConstants = std::variant<Bounce2dParams, Bounce3dParams, RollerParams, PendulumParams,
                                       BlocksParams, MoonParams>;

struct ScenarioParams {
  DatasetId dataset = DatasetId::bounce2d;
  std::uint64_t seed = 0;
  double background = 0.0;
  ScenarioConstants constants;
};

struct GenerationOptions {
  /// Rotates 2D gravity away from the y axis. Off for canonical datasets.
  bool vary_gravity_direction = false;
};

ScenarioParams sample_params(DatasetId id, std::uint64_t seed, const GenerationOptions& options = {});

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct BodyState {
  Vec3 position;  // scene units
  Vec3 velocity;  // scene units per frame
  double angle = 0.0;
  double angular_velocity = 0.0;  // radians per frame
  bool constrained = false;       // roller: ball riding the track
};

struct WorldState {
  std::vector<BodyState> bodies;
};

enum class EventKind { ball_wall, ball_ball, block_block, block_wall, detach, land };
std::string_view to_string(EventKind kind);

struct Event {
  int frame_index = 0;  // first frame at which the post-event state is visible
  double time = 0.0;    // in frames since frame 0
  EventKind kind = EventKind::ball_wall;
  int body = 0;
  int other = -1;  // body index for pair events, wall index for wall events
};

struct Trajectory {
  DatasetId dataset = DatasetId::bounce2d;
  std::vector<WorldState> frames;
  std::vector<Event> events;
};

/// Wall index for bouncing datasets: 2*axis + (0 for the low side, 1 for the high side).
constexpr int wall_index(int axis, int side) { return 2 * axis + side; }

Trajectory simulate(const ScenarioParams& params);
Trajectory simulate_bounce2d(const ScenarioParams& params);
Trajectory simulate_bounce3d(const ScenarioParams& params);
Trajectory simulate_blocks(const ScenarioParams& params);
Trajectory simulate_pendulum(const ScenarioParams& params);
Trajectory simulate_roller(const ScenarioParams& params);
Trajectory simulate_moon(const ScenarioParams& params);

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

struct LabelSet {
  TaskId task = TaskId::gravity_2d;
  double raw_value = 0.0;
  double normalized_value = 0.0;  // raw / population std of the task's label grid
  int input_frames_m = 0;
};

/// Ball-wall plus ball-ball events visible within the task's input frames, capped at 50.
int count_bounces(const Trajectory& traj);
/// Same, over the first `window_frames` frames.
int count_bounces(const Trajectory& traj, int window_frames);

LabelSet label_of(const ScenarioParams& params, const Trajectory& traj, TaskId task);
std::vector<LabelSet> labels_for(const ScenarioParams& params, const Trajectory& traj);

// Energy helpers shared by tests and the CLI summary.
double kinetic_energy(const ScenarioParams& params, const WorldState& state);
double pendulum_energy(const PendulumParams& p, double theta, double omega_per_second);

}  // namespace physbench
