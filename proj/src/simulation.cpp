#include "magtrack/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magtrack/rng.hpp"

namespace magtrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

Pose coil_at(const Vec3& position, const Vec3& facing) {
  Pose p;
  p.position = position;
  p.orientation = Quat::from_two_vectors(Vec3{0, 0, 1}, facing);
  return p;
}

Pose coil_facing_point(const Vec3& position, const Vec3& target) {
  return coil_at(position, target - position);
}

Scenario make_whiteboard() {
  Scenario s;
  s.name = "whiteboard";
  s.workspace = {{-0.8, 0.30, 0.20}, {0.8, 1.00, 1.00}};
  const Vec3 center = s.workspace.center();
  // Four coils on the board frame, two on floor stands flanking the user;
  // nearest-neighbor spacings all in [1.0, 1.8] m.
  for (const Vec3 p : {Vec3{-1.1, 0.0, 0.10}, Vec3{1.1, 0.0, 0.10},
                       Vec3{-1.1, 0.0, 1.20}, Vec3{1.1, 0.0, 1.20},
                       Vec3{-0.85, 1.5, 0.70}, Vec3{0.85, 1.5, 0.70}})
    s.transmitters.push_back(coil_facing_point(p, center));
  return s;
}

Scenario make_table() {
  Scenario s;
  s.name = "table";
  s.workspace = {{-0.55, -0.35, 0.76}, {0.55, 0.35, 1.40}};
  const Vec3 center = s.workspace.center();
  // Ring of six around the table, alternating low/high mounts.
  for (int i = 0; i < 6; ++i) {
    const double az = i * kPi / 3.0;
    const double z = (i % 2 == 0) ? 0.35 : 1.15;
    s.transmitters.push_back(
        coil_facing_point({1.15 * std::cos(az), 1.15 * std::sin(az), z}, center));
  }
  return s;
}

Scenario make_shelf() {
  Scenario s;
  s.name = "shelf";
  s.workspace = {{-0.5, 0.25, 0.30}, {0.5, 1.00, 1.60}};
  const Vec3 center = s.workspace.center();
  for (const Vec3 p : {Vec3{-0.6, 0.0, 0.30}, Vec3{0.6, 0.0, 0.30},
                       Vec3{-0.6, 0.0, 1.70}, Vec3{0.6, 0.0, 1.70},
                       Vec3{-0.8, 1.3, 1.00}, Vec3{0.8, 1.3, 1.00}})
    s.transmitters.push_back(coil_facing_point(p, center));
  return s;
}

Aabb on_body_workspace() { return {{-0.40, 0.18, -0.10}, {0.40, 0.60, 0.55}}; }

Vec3 radial_out(const Vec3& p) { return normalized(Vec3{p.x, p.y, 0.0}); }

Scenario make_waist_chest() {
  Scenario s;
  s.name = "waist_chest";
  s.workspace = on_body_workspace();
  // Two rows of three on the torso front, 0.14 m apart both within and
  // between rows; the lateral coils sit further back on the body curve.
  for (const double z : {0.0, 0.14}) {
    for (const Vec3 p :
         {Vec3{-0.14, 0.085, z}, Vec3{0.0, 0.115, z}, Vec3{0.14, 0.085, z}})
      s.transmitters.push_back(coil_at(p, radial_out(p)));
  }
  return s;
}

Scenario make_waist_ring(const std::string& name, double radius,
                         double arc_step_deg, double z_stagger) {
  Scenario s;
  s.name = name;
  s.workspace = on_body_workspace();
  // Six coils on a waist ring. A full ring uses 60 degree steps; a smaller
  // step packs them onto the front arc. Azimuth 0 faces forward (+y).
  const double start = -2.5 * arc_step_deg;
  for (int i = 0; i < 6; ++i) {
    const double az = (start + i * arc_step_deg) * kPi / 180.0;
    const double z = (i % 2 == 0) ? z_stagger : -z_stagger;
    const Vec3 p{radius * std::sin(az), radius * std::cos(az), z};
    s.transmitters.push_back(coil_at(p, radial_out(p)));
  }
  return s;
}

}  // namespace

void Scenario::validate() const {
  if (transmitters.size() < 4)
    throw std::invalid_argument("scenario needs >= 4 transmitter coils");
  for (const auto& t : transmitters) t.validate();
  coil.validate();
  if (workspace.empty()) throw std::invalid_argument("empty workspace");
  if (!(truth_noise_sigma_m >= 0.0))
    throw std::invalid_argument("truth noise sigma must be >= 0");
  if (!(truth_rate_hz > 0.0))
    throw std::invalid_argument("truth rate must be positive");
}

BeaconSet Scenario::beacons() const {
  BeaconSet set;
  for (size_t i = 0; i < transmitters.size(); ++i)
    set.beacons.push_back({static_cast<int>(i), transmitters[i].position});
  return set;
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "whiteboard") return make_whiteboard();
  if (name == "table") return make_table();
  if (name == "shelf") return make_shelf();
  if (name == "waist_chest") return make_waist_chest();
  if (name == "waist_v1") return make_waist_ring("waist_v1", 0.155, 60.0, 0.02);
  if (name == "waist_v3") return make_waist_ring("waist_v3", 0.25, 34.0, 0.0);
  throw std::out_of_range("unknown scenario: " + name);
}

std::vector<std::string> builtin_scenario_names() {
  return {"whiteboard", "table", "shelf", "waist_chest", "waist_v1", "waist_v3"};
}

Vec3 Trajectory::sample(double t_ms) const {
  if (waypoints.empty()) throw std::logic_error("empty trajectory");
  if (t_ms <= waypoint_times_ms.front()) return waypoints.front();
  if (t_ms >= waypoint_times_ms.back()) return waypoints.back();
  const auto it = std::upper_bound(waypoint_times_ms.begin(),
                                   waypoint_times_ms.end(), t_ms);
  const size_t hi = it - waypoint_times_ms.begin();
  const size_t lo = hi - 1;
  const double span = waypoint_times_ms[hi] - waypoint_times_ms[lo];
  const double u = (t_ms - waypoint_times_ms[lo]) / span;
  const double eased = 0.5 - 0.5 * std::cos(kPi * u);
  return waypoints[lo] + eased * (waypoints[hi] - waypoints[lo]);
}

Vec3 Trajectory::velocity(double t_ms, double h_ms) const {
  const Vec3 a = sample(t_ms - h_ms * 0.5);
  const Vec3 b = sample(t_ms + h_ms * 0.5);
  return (b - a) / (h_ms * 1e-3);
}

Trajectory generate_trajectory(const Scenario& scenario, double duration_s,
                               uint64_t seed, const TrajectoryParams& params) {
  scenario.validate();
  if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (!(params.target_speed_mps > 0.0) ||
      params.target_speed_mps > params.max_speed_mps)
    throw std::invalid_argument("need 0 < target speed <= max speed");

  auto rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> ux(scenario.workspace.lo.x,
                                            scenario.workspace.hi.x);
  std::uniform_real_distribution<double> uy(scenario.workspace.lo.y,
                                            scenario.workspace.hi.y);
  std::uniform_real_distribution<double> uz(scenario.workspace.lo.z,
                                            scenario.workspace.hi.z);

  Trajectory traj;
  traj.seed = seed;
  traj.duration_ms = duration_s * 1000.0;
  traj.waypoint_times_ms.push_back(0.0);
  traj.waypoints.push_back({ux(rng), uy(rng), uz(rng)});
  while (traj.waypoint_times_ms.back() < traj.duration_ms) {
    const Vec3 next{ux(rng), uy(rng), uz(rng)};
    const double dist = (next - traj.waypoints.back()).norm();
    // Cosine easing peaks at pi/2 times the segment's average speed; size the
    // segment so the peak respects the hard cap.
    const double t_target = dist / params.target_speed_mps;
    const double t_cap = dist * kPi / (2.0 * params.max_speed_mps);
    const double seg_s = std::max({t_target, t_cap, 0.5});
    traj.waypoint_times_ms.push_back(traj.waypoint_times_ms.back() + seg_s * 1000.0);
    traj.waypoints.push_back(next);
  }
  return traj;
}

SimulatedRun simulate_run(const Scenario& scenario, const Trajectory& trajectory,
                          const ReceiverSpec& receiver,
                          const TdmaSchedule& schedule, uint64_t seed,
                          const ClockModel& clock) {
  scenario.validate();
  receiver.validate();
  schedule.validate();
  if (static_cast<int>(scenario.transmitters.size()) != schedule.n_coils)
    throw std::invalid_argument("scenario coil count does not match schedule");

  SimulatedRun run;
  run.duration_ms = trajectory.duration_ms;

  const double period = schedule.adc_period_ms();
  const size_t n_ticks = static_cast<size_t>(trajectory.duration_ms / period);
  run.samples.reserve(n_ticks);
  run.true_coil_ids.reserve(n_ticks);
  for (size_t k = 0; k < n_ticks; ++k) {
    const double t_true = k * period;
    const std::optional<int> active = active_coil_at(schedule, t_true);
    uint32_t strength = 0;
    if (active) {
      strength = measure(scenario.transmitters[*active], scenario.coil,
                         trajectory.sample(t_true), receiver, mix_seed(seed, k));
      if (strength == 0) ++run.floor_saturated_samples;
    }
    const double t_stamp = t_true + effective_offset_ms(clock, t_true);
    const std::optional<int> believed = active_coil_at(schedule, t_stamp);
    run.samples.push_back({t_stamp, believed.value_or(-1), strength});
    run.true_coil_ids.push_back(active.value_or(-1));
  }

  auto truth_rng = make_rng(seed, 1);
  std::normal_distribution<double> truth_noise(0.0, 1.0);
  const double truth_period = 1000.0 / scenario.truth_rate_hz;
  const size_t n_truth = static_cast<size_t>(trajectory.duration_ms / truth_period) + 1;
  for (size_t k = 0; k < n_truth; ++k) {
    const double t = k * truth_period;
    const Vec3 p = trajectory.sample(t);
    run.truth_clean.push_back({t, p});
    const double sigma = scenario.truth_noise_sigma_m;
    run.truth_noisy.push_back(
        {t, p + Vec3{sigma * truth_noise(truth_rng), sigma * truth_noise(truth_rng),
                     sigma * truth_noise(truth_rng)}});
  }

  run.frames = assemble_frames(run.samples, schedule, clock);
  return run;
}

}  // namespace magtrack
