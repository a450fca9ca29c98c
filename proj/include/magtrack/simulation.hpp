#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magtrack/positioning.hpp"
#include "magtrack/scheduler.hpp"

namespace magtrack {

/// Timestamped ground-truth point.
struct TimedPoint {
  double timestamp_ms = 0.0;
  Vec3 position;
};

/// Transmitter deployment: coil placements, the shared coil drive, the box
/// the hand moves in, and the reference-system noise level.
struct Scenario {
  std::string name;
  std::vector<Pose> transmitters;
  CoilSpec coil;
  Aabb workspace;
  double truth_noise_sigma_m = 0.02;  // ultrasound-class reference accuracy
  double truth_rate_hz = 100.0;

  void validate() const;
  BeaconSet beacons() const;
};

/// Built-in deployments: whiteboard, table, shelf, waist_chest, waist_v1,
/// waist_v3. Coordinates are fixed defaults chosen to satisfy the documented
/// adjacent-spacing ranges; throws on an unknown name.
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

struct TrajectoryParams {
  double target_speed_mps = 0.28;
  double max_speed_mps = 1.5;
};

/// Piecewise waypoint path with cosine easing: smooth, speed-bounded,
/// workspace-confined, deterministic per seed.
struct Trajectory {
  std::vector<double> waypoint_times_ms;
  std::vector<Vec3> waypoints;
  double duration_ms = 0.0;
  uint64_t seed = 0;

  Vec3 sample(double t_ms) const;
  Vec3 velocity(double t_ms, double h_ms = 1.0) const;
};

Trajectory generate_trajectory(const Scenario& scenario, double duration_s,
                               uint64_t seed, const TrajectoryParams& params = {});

/// Everything one run produces: the raw sample stream, which coil was truly
/// active per sample, assembled frames, and ground truth in clean and
/// reference-noise variants.
struct SimulatedRun {
  std::vector<RawSample> samples;
  std::vector<int> true_coil_ids;  // parallel to samples
  FrameStream frames;
  std::vector<TimedPoint> truth_clean;
  std::vector<TimedPoint> truth_noisy;
  size_t floor_saturated_samples = 0;
  double duration_ms = 0.0;
};

/// Runs the transmitter -> field -> receiver -> frame chain along the
/// trajectory. ADC ticks advance in true time; sample timestamps are the
/// receiver clock readings, so clock error shows up exactly where the real
/// system would see it. Deterministic for fixed inputs.
SimulatedRun simulate_run(const Scenario& scenario, const Trajectory& trajectory,
                          const ReceiverSpec& receiver,
                          const TdmaSchedule& schedule, uint64_t seed,
                          const ClockModel& clock = {});

}  // namespace magtrack
