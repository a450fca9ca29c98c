#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "magtrack/csv_io.hpp"

namespace magtrack {

/// Everything one simulation run needs. Defaults reproduce the stock six-coil
/// deployment settings.
struct RunConfig {
  Scenario scenario;
  TdmaSchedule schedule;
  ReceiverSpec receiver;
  ClockModel clock;
  uint64_t seed = 1;
  double duration_s = 60.0;
  TrajectoryParams trajectory;
};

/// Generates the trajectory for this config's seed and simulates the run.
SimulatedRun simulate(const RunConfig& config);

/// Builds per-coil calibration pairs by interpolating ground truth at each
/// coil's averaging-interval center and fitting the linear strength-distance
/// map. frames_per_pair > 1 averages that many consecutive frames into one
/// pair (a dwell-style sweep protocol that suppresses receiver noise in the
/// pairs). Throws (naming the coil) when a coil lacks two distinct strengths.
CalibrationModel build_calibration(std::span<const Frame> frames,
                                   std::span<const TimedPoint> truth,
                                   const BeaconSet& beacons,
                                   const TdmaSchedule& schedule,
                                   uint32_t adc_max_code = (1u << 24) - 1u,
                                   int frames_per_pair = 1);

/// Frames -> distances -> multilateration -> smoothing. Incomplete frames
/// produce flagged (non-converged) estimates rather than aborting the stream.
std::vector<PositionEstimate> track(std::span<const Frame> frames,
                                    const CalibrationModel& model,
                                    const BeaconSet& beacons,
                                    int smoothing_window,
                                    uint32_t adc_max_code = (1u << 24) - 1u);

/// Aligns converged estimates to truth (nearest neighbor within tolerance)
/// and reports per-axis MAE(Std).
ErrorReport evaluate(std::span<const PositionEstimate> estimates,
                     std::span<const TimedPoint> truth, double tolerance_ms,
                     const std::string& scenario_name = "");

/// Strength-vs-distance sweep on each coil's axis with noise disabled.
struct RangeTestResult {
  std::vector<double> distances_m;
  std::vector<std::vector<uint32_t>> strengths;  // [coil][step]
};
RangeTestResult range_test(const CoilSpec& coil, const ReceiverSpec& receiver,
                           int n_coils, double min_m, double max_m, int steps);
std::string range_test_to_csv(const RangeTestResult& result);

/// Per-layout dilution study over the layout's workspace.
struct LayoutDilution {
  std::string name;
  DilutionReport report;
};
std::string dilution_to_csv(std::span<const LayoutDilution> layouts);

/// Resolves a builtin scenario name or a scenario JSON path.
Scenario resolve_scenario(const std::string& name_or_path);

/// Interpolated truth position at an arbitrary time (linear between samples).
Vec3 interpolate_truth(std::span<const TimedPoint> truth, double t_ms);

}  // namespace magtrack
