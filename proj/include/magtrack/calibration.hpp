#pragma once

#include <map>
#include <span>
#include <vector>

#include "magtrack/scheduler.hpp"

namespace magtrack {

/// One calibration observation: rectified strength with the ground-truth
/// distance to the coil at the moment it was sampled.
struct CalibrationPair {
  double strength = 0.0;
  double distance_m = 0.0;
};

/// Linear strength-to-distance map for one coil, distance = a*strength + b,
/// with fit diagnostics.
struct CoilCalibration {
  double a = 0.0;  // meters per count; negative, strength falls with distance
  double b = 0.0;  // meters
  double residual_rms = 0.0;
  double r2 = 0.0;
};

/// Per-coil calibration records keyed by coil id.
struct CalibrationModel {
  std::map<int, CoilCalibration> coils;

  bool fitted(int coil_id) const { return coils.count(coil_id) > 0; }
};

/// Ordinary least squares with distance as the dependent variable. Throws on
/// fewer than two pairs or on degenerate (all-equal) strengths.
CoilCalibration fit_linear(std::span<const CalibrationPair> pairs);

/// Minimum distance the linear map is allowed to report.
inline constexpr double kMinEstimatedDistanceM = 0.01;

/// a*strength + b, clamped below at kMinEstimatedDistanceM. Throws if the
/// coil has no calibration record.
double estimate_distance(const CalibrationModel& model, int coil_id,
                         double strength);

/// Per-coil distance estimates for one frame.
struct DistanceVector {
  std::vector<double> distances_m;
  std::vector<bool> valid;

  size_t valid_count() const {
    size_t n = 0;
    for (bool v : valid) n += v ? 1 : 0;
    return n;
  }
};

/// Maps a complete frame through the calibration. Readings pinned at the ADC
/// rails carry no distance information and are marked invalid. Incomplete
/// frames are rejected.
DistanceVector frame_to_distances(const CalibrationModel& model,
                                  const Frame& frame,
                                  uint32_t adc_max_code = (1u << 24) - 1u);

}  // namespace magtrack
