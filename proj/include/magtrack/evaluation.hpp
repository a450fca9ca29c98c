#pragma once

#include <span>
#include <string>
#include <vector>

#include "magtrack/positioning.hpp"
#include "magtrack/simulation.hpp"

namespace magtrack {

struct AlignedPair {
  double timestamp_ms = 0.0;
  Vec3 estimate;
  Vec3 truth;
};

struct AlignmentResult {
  std::vector<AlignedPair> pairs;
  size_t dropped_estimates = 0;
};

/// Matches each estimate to the nearest-in-time truth sample within
/// tolerance_ms; estimates without a match are dropped and counted. Both
/// streams must be timestamp-sorted. Throws when nothing matches.
AlignmentResult align_streams(std::span<const PositionEstimate> estimates,
                              std::span<const TimedPoint> truth,
                              double tolerance_ms);

/// Per-axis mean absolute error with the sample standard deviation of the
/// absolute errors (the MAE(Std) reporting convention).
struct ErrorReport {
  std::string scenario;
  Vec3 mae_m;
  Vec3 std_m;
  size_t count = 0;
};

ErrorReport compute_errors(std::span<const AlignedPair> pairs,
                           const std::string& scenario_name = "");

/// CSV with fixed header "scenario,axis,mae_m,std_m,n", one row per
/// (scenario, axis).
std::string reports_to_csv(std::span<const ErrorReport> reports);
std::vector<ErrorReport> reports_from_csv(const std::string& csv);

std::string reports_to_json(std::span<const ErrorReport> reports);
std::vector<ErrorReport> reports_from_json(const std::string& json_text);

}  // namespace magtrack
