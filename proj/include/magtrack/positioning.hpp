#pragma once

#include <span>
#include <utility>
#include <vector>

#include "magtrack/calibration.hpp"
#include "magtrack/geometry.hpp"

namespace magtrack {

struct Beacon {
  int coil_id = 0;
  Vec3 position;
};

/// Known transmitter coil positions in the world frame.
struct BeaconSet {
  std::vector<Beacon> beacons;

  size_t size() const { return beacons.size(); }
  Vec3 centroid() const;

  /// Smallest singular value of the centered position matrix; near zero for
  /// coplanar layouts (the geometry that defeats range-only solving).
  double non_coplanarity() const;

  /// True when non_coplanarity() < threshold_ratio * largest singular value.
  bool degenerate(double threshold_ratio = 1e-6) const;
};

struct PositionEstimate {
  double timestamp_ms = 0.0;
  Vec3 position;
  double residual_rms_m = 0.0;
  int iterations = 0;
  bool converged = false;
  bool geometry_warning = false;
  /// Residual above the diagnostic threshold (0.5 m); the fix is still used.
  bool outlier = false;
};

struct SolverOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-9;
  double step_tol_m = 1e-10;
  double initial_damping = 1e-6;
  /// A converged fix whose residual RMS exceeds this is re-solved from a
  /// deterministic set of fallback starts (beacon centroid and inflated
  /// bounding-box corners) and the lowest-objective result wins; the threshold
  /// sits below the stock noise floor so noisy frames always cross-check. Guards
  /// against local minima far from the range surfaces; 0 disables.
  double multistart_residual_m = 0.02;
};

/// Minimizes sum_i (|p - p_i| - d_i)^2 over the valid distances with damped
/// Gauss-Newton. Needs >= 4 valid distances; a degenerate beacon geometry
/// sets geometry_warning but the solve is still attempted.
PositionEstimate multilaterate(const BeaconSet& beacons,
                               const DistanceVector& distances,
                               const Vec3& initial_guess,
                               const SolverOptions& options = {});

/// Per-frame solves over a distance stream. Each solve warm-starts from the
/// previous converged position, falling back to the beacon centroid. Frame
/// failures are flagged on the output estimate, never thrown.
std::vector<PositionEstimate> solve_stream(
    const BeaconSet& beacons,
    std::span<const std::pair<double, DistanceVector>> frames,
    const SolverOptions& options = {});

/// Centered moving average per axis, window truncated symmetrically at the
/// stream edges. Timestamps and flags pass through unchanged.
std::vector<PositionEstimate> smooth_trajectory(
    std::span<const PositionEstimate> estimates, int window);

/// Per-axis noise amplification of the linearized range solution.
struct DilutionReport {
  Vec3 mean_amplification;
  Vec3 max_amplification;
  bool degenerate = false;
};

/// Evaluates sqrt(diag((J^T J)^-1)) of the range Jacobian on a grid over the
/// region: the factor by which unit distance noise inflates each axis of the
/// solved position. Degenerate geometry reports infinite amplification.
DilutionReport geometry_quality(const BeaconSet& beacons, const Aabb& region,
                                int grid_per_axis = 5);

}  // namespace magtrack
