#include "magtrack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace magtrack {

SimulatedRun simulate(const RunConfig& config) {
  const Trajectory traj = generate_trajectory(config.scenario, config.duration_s,
                                              config.seed, config.trajectory);
  return simulate_run(config.scenario, traj, config.receiver, config.schedule,
                      config.seed, config.clock);
}

Vec3 interpolate_truth(std::span<const TimedPoint> truth, double t_ms) {
  if (truth.empty()) throw std::invalid_argument("empty truth stream");
  if (t_ms <= truth.front().timestamp_ms) return truth.front().position;
  if (t_ms >= truth.back().timestamp_ms) return truth.back().position;
  const auto it = std::lower_bound(
      truth.begin(), truth.end(), t_ms,
      [](const TimedPoint& p, double t) { return p.timestamp_ms < t; });
  const auto hi = it;
  const auto lo = it - 1;
  const double span = hi->timestamp_ms - lo->timestamp_ms;
  if (span <= 0.0) return lo->position;
  const double u = (t_ms - lo->timestamp_ms) / span;
  return lo->position + u * (hi->position - lo->position);
}

CalibrationModel build_calibration(std::span<const Frame> frames,
                                   std::span<const TimedPoint> truth,
                                   const BeaconSet& beacons,
                                   const TdmaSchedule& schedule,
                                   uint32_t adc_max_code, int frames_per_pair) {
  schedule.validate();
  if (static_cast<int>(beacons.size()) != schedule.n_coils)
    throw std::invalid_argument("beacon count does not match schedule");
  if (frames_per_pair < 1)
    throw std::invalid_argument("frames_per_pair must be >= 1");

  // Strengths are averaged over [steady_skip, activation - trailing_skip) of
  // each window; pair them with truth at that interval's center.
  const double center_in_window =
      0.5 * (schedule.steady_skip_ms +
             (schedule.activation_ms - schedule.trailing_skip_ms));

  struct Block {
    double strength_sum = 0.0;
    double distance_sum = 0.0;
    int count = 0;
  };
  std::map<int, std::vector<CalibrationPair>> pairs;
  std::map<int, Block> blocks;
  for (const Frame& frame : frames) {
    if (frame.sync_suspect) continue;
    for (int w = 0; w < schedule.n_coils; ++w) {
      if (!frame.present[w]) continue;
      const double s = frame.strengths[w];
      if (s <= 0.0 || s >= static_cast<double>(adc_max_code)) continue;
      const double t = frame.timestamp_ms + w * schedule.window_ms + center_in_window;
      const Vec3 p = interpolate_truth(truth, t);
      Block& block = blocks[w];
      block.strength_sum += s;
      block.distance_sum += (p - beacons.beacons[w].position).norm();
      if (++block.count == frames_per_pair) {
        pairs[w].push_back({block.strength_sum / block.count,
                            block.distance_sum / block.count});
        block = Block{};
      }
    }
  }

  CalibrationModel model;
  for (int w = 0; w < schedule.n_coils; ++w) {
    const auto& coil_pairs = pairs[w];
    std::set<double> distinct;
    for (const auto& p : coil_pairs) distinct.insert(p.strength);
    if (distinct.size() < 2)
      throw std::runtime_error("insufficient calibration coverage for coil " +
                               std::to_string(w));
    model.coils[w] = fit_linear(coil_pairs);
  }
  return model;
}

std::vector<PositionEstimate> track(std::span<const Frame> frames,
                                    const CalibrationModel& model,
                                    const BeaconSet& beacons,
                                    int smoothing_window,
                                    uint32_t adc_max_code) {
  std::vector<std::pair<double, DistanceVector>> stream;
  stream.reserve(frames.size());
  for (const Frame& frame : frames) {
    DistanceVector dv;
    if (frame.complete) {
      dv = frame_to_distances(model, frame, adc_max_code);
    } else {
      // All-invalid marker; the solver rejects it and the estimate row is
      // emitted flagged.
      dv.distances_m.assign(beacons.size(), 0.0);
      dv.valid.assign(beacons.size(), false);
    }
    stream.emplace_back(frame.timestamp_ms, std::move(dv));
  }
  const auto solved = solve_stream(beacons, stream);
  return smooth_trajectory(solved, smoothing_window);
}

ErrorReport evaluate(std::span<const PositionEstimate> estimates,
                     std::span<const TimedPoint> truth, double tolerance_ms,
                     const std::string& scenario_name) {
  std::vector<PositionEstimate> converged;
  for (const auto& e : estimates)
    if (e.converged) converged.push_back(e);
  const auto aligned = align_streams(converged, truth, tolerance_ms);
  return compute_errors(aligned.pairs, scenario_name);
}

RangeTestResult range_test(const CoilSpec& coil, const ReceiverSpec& receiver,
                           int n_coils, double min_m, double max_m, int steps) {
  coil.validate();
  receiver.validate();
  if (n_coils < 1) throw std::invalid_argument("need >= 1 coil");
  if (!(min_m > coil.radius_m) || !(max_m > min_m) || steps < 2)
    throw std::invalid_argument("bad sweep range");

  ReceiverSpec quiet = receiver;
  quiet.noise_sigma_db = 0.0;  // the sweep characterizes the clean decay

  RangeTestResult result;
  result.strengths.assign(n_coils, {});
  Pose pose;  // coil at origin, normal +z; receiver walks out the axis
  for (int i = 0; i < steps; ++i) {
    const double d = min_m + (max_m - min_m) * i / (steps - 1);
    result.distances_m.push_back(d);
    for (int c = 0; c < n_coils; ++c)
      result.strengths[c].push_back(measure(pose, coil, Vec3{0, 0, d}, quiet, 0));
  }
  return result;
}

std::string range_test_to_csv(const RangeTestResult& result) {
  std::string out = "distance_m";
  for (size_t c = 0; c < result.strengths.size(); ++c)
    out += ",coil_" + std::to_string(c);
  out += "\n";
  char buf[64];
  for (size_t i = 0; i < result.distances_m.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f", result.distances_m[i]);
    out += buf;
    for (const auto& column : result.strengths) {
      std::snprintf(buf, sizeof buf, ",%u", column[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string dilution_to_csv(std::span<const LayoutDilution> layouts) {
  std::string out = "scenario,axis,mean_amplification,max_amplification,degenerate\n";
  char line[160];
  for (const auto& l : layouts) {
    const char* axes[3] = {"x", "y", "z"};
    const double mean[3] = {l.report.mean_amplification.x,
                            l.report.mean_amplification.y,
                            l.report.mean_amplification.z};
    const double peak[3] = {l.report.max_amplification.x,
                            l.report.max_amplification.y,
                            l.report.max_amplification.z};
    for (int a = 0; a < 3; ++a) {
      std::snprintf(line, sizeof line, "%s,%s,%.4f,%.4f,%d\n", l.name.c_str(),
                    axes[a], mean[a], peak[a], l.report.degenerate ? 1 : 0);
      out += line;
    }
  }
  return out;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end())
    return builtin_scenario(name_or_path);
  if (std::filesystem::exists(name_or_path))
    return read_scenario_json(name_or_path);
  throw std::out_of_range("unknown scenario '" + name_or_path +
                          "' (not a builtin name or an existing file)");
}

}  // namespace magtrack
