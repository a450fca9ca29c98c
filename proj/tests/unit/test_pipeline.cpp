#include <doctest.h>

#include <cmath>

#include "magtrack/pipeline.hpp"
#include "support/scenarios.hpp"

using namespace magtrack;

namespace {

RunConfig quiet_far_ring(uint64_t seed, double duration_s) {
  RunConfig cfg;
  cfg.scenario = testsupport::far_ring_scenario();
  cfg.schedule = testsupport::precision_schedule();
  cfg.receiver.noise_sigma_db = 0.0;
  cfg.seed = seed;
  cfg.duration_s = duration_s;
  cfg.trajectory.target_speed_mps = 0.04;
  return cfg;
}

}  // namespace

TEST_CASE("noise-free narrow-band calibration fits with R2 >= 0.999") {
  const RunConfig cfg = quiet_far_ring(301, 90.0);
  const SimulatedRun run = simulate(cfg);
  const auto model = build_calibration(run.frames.frames, run.truth_clean,
                                       cfg.scenario.beacons(), cfg.schedule);
  REQUIRE(model.coils.size() == 6);
  for (const auto& [coil_id, fit] : model.coils) {
    CAPTURE(coil_id);
    CHECK(fit.r2 >= 0.999);
    CHECK(fit.a < 0.0);  // strength falls with distance
  }
}

TEST_CASE("noise-free round trip: estimated distances track true distances") {
  const RunConfig cfg = quiet_far_ring(313, 60.0);
  const SimulatedRun run = simulate(cfg);
  const auto beacons = cfg.scenario.beacons();
  const auto model = build_calibration(run.frames.frames, run.truth_clean,
                                       beacons, cfg.schedule);
  double abs_err_sum = 0.0;
  size_t n = 0;
  const double center = 0.5 * (cfg.schedule.steady_skip_ms +
                               cfg.schedule.activation_ms -
                               cfg.schedule.trailing_skip_ms);
  for (const Frame& f : run.frames.frames) {
    if (!f.complete) continue;
    const auto dv = frame_to_distances(model, f);
    for (int w = 0; w < 6; ++w) {
      const double t = f.timestamp_ms + w * cfg.schedule.window_ms + center;
      const double true_d =
          (interpolate_truth(run.truth_clean, t) - beacons.beacons[w].position)
              .norm();
      abs_err_sum += std::abs(dv.distances_m[w] - true_d);
      ++n;
    }
  }
  REQUIRE(n > 1000);
  CHECK(abs_err_sum / n < 0.01);
}

TEST_CASE("stock-noise dwell sweep calibrates with R2 >= 0.95") {
  RunConfig cfg;
  cfg.scenario = builtin_scenario("whiteboard");
  cfg.seed = 77;
  cfg.duration_s = 300.0;
  cfg.trajectory.target_speed_mps = 0.06;  // slow sweep with dwell averaging
  const SimulatedRun run = simulate(cfg);
  // Five-frame dwell blocks per pair, the sweep-protocol default.
  const auto model =
      build_calibration(run.frames.frames, run.truth_noisy,
                        cfg.scenario.beacons(), cfg.schedule, (1u << 24) - 1, 5);
  for (const auto& [coil_id, fit] : model.coils) {
    CAPTURE(coil_id);
    CHECK(fit.r2 >= 0.95);
  }
}

TEST_CASE("calibration names the coil when coverage is missing") {
  const RunConfig cfg = quiet_far_ring(12, 30.0);
  SimulatedRun run = simulate(cfg);
  // Drop every sample of coil 3's window.
  std::vector<RawSample> filtered;
  for (const auto& s : run.samples)
    if (s.coil_id != 3) filtered.push_back(s);
  const auto frames = assemble_frames(filtered, cfg.schedule, cfg.clock);
  try {
    build_calibration(frames.frames, run.truth_clean, cfg.scenario.beacons(),
                      cfg.schedule);
    FAIL("expected a coverage error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("coil 3") != std::string::npos);
  }
}

TEST_CASE("smoothing with window 5 does not hurt a stock-noise run") {
  RunConfig cfg;
  cfg.scenario = builtin_scenario("whiteboard");
  cfg.seed = 402;
  cfg.duration_s = 240.0;
  cfg.trajectory.target_speed_mps = 0.05;  // slow: noise dominates smear
  const SimulatedRun run = simulate(cfg);
  const auto beacons = cfg.scenario.beacons();
  const auto model = build_calibration(run.frames.frames, run.truth_noisy,
                                       beacons, cfg.schedule);
  const auto w1 = track(run.frames.frames, model, beacons, 1);
  const auto w5 = track(run.frames.frames, model, beacons, 5);
  const double tol = cfg.schedule.cycle_ms() / 2.0;
  const auto r1 = evaluate(w1, run.truth_clean, tol);
  const auto r5 = evaluate(w5, run.truth_clean, tol);
  CHECK(r5.mae_m.x <= r1.mae_m.x);
  CHECK(r5.mae_m.y <= r1.mae_m.y);
  CHECK(r5.mae_m.z <= r1.mae_m.z);
}

TEST_CASE("range test: monotone decay, identical coils, signal at 2 m") {
  const CoilSpec coil;
  const ReceiverSpec receiver;
  const auto result = range_test(coil, receiver, 2, 0.1, 2.5, 49);
  REQUIRE(result.distances_m.size() == 49);
  REQUIRE(result.strengths.size() == 2);
  bool at_floor = false;
  for (size_t i = 0; i + 1 < result.distances_m.size(); ++i) {
    const uint32_t cur = result.strengths[0][i];
    const uint32_t nxt = result.strengths[0][i + 1];
    if (nxt == 0u) at_floor = true;
    if (!at_floor) CHECK(nxt < cur);  // strictly decreasing until the floor
  }
  CHECK(result.strengths[0] == result.strengths[1]);
  // Usable signal out to 2 m.
  for (size_t i = 0; i < result.distances_m.size(); ++i)
    if (result.distances_m[i] <= 2.0) CHECK(result.strengths[0][i] > 100000u);

  const std::string csv = range_test_to_csv(result);
  CHECK(csv.rfind("distance_m,coil_0,coil_1\n", 0) == 0);
}

TEST_CASE("truth interpolation is exact on linear motion") {
  std::vector<TimedPoint> truth;
  for (int i = 0; i <= 10; ++i)
    truth.push_back({i * 100.0, {0.01 * i, -0.02 * i, 0.5}});
  const Vec3 p = interpolate_truth(truth, 250.0);
  CHECK(p.x == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(interpolate_truth(truth, -5.0).x == 0.0);
  CHECK(interpolate_truth(truth, 5000.0).x == doctest::Approx(0.1));
}

TEST_CASE("scenario resolution: builtin, file, unknown") {
  CHECK(resolve_scenario("table").name == "table");
  const auto dir = std::filesystem::temp_directory_path() / "magtrack_scn";
  std::filesystem::create_directories(dir);
  const auto path = dir / "custom.json";
  Scenario custom = testsupport::far_ring_scenario();
  write_scenario_json(path, custom);
  const Scenario loaded = resolve_scenario(path.string());
  CHECK(loaded.name == "far_ring");
  REQUIRE(loaded.transmitters.size() == 6);
  CHECK((loaded.transmitters[2].position - custom.transmitters[2].position).norm() <
        1e-12);
  // Orientation survives the position+normal encoding.
  CHECK((loaded.transmitters[2].normal() - custom.transmitters[2].normal()).norm() <
        1e-9);
  CHECK_THROWS_AS(resolve_scenario("garage"), std::out_of_range);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dilution CSV lists every layout and axis") {
  std::vector<LayoutDilution> rows;
  rows.push_back({"whiteboard",
                  geometry_quality(builtin_scenario("whiteboard").beacons(),
                                   builtin_scenario("whiteboard").workspace, 3)});
  const std::string csv = dilution_to_csv(rows);
  CHECK(csv.rfind("scenario,axis,mean_amplification,max_amplification,degenerate\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("batch over the five deployments: waist_v3 is worst on Z") {
  const TdmaSchedule schedule;
  const ReceiverSpec receiver;
  std::vector<ErrorReport> reports;
  int i = 0;
  for (const char* name :
       {"whiteboard", "table", "shelf", "waist_chest", "waist_v3"}) {
    const Scenario scenario = builtin_scenario(name);
    const auto beacons = scenario.beacons();
    const Trajectory cal_traj = generate_trajectory(scenario, 90.0, 900 + i);
    const auto cal_run = simulate_run(scenario, cal_traj, receiver, schedule, 70);
    const auto model = build_calibration(cal_run.frames.frames,
                                         cal_run.truth_noisy, beacons, schedule);
    const Trajectory traj = generate_trajectory(scenario, 120.0, 800 + i);
    const auto run = simulate_run(scenario, traj, receiver, schedule, 71);
    const auto estimates = track(run.frames.frames, model, beacons, 5);
    reports.push_back(evaluate(estimates, run.truth_noisy,
                               schedule.cycle_ms() / 2.0, name));
    ++i;
  }
  REQUIRE(reports.size() == 5);
  const std::string csv = reports_to_csv(reports);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);  // header + 5*3
  for (size_t k = 0; k + 1 < reports.size(); ++k)
    CHECK(reports.back().mae_m.z > reports[k].mae_m.z);
}
