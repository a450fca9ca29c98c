// magtrack: simulate, calibrate, track, and evaluate an oscillating-magnetic-
// field positioning pipeline from the command line. CSV files are the
// interchange format between subcommands.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magtrack/pipeline.hpp"

namespace fs = std::filesystem;
using namespace magtrack;

namespace {

struct CommonFlags {
  std::string scenario = "whiteboard";
  uint64_t seed = 1;
  double duration_s = 60.0;
  double noise_sigma_db = -1.0;   // <0: keep receiver default
  double truth_noise_m = -1.0;    // <0: keep scenario default
  double target_speed = 0.28;
  double max_speed = 1.5;
  double activation_ms = 50.0;
  double window_ms = 70.0;
  double adc_rate_hz = 166.7;
  double steady_skip_ms = 10.0;
  double trailing_skip_ms = 10.0;
  double clock_offset_ms = 0.0;
  double drift_ppm = 0.0;
  double resync_interval_ms = 0.0;
  double resync_jitter_ms = 0.0;
};

void add_schedule_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--activation-ms", f.activation_ms, "Coil on-time per window");
  cmd->add_option("--window-ms", f.window_ms, "TDMA window length");
  cmd->add_option("--adc-rate", f.adc_rate_hz, "Receiver ADC rate, Hz");
  cmd->add_option("--steady-skip-ms", f.steady_skip_ms,
                  "Head of activation excluded from averaging");
  cmd->add_option("--trailing-skip-ms", f.trailing_skip_ms,
                  "Tail of activation excluded from averaging");
}

TdmaSchedule schedule_from(const CommonFlags& f, int n_coils) {
  TdmaSchedule s;
  s.n_coils = n_coils;
  s.activation_ms = f.activation_ms;
  s.window_ms = f.window_ms;
  s.adc_rate_hz = f.adc_rate_hz;
  s.steady_skip_ms = f.steady_skip_ms;
  s.trailing_skip_ms = f.trailing_skip_ms;
  s.validate();
  return s;
}

RunConfig config_from(const CommonFlags& f) {
  RunConfig cfg;
  cfg.scenario = resolve_scenario(f.scenario);
  cfg.schedule = schedule_from(f, static_cast<int>(cfg.scenario.transmitters.size()));
  cfg.seed = f.seed;
  cfg.duration_s = f.duration_s;
  cfg.trajectory.target_speed_mps = f.target_speed;
  cfg.trajectory.max_speed_mps = f.max_speed;
  if (f.noise_sigma_db >= 0.0) cfg.receiver.noise_sigma_db = f.noise_sigma_db;
  if (f.truth_noise_m >= 0.0) cfg.scenario.truth_noise_sigma_m = f.truth_noise_m;
  cfg.clock.offset_ms = f.clock_offset_ms;
  cfg.clock.drift_ppm = f.drift_ppm;
  cfg.clock.resync_interval_ms = f.resync_interval_ms;
  cfg.clock.resync_jitter_ms = f.resync_jitter_ms;
  return cfg;
}

int cmd_simulate(const CommonFlags& f, const std::string& out_dir) {
  const RunConfig cfg = config_from(f);
  const SimulatedRun run = simulate(cfg);
  fs::create_directories(out_dir);
  write_samples_csv(fs::path(out_dir) / "samples.csv", run.samples);
  write_truth_csv(fs::path(out_dir) / "truth.csv", run.truth_noisy);
  write_truth_csv(fs::path(out_dir) / "truth_clean.csv", run.truth_clean);
  size_t complete = 0;
  for (const auto& fr : run.frames.frames) complete += fr.complete ? 1 : 0;
  std::printf("scenario=%s seed=%llu duration_s=%.1f samples=%zu frames=%zu "
              "complete=%zu floor_saturated=%zu\n",
              cfg.scenario.name.c_str(), static_cast<unsigned long long>(cfg.seed),
              cfg.duration_s, run.samples.size(), run.frames.frames.size(),
              complete, run.floor_saturated_samples);
  return 0;
}

int cmd_calibrate(const CommonFlags& f, const std::string& samples_path,
                  const std::string& truth_path, const std::string& pairs_path,
                  const std::string& out_path) {
  CalibrationModel model;
  if (!pairs_path.empty()) {
    for (const auto& [coil_id, pairs] : read_calibration_pairs_csv(pairs_path))
      model.coils[coil_id] = fit_linear(pairs);
  } else {
    const Scenario scenario = resolve_scenario(f.scenario);
    const auto schedule =
        schedule_from(f, static_cast<int>(scenario.transmitters.size()));
    const auto samples = read_samples_csv(samples_path);
    const auto truth = read_truth_csv(truth_path);
    const auto frames = assemble_frames(samples, schedule, ClockModel{});
    model = build_calibration(frames.frames, truth, scenario.beacons(), schedule);
  }
  write_calibration_json(out_path, model);
  std::printf("coil        a              b         rms      r2\n");
  for (const auto& [coil_id, fit] : model.coils)
    std::printf("%4d  %13.6e  %9.4f  %8.4f  %6.4f\n", coil_id, fit.a, fit.b,
                fit.residual_rms, fit.r2);
  return 0;
}

int cmd_track(const CommonFlags& f, const std::string& samples_path,
              const std::string& calibration_path, int window,
              const std::string& out_path) {
  const Scenario scenario = resolve_scenario(f.scenario);
  const auto schedule =
      schedule_from(f, static_cast<int>(scenario.transmitters.size()));
  const auto samples = read_samples_csv(samples_path);
  const auto model = read_calibration_json(calibration_path);
  const auto frames = assemble_frames(samples, schedule, ClockModel{});
  const auto estimates = track(frames.frames, model, scenario.beacons(), window);
  write_estimates_csv(out_path, estimates);
  size_t converged = 0;
  for (const auto& e : estimates) converged += e.converged ? 1 : 0;
  std::printf("frames=%zu solved=%zu window=%d -> %s\n", estimates.size(),
              converged, window, out_path.c_str());
  return 0;
}

int cmd_evaluate(const std::string& estimates_path, const std::string& truth_path,
                 const std::string& scenario_name, double tolerance_ms,
                 const std::string& out_path, const std::string& format) {
  const auto estimates = read_estimates_csv(estimates_path);
  const auto truth = read_truth_csv(truth_path);
  const ErrorReport report =
      evaluate(estimates, truth, tolerance_ms, scenario_name);
  const std::vector<ErrorReport> reports{report};
  const std::string text =
      format == "json" ? reports_to_json(reports) : reports_to_csv(reports);
  if (!out_path.empty()) write_text_file(out_path, text);
  std::printf("%s", text.c_str());
  return 0;
}

int cmd_range_test(double min_m, double max_m, int steps, int n_coils,
                   const std::string& out_path) {
  CoilSpec coil;  // stock drive
  ReceiverSpec receiver;
  const auto result = range_test(coil, receiver, n_coils, min_m, max_m, steps);
  const std::string text = range_test_to_csv(result);
  if (!out_path.empty()) write_text_file(out_path, text);
  else std::printf("%s", text.c_str());
  return 0;
}

int cmd_geometry_study(const std::vector<std::string>& layouts, int grid,
                       const std::string& out_path) {
  std::vector<LayoutDilution> results;
  for (const auto& name : layouts) {
    const Scenario s = resolve_scenario(name);
    results.push_back({s.name, geometry_quality(s.beacons(), s.workspace, grid)});
  }
  const std::string text = dilution_to_csv(results);
  if (!out_path.empty()) write_text_file(out_path, text);
  std::printf("%s", text.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscillating-magnetic-field 3D tracking toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir = "out";
  std::string samples_path, truth_path, calibration_path, estimates_path;
  std::string pairs_path;
  std::string out_path, format = "csv", scenario_name;
  int window = 5;
  double tolerance_ms = 210.0;
  double min_m = 0.1, max_m = 2.5;
  int steps = 49, n_coils = 1, grid = 5;
  std::vector<std::string> layouts;

  auto* sim = app.add_subcommand("simulate", "Generate a dataset for a scenario");
  sim->add_option("--scenario", flags.scenario, "Builtin name or scenario JSON");
  sim->add_option("--seed", flags.seed, "Run seed");
  sim->add_option("--duration-s", flags.duration_s, "Run length, seconds");
  sim->add_option("--noise-sigma", flags.noise_sigma_db, "Receiver noise, dB");
  sim->add_option("--truth-noise", flags.truth_noise_m,
                  "Reference-system noise, meters");
  sim->add_option("--target-speed", flags.target_speed, "Cruise speed, m/s");
  sim->add_option("--max-speed", flags.max_speed, "Speed cap, m/s");
  sim->add_option("--out-dir", out_dir, "Output directory");
  sim->add_option("--clock-offset-ms", flags.clock_offset_ms, "Initial offset");
  sim->add_option("--drift-ppm", flags.drift_ppm, "Clock drift");
  sim->add_option("--resync-ms", flags.resync_interval_ms, "Resync interval");
  sim->add_option("--resync-jitter-ms", flags.resync_jitter_ms, "Post-resync offset");
  add_schedule_flags(sim, flags);

  auto* cal = app.add_subcommand("calibrate", "Fit strength-to-distance maps");
  auto* cal_samples = cal->add_option("--samples", samples_path, "samples.csv");
  auto* cal_truth = cal->add_option("--truth", truth_path, "truth.csv");
  auto* cal_pairs = cal->add_option(
      "--pairs", pairs_path, "Pre-built coil_id,strength,distance_m dataset");
  cal_samples->needs(cal_truth);
  cal_pairs->excludes(cal_samples);
  cal->add_option("--layout,--scenario", flags.scenario, "Coil layout");
  cal->add_option("--out", out_path, "calibration.json")->required();
  add_schedule_flags(cal, flags);

  auto* trk = app.add_subcommand("track", "Solve positions from samples");
  trk->add_option("--samples", samples_path, "samples.csv")->required();
  trk->add_option("--calibration", calibration_path, "calibration.json")->required();
  trk->add_option("--layout,--scenario", flags.scenario, "Coil layout");
  trk->add_option("--window", window, "Smoothing window, frames");
  trk->add_option("--out", out_path, "estimates.csv")->required();
  add_schedule_flags(trk, flags);

  auto* ev = app.add_subcommand("evaluate", "Per-axis MAE(Std) vs ground truth");
  ev->add_option("--estimates", estimates_path, "estimates.csv")->required();
  ev->add_option("--truth", truth_path, "truth.csv")->required();
  ev->add_option("--scenario-name", scenario_name, "Label for the report");
  ev->add_option("--tolerance-ms", tolerance_ms, "Alignment tolerance");
  ev->add_option("--out", out_path, "Report file");
  ev->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* rt = app.add_subcommand("range-test", "Strength-vs-distance sweep");
  rt->add_option("--min-m", min_m, "Sweep start, meters");
  rt->add_option("--max-m", max_m, "Sweep end, meters");
  rt->add_option("--steps", steps, "Sweep points");
  rt->add_option("--n-coils", n_coils, "Coils to sweep");
  rt->add_option("--out", out_path, "Output CSV");

  auto* gs = app.add_subcommand("geometry-study", "Axis noise amplification");
  gs->add_option("--layout", layouts, "Layouts to study")->required();
  gs->add_option("--grid", grid, "Grid points per axis");
  gs->add_option("--out", out_path, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags, out_dir);
    if (cal->parsed()) {
      if (pairs_path.empty() && (samples_path.empty() || truth_path.empty()))
        throw std::out_of_range("calibrate needs --pairs or --samples with --truth");
      return cmd_calibrate(flags, samples_path, truth_path, pairs_path, out_path);
    }
    if (trk->parsed())
      return cmd_track(flags, samples_path, calibration_path, window, out_path);
    if (ev->parsed())
      return cmd_evaluate(estimates_path, truth_path, scenario_name, tolerance_ms,
                          out_path, format);
    if (rt->parsed())
      return cmd_range_test(min_m, max_m, steps, n_coils, out_path);
    if (gs->parsed()) return cmd_geometry_study(layouts, grid, out_path);
  } catch (const std::out_of_range& e) {
    // Unknown scenario or coil id: a usage problem, not a runtime failure.
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "usage: run with --help for details\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
