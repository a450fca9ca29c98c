#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "magtrack/calibration.hpp"
#include "magtrack/evaluation.hpp"
#include "magtrack/simulation.hpp"

namespace magtrack {

/// File parse failure carrying the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Raw sample stream: header "timestamp_ms,coil_id,strength".
void write_samples_csv(const std::filesystem::path& path,
                       std::span<const RawSample> samples);
std::vector<RawSample> read_samples_csv(const std::filesystem::path& path);

// Ground truth: header "timestamp_ms,x_m,y_m,z_m".
void write_truth_csv(const std::filesystem::path& path,
                     std::span<const TimedPoint> truth);
std::vector<TimedPoint> read_truth_csv(const std::filesystem::path& path);

// Estimates: header "timestamp_ms,x_m,y_m,z_m,residual_rms_m,converged".
void write_estimates_csv(const std::filesystem::path& path,
                         std::span<const PositionEstimate> estimates);
std::vector<PositionEstimate> read_estimates_csv(const std::filesystem::path& path);

// Calibration pair dataset: header "coil_id,strength,distance_m".
void write_calibration_pairs_csv(
    const std::filesystem::path& path,
    const std::map<int, std::vector<CalibrationPair>>& pairs_by_coil);
std::map<int, std::vector<CalibrationPair>> read_calibration_pairs_csv(
    const std::filesystem::path& path);

// Calibration document: top-level object keyed by coil id, each entry holding
// a, b, rms, r2.
void write_calibration_json(const std::filesystem::path& path,
                            const CalibrationModel& model);
CalibrationModel read_calibration_json(const std::filesystem::path& path);

// Scenario document: name, coil drive, transmitter poses (position + normal),
// workspace box, truth noise.
void write_scenario_json(const std::filesystem::path& path, const Scenario& s);
Scenario read_scenario_json(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace magtrack
