#pragma once

#include <optional>
#include <span>
#include <vector>

#include "magtrack/receiver_model.hpp"

namespace magtrack {

/// Time-division activation plan: each coil drives for activation_ms at the
/// head of its window_ms slot; the remainder is the guard interval that
/// absorbs clock error. adc_rate_hz is the receiver sampling rate.
struct TdmaSchedule {
  int n_coils = 6;
  double activation_ms = 50.0;
  double window_ms = 70.0;
  double adc_rate_hz = 166.7;
  /// Samples inside [steady_skip, activation - trailing_skip) of a window are
  /// averaged into the frame entry. The head skip models LC ring-up; the tail
  /// skip keeps the averaging interval inside the activation for clock error
  /// up to half the guard in either direction.
  double steady_skip_ms = 10.0;
  double trailing_skip_ms = 10.0;

  void validate() const;

  double cycle_ms() const { return n_coils * window_ms; }
  double guard_ms() const { return window_ms - activation_ms; }
  double adc_period_ms() const { return 1000.0 / adc_rate_hz; }
};

/// One cycle's vector of per-coil strengths. timestamp_ms is the cycle start
/// on the receiver clock. Entries for coils with no usable samples are absent.
struct Frame {
  double timestamp_ms = 0.0;
  std::vector<double> strengths;  // mean ADC counts, one per coil
  std::vector<bool> present;
  bool complete = false;
  bool sync_suspect = false;
};

/// Receiver clock error relative to the transmitter time base. The offset
/// grows linearly with drift and is pulled back to resync_jitter_ms at every
/// resync boundary (resync_interval_ms == 0 disables resyncs).
struct ClockModel {
  double offset_ms = 0.0;
  double drift_ppm = 0.0;
  double resync_interval_ms = 0.0;
  double resync_jitter_ms = 0.0;
};

/// Receiver-clock minus true-time at true time t.
double effective_offset_ms(const ClockModel& clock, double t_true_ms);

/// Clock state just after a resync event at time t.
ClockModel apply_resync(const ClockModel& clock, double t_ms);

/// Index of the coil whose activation interval contains t, or nullopt during
/// a guard interval.
std::optional<int> active_coil_at(const TdmaSchedule& schedule, double t_ms);

/// Frames plus assembly diagnostics.
struct FrameStream {
  std::vector<Frame> frames;
  size_t used_samples = 0;
  size_t guard_samples = 0;
  /// Samples whose recorded coil label disagrees with the window implied by
  /// their own timestamp; nonzero values indicate sync loss upstream.
  size_t label_mismatches = 0;
  size_t sync_suspect_frames = 0;
};

/// Groups timestamped samples into frames using the receiver-clock schedule.
/// Samples must be timestamp-sorted. Frames overlapping times where the
/// model's effective offset exceeds the guard are flagged sync_suspect.
FrameStream assemble_frames(std::span<const RawSample> samples,
                            const TdmaSchedule& schedule,
                            const ClockModel& clock);

}  // namespace magtrack
