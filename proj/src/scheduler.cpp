#include "magtrack/scheduler.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace magtrack {

void TdmaSchedule::validate() const {
  if (n_coils < 1) throw std::invalid_argument("schedule needs >= 1 coil");
  if (!(activation_ms > 0.0) || !(activation_ms <= window_ms))
    throw std::invalid_argument("need 0 < activation_ms <= window_ms");
  if (!(adc_rate_hz > 0.0))
    throw std::invalid_argument("adc rate must be positive");
  if (steady_skip_ms < 0.0 || trailing_skip_ms < 0.0 ||
      steady_skip_ms + trailing_skip_ms >= activation_ms)
    throw std::invalid_argument("skips must leave a nonempty averaging interval");
}

double effective_offset_ms(const ClockModel& clock, double t_true_ms) {
  const double drift = clock.drift_ppm * 1e-6;
  if (clock.resync_interval_ms > 0.0 && t_true_ms >= clock.resync_interval_ms) {
    const double since = std::fmod(t_true_ms, clock.resync_interval_ms);
    return clock.resync_jitter_ms + drift * since;
  }
  return clock.offset_ms + drift * t_true_ms;
}

ClockModel apply_resync(const ClockModel& clock, double /*t_ms*/) {
  ClockModel next = clock;
  next.offset_ms = clock.resync_jitter_ms;
  return next;
}

std::optional<int> active_coil_at(const TdmaSchedule& schedule, double t_ms) {
  schedule.validate();
  if (t_ms < 0.0) throw std::invalid_argument("time must be >= 0");
  const double in_cycle = std::fmod(t_ms, schedule.cycle_ms());
  const int window = static_cast<int>(in_cycle / schedule.window_ms);
  const double in_window = in_cycle - window * schedule.window_ms;
  if (in_window < schedule.activation_ms)
    return std::min(window, schedule.n_coils - 1);
  return std::nullopt;
}

FrameStream assemble_frames(std::span<const RawSample> samples,
                            const TdmaSchedule& schedule,
                            const ClockModel& clock) {
  schedule.validate();
  FrameStream out;
  const double cycle = schedule.cycle_ms();
  const double lo = schedule.steady_skip_ms;
  const double hi = schedule.activation_ms - schedule.trailing_skip_ms;

  struct Acc {
    std::vector<double> sum;
    std::vector<int> count;
    bool suspect = false;
  };
  std::map<long long, Acc> cycles;

  for (const RawSample& s : samples) {
    if (s.timestamp_ms < 0.0) continue;
    const double in_cycle = std::fmod(s.timestamp_ms, cycle);
    const long long cycle_idx =
        static_cast<long long>((s.timestamp_ms - in_cycle) / cycle + 0.5);
    const int window = static_cast<int>(in_cycle / schedule.window_ms);
    const double in_window = in_cycle - window * schedule.window_ms;
    if (window >= schedule.n_coils || in_window < lo || in_window >= hi) {
      ++out.guard_samples;
      continue;
    }
    if (s.coil_id >= 0 && s.coil_id != window) ++out.label_mismatches;
    auto& acc = cycles[cycle_idx];
    if (acc.sum.empty()) {
      acc.sum.assign(schedule.n_coils, 0.0);
      acc.count.assign(schedule.n_coils, 0);
    }
    acc.sum[window] += static_cast<double>(s.strength);
    acc.count[window] += 1;
    ++out.used_samples;
  }

  for (auto& [cycle_idx, acc] : cycles) {
    Frame f;
    f.timestamp_ms = static_cast<double>(cycle_idx) * cycle;
    f.strengths.assign(schedule.n_coils, 0.0);
    f.present.assign(schedule.n_coils, false);
    f.complete = true;
    for (int w = 0; w < schedule.n_coils; ++w) {
      if (acc.count[w] > 0) {
        f.strengths[w] = acc.sum[w] / acc.count[w];
        f.present[w] = true;
      } else {
        f.complete = false;
      }
    }
    // Flag frames where the modeled clock error exceeds what the guard can
    // absorb; attribution may be wrong even though assembly proceeded.
    const double off = std::abs(effective_offset_ms(clock, f.timestamp_ms));
    if (off > schedule.guard_ms()) {
      f.sync_suspect = true;
      ++out.sync_suspect_frames;
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace magtrack
