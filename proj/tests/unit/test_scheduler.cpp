#include <doctest.h>

#include <cmath>
#include <vector>

#include "magtrack/scheduler.hpp"

using namespace magtrack;

namespace {

// Event-level sample generator: ADC ticks in true time, stamped with the
// receiver clock, strength identifying the truly active coil so frame
// contents can be compared across offsets.
std::vector<RawSample> synth_samples(const TdmaSchedule& s, const ClockModel& c,
                                     double duration_ms) {
  std::vector<RawSample> out;
  const double period = s.adc_period_ms();
  for (double t = 0.0; t < duration_ms; t += period) {
    const auto active = active_coil_at(s, t);
    const double stamp = t + effective_offset_ms(c, t);
    const auto believed = stamp >= 0.0 ? active_coil_at(s, stamp) : std::nullopt;
    RawSample sample;
    sample.timestamp_ms = stamp;
    sample.coil_id = believed.value_or(-1);
    sample.strength = active ? 1000u + static_cast<uint32_t>(*active) : 0u;
    out.push_back(sample);
  }
  return out;
}

}  // namespace

TEST_CASE("active coil follows the window plan") {
  const TdmaSchedule s;
  CHECK(active_coil_at(s, 100.0) == 1);   // 30 ms into window 1
  CHECK_FALSE(active_coil_at(s, 55.0));   // guard of window 0
  CHECK(active_coil_at(s, 420.0) == 0);   // next cycle wraps
  CHECK(active_coil_at(s, 0.0) == 0);
  CHECK(active_coil_at(s, 419.9999) == std::nullopt);
  CHECK(active_coil_at(s, 350.0) == 5);
  CHECK_THROWS_AS(active_coil_at(s, -1.0), std::invalid_argument);
}

TEST_CASE("zero clock error yields complete frames at the cycle rate") {
  const TdmaSchedule s;
  const ClockModel c;
  const auto samples = synth_samples(s, c, 10'000.0);
  const auto fs = assemble_frames(samples, s, c);
  // 10 s / 420 ms = 23.8 cycles; the 24th is partial.
  CHECK(fs.frames.size() >= 23);
  size_t complete = 0;
  for (const auto& f : fs.frames) complete += f.complete ? 1 : 0;
  CHECK(complete >= 23);
  CHECK(fs.label_mismatches == 0);
  CHECK(fs.sync_suspect_frames == 0);
  for (size_t i = 0; i + 1 < fs.frames.size(); ++i)
    CHECK(fs.frames[i + 1].timestamp_ms - fs.frames[i].timestamp_ms == 420.0);
  // Every coil entry carries that coil's marker strength.
  for (const auto& f : fs.frames)
    for (int w = 0; w < s.n_coils; ++w)
      if (f.present[w]) CHECK(f.strengths[w] == doctest::Approx(1000.0 + w));
}

TEST_CASE("offsets inside half the guard leave frame contents identical") {
  const TdmaSchedule s;
  const auto reference = assemble_frames(synth_samples(s, {}, 5'000.0), s, {});
  for (double offset : {-10.0, -9.0, -5.0, 5.0, 9.0, 10.0}) {
    ClockModel c;
    c.offset_ms = offset;
    const auto shifted = assemble_frames(synth_samples(s, c, 5'000.0), s, c);
    CHECK(shifted.label_mismatches == 0);
    REQUIRE(shifted.frames.size() >= 11);
    for (size_t i = 1; i < 11; ++i) {
      const Frame& a = reference.frames[i];
      const Frame& b = shifted.frames[i];
      REQUIRE(b.complete);
      for (int w = 0; w < s.n_coils; ++w)
        CHECK(a.strengths[w] == doctest::Approx(b.strengths[w]));
    }
  }
}

TEST_CASE("offset beyond the guard is flagged, not silently corrupted") {
  const TdmaSchedule s;
  ClockModel c;
  c.offset_ms = 25.0;  // > 20 ms guard
  const auto fs = assemble_frames(synth_samples(s, c, 5'000.0), s, c);
  CHECK(fs.sync_suspect_frames == fs.frames.size());
  // Windows now collect samples from the wrong activation: contents corrupt.
  bool corrupted = false;
  for (const auto& f : fs.frames)
    for (int w = 0; w < s.n_coils; ++w)
      if (f.present[w] && std::abs(f.strengths[w] - (1000.0 + w)) > 1e-9)
        corrupted = true;
  CHECK(corrupted);
}

TEST_CASE("drift with periodic resync never misattributes samples") {
  const TdmaSchedule s;
  ClockModel c;
  c.drift_ppm = 100.0;
  c.resync_interval_ms = 10'000.0;
  const double duration = 600'000.0;  // 10 minutes
  const auto samples = synth_samples(s, c, duration);
  const auto fs = assemble_frames(samples, s, c);
  CHECK(fs.label_mismatches == 0);
  CHECK(fs.sync_suspect_frames == 0);
  // Accumulated drift between resyncs stays near 1 ms, far under the guard.
  double worst = 0.0;
  for (double t = 0.0; t < duration; t += 997.0)
    worst = std::max(worst, std::abs(effective_offset_ms(c, t)));
  CHECK(worst < 1.1);
  // Frame contents stay correct: each entry holds its coil's marker.
  for (const auto& f : fs.frames)
    for (int w = 0; w < s.n_coils; ++w)
      if (f.present[w]) CHECK(f.strengths[w] == doctest::Approx(1000.0 + w));
}

TEST_CASE("uncorrected drift grows linearly; resync pulls it back") {
  ClockModel c;
  c.offset_ms = 2.0;
  c.drift_ppm = 50.0;
  CHECK(effective_offset_ms(c, 0.0) == doctest::Approx(2.0));
  CHECK(effective_offset_ms(c, 100'000.0) == doctest::Approx(2.0 + 5.0));
  CHECK(effective_offset_ms(c, 200'000.0) == doctest::Approx(2.0 + 10.0));

  c.resync_interval_ms = 10'000.0;
  c.resync_jitter_ms = 0.1;
  CHECK(effective_offset_ms(c, 10'000.0) == doctest::Approx(0.1));
  CHECK(effective_offset_ms(c, 15'000.0) == doctest::Approx(0.1 + 0.25));

  const ClockModel after = apply_resync(c, 10'000.0);
  CHECK(after.offset_ms == doctest::Approx(0.1));
  CHECK(after.drift_ppm == c.drift_ppm);

  ClockModel zero_jitter = c;
  zero_jitter.resync_jitter_ms = 0.0;
  CHECK(apply_resync(zero_jitter, 10'000.0).offset_ms == 0.0);
}

TEST_CASE("schedule validation") {
  TdmaSchedule s;
  s.activation_ms = 80.0;  // exceeds the window
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = TdmaSchedule{};
  s.n_coils = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = TdmaSchedule{};
  s.steady_skip_ms = 30.0;
  s.trailing_skip_ms = 25.0;  // leaves no averaging interval
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
