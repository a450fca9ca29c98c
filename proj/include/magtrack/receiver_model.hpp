#pragma once

#include <cstdint>

#include "magtrack/field_model.hpp"
#include "magtrack/geometry.hpp"

namespace magtrack {

/// Tri-axis receiver coil plus its analog chain: log amplifier and ADC.
///
/// The three sensing axes are an orthonormal triad rotated by `orientation`,
/// so magnitude sensing is orientation-invariant by construction. The
/// amplifier maps input level in dBV to volts; `noise_sigma_db` is Gaussian
/// noise added to the amplifier input level in dB (log-normal on the voltage).
struct ReceiverSpec {
  double axis_area_turns = 0.01;      // m^2 * turns per axis
  Quat orientation;                   // rotation of the sensing triad
  double amp_slope_v_per_db = 0.024;  // AD8310-class log slope
  double amp_intercept_dbv = -140.0;  // input level mapping to 0 V out
  int adc_bits = 24;
  double adc_fullscale_v = 3.3;
  double noise_sigma_db = 3.0;        // stock level: ~0.05-0.10 m per-frame distance error

  void validate() const;

  uint32_t adc_max_code() const { return (1u << adc_bits) - 1u; }
};

/// One rectified strength reading: ADC counts attributed to a transmitter
/// coil at a receiver-clock timestamp. coil_id is -1 during guard intervals.
struct RawSample {
  double timestamp_ms = 0.0;
  int coil_id = -1;
  uint32_t strength = 0;
};

/// Field magnitude seen by the tri-axis coil: |B| regardless of orientation.
double sense_magnitude(const FieldVector& field, const ReceiverSpec& receiver);

/// Log amplifier transfer: amp_slope * (20*log10(v_in) - amp_intercept).
/// Requires v_in > 0; a zero envelope is mapped to the floor upstream in
/// measure(), not here.
double log_amplify(double v_in, const ReceiverSpec& receiver);

/// Uniform quantization of [0, fullscale] onto [0, 2^bits - 1], clamping
/// silently at both rails.
uint32_t adc_quantize(double v, const ReceiverSpec& receiver);

/// Full measurement chain for one coil activation: dipole field at the
/// receiver position, magnitude sensing, induction, dB-domain noise, log
/// amplification, quantization. Deterministic for a fixed seed.
uint32_t measure(const Pose& coil_pose, const CoilSpec& coil,
                 const Vec3& receiver_position, const ReceiverSpec& receiver,
                 uint64_t rng_seed);

}  // namespace magtrack
