#include "magtrack/receiver_model.hpp"

#include <cmath>
#include <stdexcept>

#include "magtrack/rng.hpp"

namespace magtrack {

void ReceiverSpec::validate() const {
  if (!(axis_area_turns > 0.0))
    throw std::invalid_argument("receiver area-turns must be positive");
  if (!orientation.is_unit(1e-9))
    throw std::invalid_argument("receiver orientation must be a unit quaternion");
  if (!(amp_slope_v_per_db > 0.0))
    throw std::invalid_argument("amplifier slope must be positive");
  if (adc_bits < 1 || adc_bits > 31)
    throw std::invalid_argument("adc bits out of range");
  if (!(adc_fullscale_v > 0.0))
    throw std::invalid_argument("adc fullscale must be positive");
  if (!(noise_sigma_db >= 0.0))
    throw std::invalid_argument("noise sigma must be >= 0");
}

double sense_magnitude(const FieldVector& field, const ReceiverSpec& receiver) {
  receiver.validate();
  if (!field.finite()) throw std::invalid_argument("field must be finite");
  // Project onto the receiver triad explicitly; the norm is rotation-invariant
  // but the per-axis projections are what the three windings individually see.
  const Vec3 body = receiver.orientation.conjugate().rotate(field);
  return body.norm();
}

double log_amplify(double v_in, const ReceiverSpec& receiver) {
  receiver.validate();
  if (!(v_in > 0.0))
    throw std::domain_error("log amplifier input must be positive");
  return receiver.amp_slope_v_per_db *
         (20.0 * std::log10(v_in) - receiver.amp_intercept_dbv);
}

uint32_t adc_quantize(double v, const ReceiverSpec& receiver) {
  receiver.validate();
  if (std::isnan(v)) throw std::invalid_argument("adc input is NaN");
  const double fs = receiver.adc_fullscale_v;
  const double clamped = v < 0.0 ? 0.0 : (v > fs ? fs : v);
  const double code = clamped / fs * static_cast<double>(receiver.adc_max_code());
  return static_cast<uint32_t>(std::llround(code));
}

uint32_t measure(const Pose& coil_pose, const CoilSpec& coil,
                 const Vec3& receiver_position, const ReceiverSpec& receiver,
                 uint64_t rng_seed) {
  const FieldVector b = dipole_field(coil_pose, coil, receiver_position);
  const double magnitude = sense_magnitude(b, receiver);
  const double v_in =
      induced_voltage_amplitude(magnitude, coil, receiver.axis_area_turns);
  double level_db = v_in > 0.0 ? 20.0 * std::log10(v_in)
                               : -1e12;  // zero envelope -> amplifier floor
  if (receiver.noise_sigma_db > 0.0) {
    auto rng = make_rng(rng_seed);
    std::normal_distribution<double> noise(0.0, receiver.noise_sigma_db);
    level_db += noise(rng);
  }
  const double amplified =
      receiver.amp_slope_v_per_db * (level_db - receiver.amp_intercept_dbv);
  return adc_quantize(amplified, receiver);
}

}  // namespace magtrack
