#include "magtrack/field_model.hpp"

#include <cmath>
#include <stdexcept>

namespace magtrack {

void CoilSpec::validate() const {
  if (turns < 1) throw std::invalid_argument("coil turns must be >= 1");
  if (!(radius_m > 0.0) || !std::isfinite(radius_m))
    throw std::invalid_argument("coil radius must be positive");
  if (!(current_a > 0.0) || !std::isfinite(current_a))
    throw std::invalid_argument("coil current must be positive");
  if (!(drive_frequency_hz > 0.0) || !std::isfinite(drive_frequency_hz))
    throw std::invalid_argument("coil drive frequency must be positive");
}

double on_axis_field_strength(const CoilSpec& coil, double r_m) {
  coil.validate();
  if (!(r_m >= 0.0) || !std::isfinite(r_m))
    throw std::invalid_argument("axial distance must be >= 0");
  const double a2 = coil.radius_m * coil.radius_m;
  const double denom = 2.0 * std::pow(a2 + r_m * r_m, 1.5);
  return kMu0 * coil.turns * a2 * coil.current_a / denom;
}

FieldVector dipole_field(const Pose& coil_pose, const CoilSpec& coil,
                         const Vec3& point) {
  coil.validate();
  coil_pose.validate();
  const Vec3 rv = point - coil_pose.position;
  const double r = rv.norm();
  if (r <= coil.radius_m)
    throw std::domain_error(
        "dipole approximation invalid inside the coil radius");
  const Vec3 rhat = rv / r;
  const Vec3 m = coil.dipole_moment() * coil_pose.normal();
  const double r3 = r * r * r;
  return (kMu0 / (4.0 * 3.14159265358979323846)) *
         (3.0 * dot(m, rhat) * rhat - m) / r3;
}

FieldVector superposed_field(std::span<const std::pair<Pose, CoilSpec>> coils,
                             const Vec3& point) {
  FieldVector total;
  for (const auto& [pose, spec] : coils) total += dipole_field(pose, spec, point);
  return total;
}

double induced_voltage_amplitude(double field_magnitude_t, const CoilSpec& coil,
                                 double receiver_axis_area_turns) {
  coil.validate();
  if (!(field_magnitude_t >= 0.0) || !std::isfinite(field_magnitude_t))
    throw std::invalid_argument("field magnitude must be >= 0");
  if (!(receiver_axis_area_turns > 0.0))
    throw std::invalid_argument("receiver area-turns must be positive");
  return coil.angular_frequency() * receiver_axis_area_turns * field_magnitude_t;
}

}  // namespace magtrack
