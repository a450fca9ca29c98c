#pragma once

#include <span>
#include <utility>

#include "magtrack/geometry.hpp"

namespace magtrack {

/// Vacuum permeability, H/m.
inline constexpr double kMu0 = 4.0 * 3.14159265358979323846 * 1e-7;

/// Transmitter coil: n turns of radius a carrying a sinusoidal drive current.
struct CoilSpec {
  int turns = 100;
  double radius_m = 0.01;
  double current_a = 0.1;
  double drive_frequency_hz = 40000.0;

  void validate() const;

  /// Magnetic dipole moment magnitude n*I*pi*a^2, A*m^2.
  double dipole_moment() const {
    return turns * current_a * 3.14159265358979323846 * radius_m * radius_m;
  }

  double angular_frequency() const {
    return 2.0 * 3.14159265358979323846 * drive_frequency_hz;
  }
};

/// Magnetic flux density at a point, Tesla.
using FieldVector = Vec3;

/// Field magnitude on the coil axis at distance r from the coil center:
/// mu0*n*a^2*I / (2*(a^2+r^2)^(3/2)). Strictly decreasing in r.
double on_axis_field_strength(const CoilSpec& coil, double r_m);

/// Point-dipole field of the coil at an arbitrary world point. Valid outside
/// the coil radius; matches the on-axis law to ~1.5% at r >= 10a and better
/// further out.
FieldVector dipole_field(const Pose& coil_pose, const CoilSpec& coil,
                         const Vec3& point);

/// Vector sum of several coil fields at one point. The TDMA schedule keeps a
/// single coil active at a time, so this only matters for fault injection.
FieldVector superposed_field(std::span<const std::pair<Pose, CoilSpec>> coils,
                             const Vec3& point);

/// Peak induced voltage on a receiver winding of the given area-turns product:
/// omega * (area*turns) * B.
double induced_voltage_amplitude(double field_magnitude_t, const CoilSpec& coil,
                                 double receiver_axis_area_turns);

}  // namespace magtrack
