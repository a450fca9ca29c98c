#pragma once

#include <cmath>
#include <stdexcept>

namespace magtrack {

/// 3D vector; meters when used as a position, Tesla when used as a field.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double squared_norm() const { return x * x + y * y + z * z; }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
  return v / n;
}

/// Unit quaternion rotation. Identity by default.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  bool is_unit(double tol = 1e-9) const { return std::abs(norm() - 1.0) <= tol; }

  Quat normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
  }

  Quat conjugate() const { return {w, -x, -y, -z}; }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // q v q* expanded via the double-cross identity.
    const Vec3 u{x, y, z};
    const Vec3 t = 2.0 * cross(u, v);
    return v + w * t + cross(u, t);
  }

  static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 a = magtrack::normalized(axis);
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
  }

  /// Shortest rotation taking direction `from` onto direction `to`.
  static Quat from_two_vectors(const Vec3& from, const Vec3& to) {
    const Vec3 f = magtrack::normalized(from);
    const Vec3 t = magtrack::normalized(to);
    const double c = dot(f, t);
    if (c < -1.0 + 1e-12) {
      // Antiparallel: rotate pi about any axis orthogonal to f.
      Vec3 ortho = cross(f, Vec3{1, 0, 0});
      if (ortho.norm() < 1e-9) ortho = cross(f, Vec3{0, 1, 0});
      return from_axis_angle(ortho, 3.14159265358979323846);
    }
    const Vec3 axis = cross(f, t);
    Quat q{1.0 + c, axis.x, axis.y, axis.z};
    return q.normalized();
  }
};

/// Rigid placement: position in meters plus a unit-quaternion orientation.
/// The local +Z axis rotated by `orientation` is the coil normal.
struct Pose {
  Vec3 position;
  Quat orientation;

  Vec3 normal() const { return orientation.rotate(Vec3{0, 0, 1}); }

  void validate() const {
    if (!position.finite()) throw std::invalid_argument("pose position not finite");
    if (!orientation.is_unit(1e-9))
      throw std::invalid_argument("pose orientation must be a unit quaternion");
  }
};

/// Axis-aligned box, used for workspaces and solver search regions.
struct Aabb {
  Vec3 lo;
  Vec3 hi;

  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol &&
           p.y <= hi.y + tol && p.z >= lo.z - tol && p.z <= hi.z + tol;
  }
  bool empty() const { return hi.x <= lo.x || hi.y <= lo.y || hi.z <= lo.z; }
};

}  // namespace magtrack
