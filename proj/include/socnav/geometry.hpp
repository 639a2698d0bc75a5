#pragma once

#include <cmath>
#include <vector>

namespace socnav {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }

  bool operator==(const Vec2&) const = default;

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
  double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians in (-pi, pi]

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return unit_from_angle(theta); }
};

inline Pose2D make_pose(double x, double y, double theta) {
  return Pose2D{x, y, wrap_angle(theta)};
}

/// Circular mean of a set of angles. Returns 0 for an empty set or when the
/// resultant vector vanishes.
inline double circular_mean(const std::vector<double>& angles) {
  double sx = 0.0, sy = 0.0;
  for (double a : angles) {
    sx += std::cos(a);
    sy += std::sin(a);
  }
  if (std::abs(sx) < 1e-12 && std::abs(sy) < 1e-12) return 0.0;
  return std::atan2(sy, sx);
}

}  // namespace socnav
