#pragma once

#include <cmath>
#include <numbers>

namespace rectikernel {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;

  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

[[nodiscard]] inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
[[nodiscard]] inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm2(Point2 a) { return a.x * a.x + a.y * a.y; }
[[nodiscard]] inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
[[nodiscard]] inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Triple {
  Point2 z1;
  Point2 z2;
  Point2 z3;
};

/// Line through `anchor` with direction angle `theta` in [0, pi).
struct Line {
  Point2 anchor;
  double theta = 0.0;

  Line() = default;
  Line(Point2 a, double angle) : anchor(a), theta(normalize_angle(angle)) {}

  [[nodiscard]] Point2 direction() const { return {std::cos(theta), std::sin(theta)}; }
  [[nodiscard]] Point2 normal() const { return {-std::sin(theta), std::cos(theta)}; }

  /// Signed offset of p along the normal.
  [[nodiscard]] double signed_distance(Point2 p) const { return dot(p - anchor, normal()); }
  [[nodiscard]] double distance(Point2 p) const { return std::abs(signed_distance(p)); }
  /// Coordinate of the orthogonal projection of p along the direction.
  [[nodiscard]] double abscissa(Point2 p) const { return dot(p - anchor, direction()); }
  [[nodiscard]] Point2 at(double s, double offset = 0.0) const {
    return anchor + s * direction() + offset * normal();
  }

  static double normalize_angle(double angle) {
    double t = std::fmod(angle, std::numbers::pi);
    if (t < 0.0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t = 0.0;
    return t;
  }

  static Line through(Point2 a, Point2 b) {
    const Point2 d = b - a;
    return Line(a, std::atan2(d.y, d.x));
  }
};

/// Closed ball.
struct Ball {
  Point2 center;
  double radius = 1.0;

  [[nodiscard]] bool contains(Point2 p) const { return norm2(p - center) <= radius * radius; }
  [[nodiscard]] Ball dilate(double k) const { return {center, k * radius}; }
};

}  // namespace rectikernel
