#pragma once

#include <cmath>
#include <numbers>

namespace planesym {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
    constexpr Vec2 operator-() const { return {-x, -y}; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Reduces an angle in degrees to [-180, 180).
inline double wrap_degrees(double d) {
    if (d >= -180.0 && d < 180.0) return d;
    double w = std::fmod(d + 180.0, 360.0);
    if (w < 0.0) w += 360.0;
    w -= 180.0;
    return w >= 180.0 ? -180.0 : w;
}

/// Angle between two vectors in degrees, in [0, 180].
inline double angle_between(Vec2 a, Vec2 b) { return rad2deg(std::atan2(std::abs(cross(a, b)), dot(a, b))); }

}  // namespace planesym
