#pragma once

// Planar primitives for the robot simulator.
//
// Points, rigid local frames (rotation plus optional reflection, since robots
// share no chirality), the angle helpers used by the angle-equalization
// solver, and closed-form closest approach of two linear motions.
//
// All functions are pure; coordinates are doubles and equality tests go
// through an explicit absolute tolerance.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace lcm {

/// Default absolute tolerance for geometric equality.
inline constexpr double kGeomTolerance = 1e-9;
/// Two robots collide when their closest approach is at or below this.
inline constexpr double kCollisionThreshold = 1e-9;

struct Point {
    double x{0.0};
    double y{0.0};

    constexpr Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    constexpr Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    constexpr Point operator*(double s) const { return {x * s, y * s}; }
    constexpr Point operator/(double s) const { return {x / s, y / s}; }
    constexpr Point operator-() const { return {-x, -y}; }
    friend constexpr Point operator*(double s, const Point& p) { return p * s; }

    constexpr bool operator==(const Point&) const = default;

    constexpr double dot(const Point& o) const { return x * o.x + y * o.y; }
    /// z-component of the 3-D cross product.
    constexpr double cross(const Point& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Point& p, const Point& q) { return (p - q).norm(); }

inline bool approx_equal(const Point& p, const Point& q, double tol = kGeomTolerance) {
    return std::abs(p.x - q.x) <= tol && std::abs(p.y - q.y) <= tol;
}

inline std::string to_string(const Point& p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wrap an angle into [0, 2*pi).
inline double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    return r >= two_pi ? 0.0 : r;
}

/**
 * A robot's local coordinate system.
 *
 * Local to global is `origin + R(rotation) * S * local`, with S the reflection
 * diag(1, -1) when `reflected` is set. The observing robot always sits at the
 * local origin.
 */
struct Frame {
    Point origin{};
    double rotation{0.0};
    bool reflected{false};

    static Frame identity_at(Point origin) { return Frame{origin, 0.0, false}; }

    bool operator==(const Frame&) const = default;

    /// Determinant of the linear part: +1 proper rotation, -1 with reflection.
    int determinant() const { return reflected ? -1 : 1; }
};

inline Point to_global(const Frame& f, const Point& local) {
    const double c = std::cos(f.rotation);
    const double s = std::sin(f.rotation);
    const double ly = f.reflected ? -local.y : local.y;
    return {f.origin.x + c * local.x - s * ly, f.origin.y + s * local.x + c * ly};
}

inline Point to_local(const Frame& f, const Point& global) {
    const double c = std::cos(f.rotation);
    const double s = std::sin(f.rotation);
    const Point d = global - f.origin;
    // Transpose of the rotation, then undo the reflection.
    const double lx = c * d.x + s * d.y;
    const double ly = -s * d.x + c * d.y;
    return {lx, f.reflected ? -ly : ly};
}

/// Angle in [0, pi] between rays vertex->ray_toward and vertex->target.
inline double acute_angle_at(const Point& vertex, const Point& ray_toward, const Point& target) {
    const Point u = ray_toward - vertex;
    const Point v = target - vertex;
    if (u == Point{} || v == Point{}) {
        throw Error(ErrorKind::Domain, "acute_angle_at: coincident points");
    }
    return std::atan2(std::abs(u.cross(v)), u.dot(v));
}

/// Which side of a directed ray a point lies on. Left is counterclockwise.
enum class Side { Left, Right };

inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

/// Side of `p` relative to the directed line vertex->ray_toward; collinear points report Left.
inline Side side_of(const Point& vertex, const Point& ray_toward, const Point& p) {
    return (ray_toward - vertex).cross(p - vertex) >= 0.0 ? Side::Left : Side::Right;
}

/**
 * The point at distance `radius` from `vertex` whose ray makes angle `theta`
 * with the ray vertex->ray_toward, on the requested side.
 */
inline Point point_at_angle(const Point& vertex, const Point& ray_toward, double theta,
                            double radius, Side side) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
        throw Error(ErrorKind::Domain, "point_at_angle: theta must lie in (0, pi/2)");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorKind::Domain, "point_at_angle: radius must be positive");
    }
    const Point u = ray_toward - vertex;
    const double len = u.norm();
    if (len == 0.0) throw Error(ErrorKind::Domain, "point_at_angle: ray_toward equals vertex");
    const Point dir = u / len;
    const double a = side == Side::Left ? theta : -theta;
    const Point rotated{dir.x * std::cos(a) - dir.y * std::sin(a),
                        dir.x * std::sin(a) + dir.y * std::cos(a)};
    return vertex + rotated * radius;
}

/// Linear motion start->end over the unit parameter s in [0, 1].
struct MotionSegment {
    Point start{};
    Point end{};

    Point at(double s) const { return start + (end - start) * s; }
    bool operator==(const MotionSegment&) const = default;
};

/// Minimum over s in [0,1] of |m1(s) - m2(s)|, closed form.
inline double min_separation(const MotionSegment& m1, const MotionSegment& m2) {
    const Point w0 = m1.start - m2.start;
    const Point dv = (m1.end - m1.start) - (m2.end - m2.start);
    const double a = dv.dot(dv);
    if (a == 0.0) return w0.norm();
    const double s = std::clamp(-w0.dot(dv) / a, 0.0, 1.0);
    return (w0 + dv * s).norm();
}

}  // namespace lcm
