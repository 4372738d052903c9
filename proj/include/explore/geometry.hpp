#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>

namespace explore {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSqrt2 = 1.41421356237309504880;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Integer grid cell coordinates, x = column, y = row.
struct Cell {
    int x = 0;
    int y = 0;

    bool operator==(const Cell& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Cell& o) const { return !(*this == o); }
};

// Normalizes an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a <= 0.0) a += kTwoPi;
    return a - kPi;
}

inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Bearing of point `to` as seen from `from`, in world frame.
inline double bearing(const Vec2& from, const Vec2& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

// Robot pose: position in meters, heading in radians, CCW from +x, kept in (-pi, pi].
struct Pose {
    Vec2 position;
    double heading = 0.0;

    Pose rotated(double delta) const { return {position, wrap_angle(heading + delta)}; }
    Pose translated(const Vec2& d) const { return {position + d, heading}; }
};

// Supercover traversal: visits every cell a segment touches, in order from u0 to u1.
// Endpoints are in cell units (world coords divided by resolution); cell = floor(u).
// When the segment passes through a lattice corner, both side cells are visited
// before the diagonal step, so corner-touched pairs are included.
// The visitor returns false to stop early; the function returns false if stopped.
template <typename Visitor>
bool supercover_visit(const Vec2& u0, const Vec2& u1, Visitor&& visit) {
    constexpr double kCornerEps = 1e-12;
    const double inf = std::numeric_limits<double>::infinity();

    int cx = static_cast<int>(std::floor(u0.x));
    int cy = static_cast<int>(std::floor(u0.y));
    const int ex = static_cast<int>(std::floor(u1.x));
    const int ey = static_cast<int>(std::floor(u1.y));

    if (!visit(cx, cy)) return false;
    if (cx == ex && cy == ey) return true;

    const double dx = u1.x - u0.x;
    const double dy = u1.y - u0.y;
    const int sx = dx > 0 ? 1 : -1;
    const int sy = dy > 0 ? 1 : -1;

    // Parametric distance to the next x/y cell boundary and per-cell increments.
    double t_max_x = dx != 0.0 ? (static_cast<double>(cx + (sx > 0 ? 1 : 0)) - u0.x) / dx : inf;
    double t_max_y = dy != 0.0 ? (static_cast<double>(cy + (sy > 0 ? 1 : 0)) - u0.y) / dy : inf;
    const double t_delta_x = dx != 0.0 ? static_cast<double>(sx) / dx : inf;
    const double t_delta_y = dy != 0.0 ? static_cast<double>(sy) / dy : inf;

    const int max_steps = std::abs(ex - cx) + std::abs(ey - cy) + 4;
    for (int step = 0; step < max_steps; ++step) {
        if (t_max_x < inf && t_max_y < inf && std::abs(t_max_x - t_max_y) < kCornerEps) {
            // Exact corner crossing: both flanking cells are touched.
            if (!visit(cx + sx, cy)) return false;
            if (!visit(cx, cy + sy)) return false;
            cx += sx;
            cy += sy;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        } else if (t_max_x < t_max_y) {
            cx += sx;
            t_max_x += t_delta_x;
        } else {
            cy += sy;
            t_max_y += t_delta_y;
        }
        if (!visit(cx, cy)) return false;
        if (cx == ex && cy == ey) return true;
    }
    // Floating-point corner cases can stall one cell short; finish explicitly.
    if (cx != ex || cy != ey) return visit(ex, ey);
    return true;
}

}  // namespace explore
