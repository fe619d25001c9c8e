#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace wams {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
    /// Perpendicular pointing to the right of this direction.
    Vec2 perp_right() const { return {y, -x}; }
};

inline double dist(const Vec2& a, const Vec2& b) { return (b - a).norm(); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 0.0};
    }
};

/// Proper intersection of segments [a1,a2] and [b1,b2].
/// Returns parameters (t, u) along each segment when they cross.
inline std::optional<std::pair<double, double>>
segment_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
    Vec2 r = a2 - a1;
    Vec2 s = b2 - b1;
    double denom = r.cross(s);
    if (std::abs(denom) < 1e-12) return std::nullopt; // parallel or degenerate
    Vec2 qp = b1 - a1;
    double t = qp.cross(s) / denom;
    double u = qp.cross(r) / denom;
    if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    return std::make_pair(t, u);
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                                     double* t_out = nullptr) {
    Vec2 ab = b - a;
    double len2 = ab.dot(ab);
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::max(0.0, std::min(1.0, t));
    if (t_out) *t_out = t;
    return dist(p, a + ab * t);
}

/// Shoelace signed area; positive for counter-clockwise rings.
inline double signed_area(const std::vector<Vec2>& ring) {
    double s = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % ring.size()];
        s += a.cross(b);
    }
    return 0.5 * s;
}

inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& ring) {
    bool in = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        if ((ring[i].y > p.y) != (ring[j].y > p.y)) {
            double xx = ring[j].x + (p.y - ring[j].y) / (ring[i].y - ring[j].y) *
                                        (ring[i].x - ring[j].x);
            if (p.x < xx) in = !in;
        }
    }
    return in;
}

inline double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += dist(pts[i], pts[i + 1]);
    return len;
}

/// Point at arc length s along a polyline, clamped to the ends.
inline Vec2 polyline_at(const std::vector<Vec2>& pts, double s) {
    if (pts.empty()) return {};
    if (s <= 0.0) return pts.front();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = dist(pts[i], pts[i + 1]);
        if (s <= d) {
            if (d <= 0.0) return pts[i];
            return pts[i] + (pts[i + 1] - pts[i]) * (s / d);
        }
        s -= d;
    }
    return pts.back();
}

/// Offset a polyline sideways; positive offset moves to the right of travel.
inline std::vector<Vec2> offset_polyline(const std::vector<Vec2>& pts, double off) {
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vec2 d1 = i > 0 ? (pts[i] - pts[i - 1]).normalized() : Vec2{};
        Vec2 d2 = i + 1 < pts.size() ? (pts[i + 1] - pts[i]).normalized() : Vec2{};
        Vec2 d = (d1 + d2).normalized();
        if (d.norm() == 0.0) d = d1.norm() > 0.0 ? d1 : d2;
        out.push_back(pts[i] + d.perp_right() * off);
    }
    return out;
}

} // namespace wams
