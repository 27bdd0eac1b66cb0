#pragma once

#include <algorithm>
#include <cstddef>
#include <variant>
#include <vector>

#include "gflock/vec2.hpp"

namespace gflock {

struct Circle {
    Vec2 center;
    double radius = 1.0;
};

// Solid region bounded by the closed vertex loop (last edge joins
// back to the first vertex). May be non-convex.
struct Polygon {
    std::vector<Vec2> vertices;
};

using Obstacle = std::variant<Circle, Polygon>;

struct TargetArea {
    Vec2 center;
    double radius = 1.0;
};

struct Rect {
    Vec2 min;
    Vec2 max;

    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    bool contains(const Rect& o) const { return contains(o.min) && contains(o.max); }
    Vec2 size() const { return max - min; }
};

inline Vec2 closest_point_on_segment(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq == 0.0) return a;
    double t = (p - a).dot(ab) / len_sq;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return a + ab * t;
}

// Even-odd rule; points exactly on the boundary are not interior.
inline bool point_in_polygon(Vec2 p, const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        // on-edge check first so boundary points classify as outside
        const Vec2 cp = closest_point_on_segment(v[j], v[i], p);
        if ((cp - p).norm_sq() == 0.0) return false;
        const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
        if (crosses) {
            const double x_at =
                v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

// At least 3 vertices and not all collinear.
inline bool polygon_is_valid(const Polygon& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) return false;
    for (std::size_t i = 2; i < v.size(); ++i)
        if ((v[1] - v[0]).cross(v[i] - v[0]) != 0.0) return true;
    return false;
}

struct NearestPoint {
    Vec2 point;    // closest point on the obstacle boundary
    double dist = 0.0;  // distance from the query to that point
    bool inside = false;  // query lies in the obstacle interior
};

// Closest boundary point and distance. Polygon ties go to the lowest edge
// index. `inside` flags a query in the interior; callers treat it as a
// collision.
inline NearestPoint nearest_obstacle_point(Vec2 pos, const Obstacle& obstacle) {
    if (const auto* c = std::get_if<Circle>(&obstacle)) {
        const Vec2 offset = pos - c->center;
        const double d = offset.norm();
        if (d == 0.0) {
            // center: every boundary point is equidistant; pick +x
            return {c->center + Vec2{c->radius, 0.0}, c->radius, true};
        }
        const Vec2 boundary = c->center + offset * (c->radius / d);
        return {boundary, std::abs(d - c->radius), d < c->radius};
    }
    const auto& poly = std::get<Polygon>(obstacle);
    const auto& v = poly.vertices;
    NearestPoint best;
    double best_sq = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 cp = closest_point_on_segment(v[i], v[(i + 1) % v.size()], pos);
        const double d_sq = (cp - pos).norm_sq();
        if (best_sq < 0.0 || d_sq < best_sq) {
            best_sq = d_sq;
            best.point = cp;
        }
    }
    best.dist = std::sqrt(best_sq);
    best.inside = point_in_polygon(pos, poly);
    return best;
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = (q - p).cross(r - p);
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    const auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    if (o1 == 0 && on_segment(a, c, b)) return true;
    if (o2 == 0 && on_segment(a, d, b)) return true;
    if (o3 == 0 && on_segment(c, a, d)) return true;
    if (o4 == 0 && on_segment(c, b, d)) return true;
    return false;
}

inline bool rect_intersects_obstacle(const Rect& r, const Obstacle& obstacle) {
    if (const auto* c = std::get_if<Circle>(&obstacle)) {
        const double cx = std::clamp(c->center.x, r.min.x, r.max.x);
        const double cy = std::clamp(c->center.y, r.min.y, r.max.y);
        return (Vec2{cx, cy} - c->center).norm_sq() <= c->radius * c->radius;
    }
    const auto& poly = std::get<Polygon>(obstacle);
    const Vec2 corners[4] = {r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}};
    for (const Vec2& corner : corners)
        if (point_in_polygon(corner, poly)) return true;
    for (const Vec2& v : poly.vertices)
        if (r.contains(v)) return true;
    const auto& pv = poly.vertices;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const Vec2 a = pv[i];
        const Vec2 b = pv[(i + 1) % pv.size()];
        for (int k = 0; k < 4; ++k)
            if (segments_intersect(a, b, corners[k], corners[(k + 1) % 4])) return true;
    }
    return false;
}

}  // namespace gflock
