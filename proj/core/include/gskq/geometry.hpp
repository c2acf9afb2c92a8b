#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace gskq {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double euclidean_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Axis-aligned rectangle. Valid iff lo <= hi per axis.
struct Rect {
    Point lo{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Point hi{-std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    static Rect from_point(Point p) { return Rect{p, p}; }

    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y; }

    bool contains(Point p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }

    bool contains(const Rect& r) const {
        return r.lo.x >= lo.x && r.lo.y >= lo.y && r.hi.x <= hi.x && r.hi.y <= hi.y;
    }

    void expand(Point p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }

    void expand(const Rect& r) {
        expand(r.lo);
        expand(r.hi);
    }

    double diagonal() const { return euclidean_distance(lo, hi); }

    Point center() const { return {(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0}; }
};

/// Minimum Euclidean distance from a point to a rectangle; 0 if the point
/// lies inside.
inline double min_dist(Point p, const Rect& r) {
    double dx = 0.0;
    if (p.x < r.lo.x) {
        dx = r.lo.x - p.x;
    } else if (p.x > r.hi.x) {
        dx = p.x - r.hi.x;
    }
    double dy = 0.0;
    if (p.y < r.lo.y) {
        dy = r.lo.y - p.y;
    } else if (p.y > r.hi.y) {
        dy = p.y - r.hi.y;
    }
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace gskq
