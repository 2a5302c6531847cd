#include "uncross/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace uncross {

namespace {

constexpr double kOrientEps = 1e-12;

// p is assumed collinear with the segment; checks bounding-box containment.
bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

}  // namespace

int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double ux = b.x() - a.x(), uy = b.y() - a.y();
    const double vx = c.x() - a.x(), vy = c.y() - a.y();
    const double det = ux * vy - uy * vx;
    const double mag = std::abs(ux * vy) + std::abs(uy * vx);
    if (std::abs(det) <= kOrientEps * mag) return 0;
    return det > 0.0 ? 1 : -1;
}

bool segments_intersect(const EdgeSegment& s1, const EdgeSegment& s2) {
    const Eigen::Vector2d a = s1.row(0), b = s1.row(1), c = s2.row(0), d = s2.row(1);
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool boxes_overlap(const EdgeSegment& s1, const EdgeSegment& s2) {
    const Eigen::RowVector2d lo1 = s1.colwise().minCoeff(), hi1 = s1.colwise().maxCoeff();
    const Eigen::RowVector2d lo2 = s2.colwise().minCoeff(), hi2 = s2.colwise().maxCoeff();
    return lo1.x() <= hi2.x() && lo2.x() <= hi1.x() && lo1.y() <= hi2.y() && lo2.y() <= hi1.y();
}

int count_crossings(const Layout& layout, const GraphInstance& graph) {
    const auto& edges = graph.edges;
    const int m = static_cast<int>(edges.size());
    int crossings = 0;
    for (int i = 0; i < m; ++i) {
        const EdgeSegment si = edge_segment(layout, edges[i]);
        for (int j = i + 1; j < m; ++j) {
            const Edge& e = edges[i];
            const Edge& f = edges[j];
            if (e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b) continue;
            const EdgeSegment sj = edge_segment(layout, edges[j]);
            if (!boxes_overlap(si, sj)) continue;
            if (segments_intersect(si, sj)) ++crossings;
        }
    }
    return crossings;
}

double point_segment_distance(const Eigen::Vector2d& p, const EdgeSegment& s) {
    const Eigen::Vector2d a = s.row(0), b = s.row(1);
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Closest points of two closed segments (Ericson, Real-Time Collision
// Detection, 5.1.9), robust to degenerate zero-length segments.
ClosestApproach closest_approach(const EdgeSegment& s1, const EdgeSegment& s2) {
    const Eigen::Vector2d p1 = s1.row(0), q1 = s1.row(1), p2 = s2.row(0), q2 = s2.row(1);
    const Eigen::Vector2d d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a == 0.0 && e == 0.0) {
        // both segments are points
    } else if (a == 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e == 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            if (denom != 0.0) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    ClosestApproach res;
    res.t = s;
    res.s = t;
    res.distance = ((p1 + s * d1) - (p2 + t * d2)).norm();
    return res;
}

double segment_distance(const EdgeSegment& s1, const EdgeSegment& s2) {
    return closest_approach(s1, s2).distance;
}

}  // namespace uncross
