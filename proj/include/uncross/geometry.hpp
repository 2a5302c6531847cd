#pragma once

#include "uncross/types.hpp"

namespace uncross {

// Sign of the cross product (b-a) x (c-a): +1 left turn, -1 right turn,
// 0 when the triple is collinear within a relative tolerance.
int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// Closed-segment intersection test, including touching endpoints and
// collinear overlap.
bool segments_intersect(const EdgeSegment& s1, const EdgeSegment& s2);

// Axis-aligned bounding boxes of the two segments overlap (closed intervals).
bool boxes_overlap(const EdgeSegment& s1, const EdgeSegment& s2);

// Number of edge pairs whose segments intersect, excluding pairs that share
// an endpoint.
int count_crossings(const Layout& layout, const GraphInstance& graph);

double point_segment_distance(const Eigen::Vector2d& p, const EdgeSegment& s);

// Closest points between two closed segments, parametrized as
// s1.row(0) + t * (s1.row(1) - s1.row(0)) and likewise with s for s2.
struct ClosestApproach {
    double t = 0.0;
    double s = 0.0;
    double distance = 0.0;
};

ClosestApproach closest_approach(const EdgeSegment& s1, const EdgeSegment& s2);

double segment_distance(const EdgeSegment& s1, const EdgeSegment& s2);

}  // namespace uncross
