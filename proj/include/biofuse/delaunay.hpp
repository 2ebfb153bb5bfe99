#pragma once

#include <array>
#include <span>
#include <vector>

#include "biofuse/core.hpp"

namespace biofuse {

using Triangle = std::array<int, 3>;  // vertex indices, counter-clockwise

/// Delaunay triangulation of 2-D points.
///
/// A sweep over the points in lexicographic order builds a triangulation of
/// the convex hull; Lawson edge flips then restore the empty-circumcircle
/// property. Only orientation and in-circle predicates are used, so hull
/// triangles are never lost the way they can be with a finite super-triangle.
///
/// Exact duplicate coordinates are nudged by a deterministic sub-micropixel
/// offset derived from the point index. Throws DegenerateGeometry for fewer
/// than three points or when every point is collinear.
std::vector<Triangle> delaunay_triangulate(std::span<const Point2> points);
std::vector<Triangle> delaunay_triangulate(const Template& t);

/// Coordinates actually triangulated (after duplicate perturbation).
std::vector<Point2> perturb_duplicates(std::span<const Point2> points);

}  // namespace biofuse
