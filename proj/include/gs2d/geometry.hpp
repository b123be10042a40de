// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace gs2d {

/// Delaunay mesh over pixel-space points. Triangles are CCW vertex-index
/// triples covering the convex hull of the points.
struct TriangleMesh {
    std::vector<Vec2> points;
    std::vector<std::array<int, 3>> triangles;
};

/// Least-squares ellipse for one triangle's six-point set. Semi-axes are
/// stored after the 0.5 shrink, ordered semi_x >= semi_y; theta01 is the
/// major-axis angle normalized by pi (period-pi convention).
struct FittedEllipse {
    Vec2 center;
    real semi_x = 0.0;
    real semi_y = 0.0;
    real theta01 = 0.0;
};

/// Mean distance to the nearest other point. Requires >= 2 points.
real mean_nn_distance(const std::vector<Vec2>& points);

struct AugmentedPoints {
    std::vector<Vec2> points;   // originals first, boundary points appended
    std::size_t first_boundary; // index of the first boundary point
};

/// Appends the four pixel-center corners plus evenly spaced edge points at
/// intervals <= spacing (callers pass 3*delta). Each edge contributes
/// ceil(edge_len / spacing) points counting its starting corner; points
/// within 1e-6 of an existing point are skipped.
AugmentedPoints add_boundary_points(const std::vector<Vec2>& points, int width, int height,
                                    real spacing);

/// Delaunay triangulation. Requires >= 3 points, no duplicates, not all
/// collinear. The result depends only on the point set, not its order.
TriangleMesh delaunay(const std::vector<Vec2>& points);

/// Vertices plus edge midpoints.
std::array<Vec2, 6> six_point_set(const std::array<Vec2, 3>& tri);

/// Direct constrained least-squares conic fit (ellipse branch of the
/// generalized eigenproblem), converted to center/axes/angle and shrunk by
/// 0.5. Throws std::domain_error when the solution is not an ellipse.
FittedEllipse fit_ellipse(const std::array<Vec2, 6>& pts);

/// Centroid-relative vertex coordinates scaled by sqrt(1/area); the
/// normalized triangle has unit area.
std::array<real, 6> triangle_feature(const std::array<Vec2, 3>& tri);

/// {center_x_ndc, center_y_ndc, semi_x/(semi_y+1e-6), theta01}.
std::array<real, 4> ellipse_feature(const FittedEllipse& e, int width, int height);

/// Wavefront-style export: "v x y 0" lines then 1-based "f a b c" lines.
void save_mesh_obj(const TriangleMesh& mesh, const std::string& path);

real triangle_area(const std::array<Vec2, 3>& tri);

} // namespace gs2d
